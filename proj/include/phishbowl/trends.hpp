#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishbowl/embedding.hpp"
#include "phishbowl/time.hpp"

namespace phishbowl {

struct TrendConfig {
  double delta = 0.2;  // squared-distance join radius
  double k_alert = 0.5;
  double t_alert = 35.0;
  int daily_window_days = 7;

  void validate() const;
};

/// Alert threshold reached by a group taking p_alert percent of the daily
/// volume on each of `days` consecutive days: p (1 - k^T) / (1 - k).
double calibrate_threshold(double p_alert, double k_alert, int days);

struct Alert {
  std::string group_id;
  std::string representative_record_id;
  double score_at_alert = 0.0;
  Timestamp timestamp{};
};

nlohmann::json to_json(const Alert& a);
Alert alert_from_json(const nlohmann::json& j);

struct TrendGroup {
  std::string group_id;
  Vector representative_vector;
  std::string representative_record_id;
  std::string representative_text;
  double score = 0.0;
  Timestamp last_update{};
  int member_count = 0;
  bool alert_armed = true;
};

/// Index of the representative nearest to `vector` within `delta`, if any.
std::optional<std::size_t> nearest_group(const std::vector<TrendGroup>& groups,
                                         std::span<const double> vector, double delta);

/// Processed-email counts per UTC day. The daily average is the mean over
/// the most recent complete days (up to the window), or the running count of
/// the first day before any day has completed; never below 1.
class DailyVolume {
 public:
  explicit DailyVolume(int window_days = 7) : window_days_(window_days) {}
  void record(Timestamp at);
  double average(Timestamp at) const;

 private:
  int window_days_;
  std::optional<std::int64_t> first_day_;
  std::map<std::int64_t, std::uint64_t> counts_;
};

struct Observation {
  Vector vector;
  double label = 0.0;  // l_ensemble for classified mail, 1 for submissions
  Timestamp at{};
  std::string record_id;
  std::string text;
};

struct ObservationResult {
  std::string group_id;
  bool new_group = false;
  double score = 0.0;
  std::optional<Alert> alert;
};

struct GroupSummary {
  std::string group_id;
  std::string representative_record_id;
  std::string representative_text;
  double score = 0.0;  // decayed to the query time
  int member_count = 0;
  Timestamp last_update{};
};

/// Groups similar emails and raises one alert per spike.
///
/// Each observation joins the nearest representative within `delta` or
/// founds a new group. The group score decays by k_alert^t over the t idle
/// days, then grows by (100 / daily average) * label. An alert fires when
/// the score reaches t_alert while the group is armed; the group re-arms once
/// a decayed score is seen below t_alert again.
class TrendTracker {
 public:
  explicit TrendTracker(TrendConfig config = {});

  /// Throws ValidationError on a label outside [0, 1] or a timestamp older
  /// than the group's last update.
  ObservationResult add_observation(const Observation& obs);

  /// Groups sorted by decayed score, highest first.
  std::vector<GroupSummary> summaries(Timestamp now) const;
  double daily_average(Timestamp at) const;
  std::size_t group_count() const;
  const TrendConfig& config() const noexcept { return config_; }

 private:
  TrendConfig config_;
  mutable std::mutex mutex_;
  std::vector<TrendGroup> groups_;
  DailyVolume volume_;
  std::uint64_t next_group_ = 1;
};

/// Alert history, optionally persisted one JSON object per line.
class AlertLog {
 public:
  AlertLog() = default;
  explicit AlertLog(const std::filesystem::path& path);

  void append(const Alert& alert);
  /// Newest first.
  std::vector<Alert> list() const;

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
  };
  mutable std::mutex mutex_;
  std::vector<Alert> alerts_;
  std::unique_ptr<std::FILE, FileCloser> file_;
};

}  // namespace phishbowl
