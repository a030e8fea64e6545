#include "phishbowl/trends.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

// Slack for the threshold comparison so a score that reaches t_alert by
// summation is not missed by the last ulp.
constexpr double kAlertSlack = 1e-9;

std::string group_name(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "g%06llu", static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace

void TrendConfig::validate() const {
  if (!(delta > 0.0)) throw ValidationError("config", "trend delta must be positive");
  if (!(k_alert > 0.0 && k_alert < 1.0)) {
    throw ValidationError("config", "k_alert must lie in (0, 1)");
  }
  if (!(t_alert > 0.0)) throw ValidationError("config", "t_alert must be positive");
  if (daily_window_days < 1) throw ValidationError("config", "daily window must be >= 1 day");
}

double calibrate_threshold(double p_alert, double k_alert, int days) {
  if (!(p_alert > 0.0) || !(k_alert > 0.0 && k_alert < 1.0) || days < 1) {
    throw ValidationError("trend", "calibration needs p > 0, 0 < k < 1, T >= 1");
  }
  return p_alert * (1.0 - std::pow(k_alert, days)) / (1.0 - k_alert);
}

nlohmann::json to_json(const Alert& a) {
  return {{"group_id", a.group_id},
          {"representative_record_id", a.representative_record_id},
          {"score_at_alert", a.score_at_alert},
          {"timestamp", to_millis(a.timestamp)}};
}

Alert alert_from_json(const nlohmann::json& j) {
  try {
    Alert a;
    a.group_id = j.at("group_id").get<std::string>();
    a.representative_record_id = j.at("representative_record_id").get<std::string>();
    a.score_at_alert = j.at("score_at_alert").get<double>();
    a.timestamp = from_millis(j.at("timestamp").get<std::int64_t>());
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("alerts", std::string("invalid alert record: ") + e.what());
  }
}

std::optional<std::size_t> nearest_group(const std::vector<TrendGroup>& groups,
                                         std::span<const double> vector, double delta) {
  std::optional<std::size_t> best;
  double best_distance = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double d = squared_distance(groups[i].representative_vector, vector);
    if (d <= delta && (!best || d < best_distance)) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

void DailyVolume::record(Timestamp at) {
  const auto day = day_index(at);
  if (!first_day_ || day < *first_day_) first_day_ = day;
  ++counts_[day];
  // Only the window behind the newest day is ever read.
  const auto newest = counts_.rbegin()->first;
  while (!counts_.empty() && counts_.begin()->first < newest - window_days_) {
    counts_.erase(counts_.begin());
  }
}

double DailyVolume::average(Timestamp at) const {
  if (!first_day_) return 1.0;
  const auto today = day_index(at);
  const auto complete = std::min<std::int64_t>(window_days_, today - *first_day_);
  double mean = 0.0;
  if (complete >= 1) {
    std::uint64_t total = 0;
    for (auto it = counts_.lower_bound(today - complete); it != counts_.end() && it->first < today;
         ++it) {
      total += it->second;
    }
    mean = static_cast<double>(total) / static_cast<double>(complete);
  } else if (auto it = counts_.find(today); it != counts_.end()) {
    mean = static_cast<double>(it->second);
  }
  return std::max(1.0, mean);
}

TrendTracker::TrendTracker(TrendConfig config)
    : config_(config), volume_(config.daily_window_days) {
  config_.validate();
}

ObservationResult TrendTracker::add_observation(const Observation& obs) {
  if (!(obs.label >= 0.0 && obs.label <= 1.0)) {
    throw ValidationError("trend", "observation label outside [0, 1]");
  }
  std::lock_guard lock(mutex_);
  auto index = nearest_group(groups_, obs.vector, config_.delta);
  if (index && obs.at < groups_[*index].last_update) {
    throw ValidationError("trend", "observation is older than group " +
                                       groups_[*index].group_id + "'s last update");
  }

  volume_.record(obs.at);
  const double daily = volume_.average(obs.at);

  ObservationResult result;
  if (!index) {
    TrendGroup g;
    g.group_id = group_name(next_group_++);
    g.representative_vector = obs.vector;
    g.representative_record_id = obs.record_id;
    g.representative_text = obs.text;
    g.last_update = obs.at;
    groups_.push_back(std::move(g));
    index = groups_.size() - 1;
    result.new_group = true;
  }

  TrendGroup& g = groups_[*index];
  g.score *= std::pow(config_.k_alert, days_between(g.last_update, obs.at));
  if (g.score < config_.t_alert) g.alert_armed = true;
  g.score += 100.0 / daily * obs.label;
  g.last_update = obs.at;
  ++g.member_count;

  if (g.alert_armed && g.score + kAlertSlack >= config_.t_alert) {
    g.alert_armed = false;
    result.alert = Alert{g.group_id, g.representative_record_id, g.score, obs.at};
  }
  result.group_id = g.group_id;
  result.score = g.score;
  return result;
}

std::vector<GroupSummary> TrendTracker::summaries(Timestamp now) const {
  std::lock_guard lock(mutex_);
  std::vector<GroupSummary> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) {
    const double idle = std::max(0.0, days_between(g.last_update, now));
    out.push_back({g.group_id, g.representative_record_id, g.representative_text,
                   g.score * std::pow(config_.k_alert, idle), g.member_count, g.last_update});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GroupSummary& a, const GroupSummary& b) { return a.score > b.score; });
  return out;
}

double TrendTracker::daily_average(Timestamp at) const {
  std::lock_guard lock(mutex_);
  return volume_.average(at);
}

std::size_t TrendTracker::group_count() const {
  std::lock_guard lock(mutex_);
  return groups_.size();
}

AlertLog::AlertLog(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        alerts_.push_back(alert_from_json(nlohmann::json::parse(line)));
      } catch (const std::exception& e) {
        throw ParseError("alerts", e.what(), n);
      }
    }
  }
  file_.reset(std::fopen(path.c_str(), "ab"));
  if (!file_) throw Error("alerts", "cannot open alert log " + path.string());
}

void AlertLog::append(const Alert& alert) {
  std::lock_guard lock(mutex_);
  if (file_) {
    const std::string line = to_json(alert).dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_.get()) != line.size() ||
        std::fflush(file_.get()) != 0) {
      throw Error("alerts", "failed to append to alert log");
    }
  }
  alerts_.push_back(alert);
}

std::vector<Alert> AlertLog::list() const {
  std::lock_guard lock(mutex_);
  std::vector<Alert> out(alerts_.rbegin(), alerts_.rend());
  std::stable_sort(out.begin(), out.end(),
                   [](const Alert& a, const Alert& b) { return a.timestamp > b.timestamp; });
  return out;
}

}  // namespace phishbowl
