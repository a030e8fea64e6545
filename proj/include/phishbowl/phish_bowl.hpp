#pragma once

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "phishbowl/email_model.hpp"
#include "phishbowl/embedding.hpp"
#include "phishbowl/time.hpp"

namespace phishbowl {

enum class RecordSource { Preloaded, Submitted };

std::string_view to_string(RecordSource s);

/// One stored email: the exact text that was embedded, its label and vector.
struct BowlRecord {
  std::string id;  // assigned by the store when empty
  std::string text;
  Label label = Label::Phishing;
  RecordSource source = RecordSource::Submitted;
  Vector vector;
  Timestamp created_at{};
};

nlohmann::json to_json(const BowlRecord& r, bool include_vector = true);
BowlRecord record_from_json(const nlohmann::json& j);

struct Neighbor {
  std::string id;
  double distance = 0.0;  // squared Euclidean
  Label label = Label::Phishing;
};

/// The phish bowl: an append-only record log with an exact in-memory index.
///
/// Every record is one JSON object per line. Opening a bowl with a log path
/// replays the whole file; later writes append and flush before they become
/// visible. Readers share a lock, writers are serialized.
class PhishBowl {
 public:
  /// Memory-only bowl.
  explicit PhishBowl(std::size_t dimension);
  /// Durable bowl backed by `log_path` (created if missing).
  PhishBowl(std::size_t dimension, const std::filesystem::path& log_path);

  PhishBowl(const PhishBowl&) = delete;
  PhishBowl& operator=(const PhishBowl&) = delete;

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const;

  /// Throws DimensionError or ValidationError (duplicate id, bad label).
  std::string add_record(BowlRecord record);
  /// Appends a batch under a single lock and a single flush.
  std::vector<std::string> add_records(std::vector<BowlRecord> records);

  /// Exact k nearest by squared Euclidean distance, ascending, ties by
  /// insertion order. Throws ColdBowlError when empty.
  std::vector<Neighbor> nearest(std::span<const double> query, std::size_t k) const;

  std::optional<BowlRecord> find(std::string_view id) const;
  /// Copies of the records, insertion order.
  std::vector<BowlRecord> records() const;

 private:
  void replay(const std::filesystem::path& path);
  void check(BowlRecord& record, std::unordered_map<std::string, std::size_t>& pending_ids);
  void append_lines(const std::vector<const BowlRecord*>& records);

  std::size_t dimension_;
  mutable std::shared_mutex mutex_;
  std::vector<BowlRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::uint64_t next_serial_ = 1;
  struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
  };
  std::unique_ptr<std::FILE, FileCloser> log_;
};

}  // namespace phishbowl
