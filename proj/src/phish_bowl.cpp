#include "phishbowl/phish_bowl.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>

#include <unistd.h>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

std::string serial_id(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "r%06llu", static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace

std::string_view to_string(RecordSource s) {
  return s == RecordSource::Preloaded ? "preloaded" : "submitted";
}

nlohmann::json to_json(const BowlRecord& r, bool include_vector) {
  nlohmann::json j{{"id", r.id},
                   {"text", r.text},
                   {"label", static_cast<int>(r.label)},
                   {"source", std::string(to_string(r.source))},
                   {"created_at", to_millis(r.created_at)}};
  if (include_vector) j["vector"] = r.vector;
  return j;
}

BowlRecord record_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> BowlRecord {
    throw ValidationError("bowl", "invalid record: " + what);
  };
  if (!j.is_object()) return fail("not an object");
  for (const char* key : {"id", "text", "label", "source", "created_at", "vector"}) {
    if (!j.contains(key)) return fail(std::string("missing '") + key + "'");
  }
  BowlRecord r;
  if (!j["id"].is_string() || !j["text"].is_string()) return fail("id/text must be strings");
  r.id = j["id"].get<std::string>();
  r.text = j["text"].get<std::string>();
  if (!j["label"].is_number_integer()) return fail("label must be 0 or 1");
  const auto label = j["label"].get<long long>();
  if (label != 0 && label != 1) return fail("label must be 0 or 1");
  r.label = static_cast<Label>(label);
  const auto& source = j["source"];
  if (source == "preloaded") {
    r.source = RecordSource::Preloaded;
  } else if (source == "submitted") {
    r.source = RecordSource::Submitted;
  } else {
    return fail("source must be 'preloaded' or 'submitted'");
  }
  if (!j["created_at"].is_number_integer()) return fail("created_at must be integer milliseconds");
  r.created_at = from_millis(j["created_at"].get<std::int64_t>());
  if (!j["vector"].is_array()) return fail("vector must be an array");
  r.vector.reserve(j["vector"].size());
  for (const auto& x : j["vector"]) {
    if (!x.is_number()) return fail("vector entries must be numbers");
    r.vector.push_back(x.get<double>());
  }
  return r;
}

PhishBowl::PhishBowl(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw ValidationError("config", "bowl dimension must be positive");
}

PhishBowl::PhishBowl(std::size_t dimension, const std::filesystem::path& log_path)
    : PhishBowl(dimension) {
  if (log_path.has_parent_path()) {
    std::filesystem::create_directories(log_path.parent_path());
  }
  if (std::filesystem::exists(log_path)) replay(log_path);
  log_.reset(std::fopen(log_path.c_str(), "ab"));
  if (!log_) {
    throw Error("bowl", "cannot open bowl log " + log_path.string());
  }
}

void PhishBowl::replay(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("bowl", "cannot read bowl log " + path.string());
  std::string line;
  std::size_t line_number = 0;
  std::unordered_map<std::string, std::size_t> none;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      BowlRecord record = record_from_json(nlohmann::json::parse(line));
      if (record.id.empty()) throw ValidationError("bowl", "empty id");
      check(record, none);
      by_id_.emplace(record.id, records_.size());
      records_.push_back(std::move(record));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("bowl", e.what(), line_number);
    } catch (const Error& e) {
      throw ParseError("bowl", e.what(), line_number);
    }
  }
}

std::size_t PhishBowl::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

void PhishBowl::check(BowlRecord& record,
                      std::unordered_map<std::string, std::size_t>& pending_ids) {
  if (record.vector.size() != dimension_) {
    throw DimensionError(dimension_, record.vector.size());
  }
  if (record.label != Label::Benign && record.label != Label::Phishing) {
    throw ValidationError("bowl", "label must be 0 or 1");
  }
  if (record.id.empty()) {
    do {
      record.id = serial_id(next_serial_++);
    } while (by_id_.contains(record.id) || pending_ids.contains(record.id));
  } else if (by_id_.contains(record.id) || pending_ids.contains(record.id)) {
    throw ValidationError("bowl", "duplicate record id '" + record.id + "'");
  }
  pending_ids.emplace(record.id, 0);
}

void PhishBowl::append_lines(const std::vector<const BowlRecord*>& records) {
  if (!log_) return;
  for (const BowlRecord* r : records) {
    std::string line = to_json(*r).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    line += '\n';
    if (std::fwrite(line.data(), 1, line.size(), log_.get()) != line.size()) {
      throw Error("bowl", "short write to bowl log");
    }
  }
  if (std::fflush(log_.get()) != 0 || ::fsync(::fileno(log_.get())) != 0) {
    throw Error("bowl", "failed to flush bowl log");
  }
}

std::string PhishBowl::add_record(BowlRecord record) {
  std::vector<BowlRecord> batch;
  batch.push_back(std::move(record));
  return add_records(std::move(batch)).front();
}

std::vector<std::string> PhishBowl::add_records(std::vector<BowlRecord> records) {
  std::unique_lock lock(mutex_);
  std::unordered_map<std::string, std::size_t> pending;
  // Validate the whole batch before anything is written.
  const auto serial_before = next_serial_;
  try {
    for (auto& r : records) check(r, pending);
  } catch (...) {
    next_serial_ = serial_before;
    throw;
  }
  std::vector<const BowlRecord*> view;
  view.reserve(records.size());
  for (const auto& r : records) view.push_back(&r);
  append_lines(view);

  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (auto& r : records) {
    ids.push_back(r.id);
    by_id_.emplace(r.id, records_.size());
    records_.push_back(std::move(r));
  }
  return ids;
}

std::vector<Neighbor> PhishBowl::nearest(std::span<const double> query, std::size_t k) const {
  if (k == 0) throw ValidationError("bowl", "k must be at least 1");
  if (query.size() != dimension_) throw DimensionError(dimension_, query.size());
  std::shared_lock lock(mutex_);
  if (records_.empty()) throw ColdBowlError();

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    scored.emplace_back(squared_distance(query, records_[i].vector), i);
  }
  const std::size_t take = std::min(k, scored.size());
  // Pair ordering breaks distance ties by insertion index.
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end());

  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto& r = records_[scored[i].second];
    out.push_back({r.id, scored[i].first, r.label});
  }
  return out;
}

std::optional<BowlRecord> PhishBowl::find(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return records_[it->second];
}

std::vector<BowlRecord> PhishBowl::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

}  // namespace phishbowl
