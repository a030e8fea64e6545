#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishbowl/anonymizer.hpp"
#include "phishbowl/bowl_analyzer.hpp"
#include "phishbowl/config.hpp"
#include "phishbowl/ensemble.hpp"
#include "phishbowl/ocr_extract.hpp"
#include "phishbowl/phish_bowl.hpp"
#include "phishbowl/trends.hpp"
#include "phishbowl/verdict.hpp"

namespace phishbowl {

/// Exactly one of `email` or `ocr_table` is set.
struct ClassifyRequest {
  std::optional<EmailContent> email;
  std::optional<std::string> ocr_table;
};

/// Accepts {sender?, subject?, body} or {ocr_table}. Mixing both forms, or
/// neither, is a ValidationError("request").
ClassifyRequest parse_classify_request(const nlohmann::json& j);

struct ClassifyResponse {
  Classification classification;
  std::optional<ExtractedEmail> extracted;
  AnonymizedEmail anonymized;
  std::string text;  // converted, anonymized text that was embedded
  std::optional<BowlScore> bowl;  // empty on a cold bowl
  Verdict verdict;
  std::string trend_group;
  std::optional<Alert> alert;
};

nlohmann::json to_json(const ClassifyResponse& r);

struct SubmitResponse {
  std::string id;
  std::string trend_group;
  std::optional<Alert> alert;
};

nlohmann::json to_json(const SubmitResponse& r);
nlohmann::json to_json(const GroupSummary& g);
nlohmann::json to_json(const SearchHit& h);

/// The detection pipeline and phish bowl behind the HTTP service and CLI.
///
/// classify: [OCR extraction] -> anonymize -> convert -> bowl score ->
/// verdict -> ensemble -> trend observation. Classified mail is never added
/// to the bowl; only submissions and preloads are. Everything persisted or
/// returned is anonymizer output.
class Platform {
 public:
  Platform(PlatformConfig config, std::unique_ptr<ChatClient> anonymizer_client,
           std::unique_ptr<ChatClient> verdict_client,
           std::unique_ptr<EmbeddingClient> embedder, Clock clock = system_now);

  /// Builds the clients named in the config (mock/hashed or remote).
  static std::unique_ptr<Platform> from_config(PlatformConfig config, Clock clock = system_now);

  ClassifyResponse classify(const ClassifyRequest& request);
  SubmitResponse submit(const EmailContent& email);
  std::vector<SearchHit> search(std::string_view query, std::size_t n) const;
  std::vector<GroupSummary> trends() const;
  std::vector<Alert> alerts() const;
  std::optional<BowlRecord> email(std::string_view id) const;

  /// Bulk ingestion of labeled, already-public mail. Skips the anonymizer.
  std::size_t preload(const std::vector<LabeledEmail>& emails);
  std::size_t preload_corpus(const std::filesystem::path& corpus);

  const PhishBowl& bowl() const noexcept { return *bowl_; }
  const PlatformConfig& config() const noexcept { return config_; }

 private:
  std::string record_text(const EmailContent& content, Label label) const;
  Vector embed(const std::string& text) const;
  std::optional<Alert> observe(Vector vector, double label, std::string record_id,
                               std::string text, std::string& group_out);

  PlatformConfig config_;
  std::unique_ptr<ChatClient> anonymizer_client_;
  std::unique_ptr<ChatClient> verdict_client_;
  std::unique_ptr<EmbeddingClient> embedder_;
  Clock clock_;
  std::unique_ptr<PhishBowl> bowl_;
  TrendTracker trends_;
  std::unique_ptr<AlertLog> alert_log_;
};

}  // namespace phishbowl
