#include "phishbowl/platform.hpp"

#include "phishbowl/corpus.hpp"
#include "phishbowl/errors.hpp"
#include "phishbowl/remote_clients.hpp"

namespace phishbowl {

namespace {

using json = nlohmann::json;

// Re-labels failures with the pipeline stage they happened in, keeping the
// error kind.
template <class F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw;
  } catch (const ValidationError& e) {
    if (e.stage() == stage) throw;
    throw ValidationError(stage, e.what());
  } catch (const TransportError& e) {
    if (e.stage() == stage) throw;
    throw TransportError(stage, e.what());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(stage, e.what());
  }
}

json optional_string(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

json to_json(const ExtractedEmail& e) {
  return {{"sender", optional_string(e.sender)},
          {"subject", optional_string(e.subject)},
          {"body", e.body},
          {"header_until", e.header_until},
          {"body_from", e.body_from}};
}

json to_json(const BowlScore& s) {
  json neighbors = json::array();
  for (const auto& n : s.neighbors) {
    neighbors.push_back({{"id", n.id},
                         {"distance", n.distance},
                         {"label", static_cast<int>(n.label)},
                         {"weight", n.weight}});
  }
  return {{"l_raw", s.l_raw}, {"l_conf", s.l_conf}, {"d0", s.d0}, {"neighbors", neighbors}};
}

}  // namespace

ClassifyRequest parse_classify_request(const json& j) {
  if (!j.is_object()) throw ValidationError("request", "request must be a JSON object");
  const bool has_ocr = j.contains("ocr_table");
  const bool has_text = j.contains("body") || j.contains("sender") || j.contains("subject");
  if (has_ocr && has_text) {
    throw ValidationError("request", "send either email fields or ocr_table, not both");
  }
  if (!has_ocr && !has_text) {
    throw ValidationError("request", "request needs email fields or ocr_table");
  }
  ClassifyRequest req;
  if (has_ocr) {
    if (j.size() != 1 || !j["ocr_table"].is_string()) {
      throw ValidationError("request", "ocr_table must be the only field and a string");
    }
    req.ocr_table = j["ocr_table"].get<std::string>();
  } else {
    if (j.contains("label")) throw ValidationError("request", "classify requests carry no label");
    req.email = email_from_json(j, "request");
  }
  return req;
}

json to_json(const ClassifyResponse& r) {
  const auto& c = r.classification;
  json out{{"classification",
            {{"l_ensemble", c.l_ensemble},
             {"is_phishing", c.is_phishing},
             {"verdict", c.is_phishing ? "phishing" : "benign"},
             {"l_raw", c.l_raw},
             {"l_conf", c.l_conf},
             {"l_gpt", c.l_gpt},
             {"mode", std::string(to_string(c.mode))}}},
           {"anonymized",
            {{"sender", optional_string(r.anonymized.sender)},
             {"subject", optional_string(r.anonymized.subject)},
             {"body", r.anonymized.body}}},
           {"text", r.text},
           {"bowl", r.bowl ? to_json(*r.bowl) : json(nullptr)},
           {"verdict", to_json(r.verdict)},
           {"trend_group", r.trend_group},
           {"alert", r.alert ? to_json(*r.alert) : json(nullptr)}};
  if (r.extracted) out["extracted"] = to_json(*r.extracted);
  return out;
}

json to_json(const SubmitResponse& r) {
  return {{"id", r.id},
          {"trend_group", r.trend_group},
          {"alert", r.alert ? to_json(*r.alert) : json(nullptr)}};
}

json to_json(const GroupSummary& g) {
  return {{"group_id", g.group_id},
          {"representative_record_id",
           g.representative_record_id.empty() ? json(nullptr) : json(g.representative_record_id)},
          {"representative_text", g.representative_text},
          {"score", g.score},
          {"member_count", g.member_count},
          {"last_update", to_millis(g.last_update)}};
}

json to_json(const SearchHit& h) {
  auto j = to_json(h.record, false);
  j["distance"] = h.distance;
  return j;
}

Platform::Platform(PlatformConfig config, std::unique_ptr<ChatClient> anonymizer_client,
                   std::unique_ptr<ChatClient> verdict_client,
                   std::unique_ptr<EmbeddingClient> embedder, Clock clock)
    : config_(std::move(config)),
      anonymizer_client_(std::move(anonymizer_client)),
      verdict_client_(std::move(verdict_client)),
      embedder_(std::move(embedder)),
      clock_(std::move(clock)),
      trends_(config_.trend) {
  config_.validate();
  if (!anonymizer_client_ || !verdict_client_ || !embedder_) {
    throw ValidationError("config", "platform needs chat and embedding clients");
  }
  if (embedder_->dimension() != config_.embedding_dimension()) {
    throw DimensionError(config_.embedding_dimension(), embedder_->dimension());
  }
  bowl_ = config_.bowl_path.empty()
              ? std::make_unique<PhishBowl>(embedder_->dimension())
              : std::make_unique<PhishBowl>(embedder_->dimension(), config_.bowl_path);
  alert_log_ = config_.alert_log_path.empty() ? std::make_unique<AlertLog>()
                                              : std::make_unique<AlertLog>(config_.alert_log_path);
}

std::unique_ptr<Platform> Platform::from_config(PlatformConfig config, Clock clock) {
  config.validate();
  std::unique_ptr<ChatClient> anon;
  std::unique_ptr<ChatClient> verdict;
  if (config.chat == ChatKind::Remote) {
    anon = std::make_unique<RemoteChatClient>(config.chat_endpoint);
    verdict = std::make_unique<RemoteChatClient>(config.chat_endpoint);
  } else {
    anon = std::make_unique<MaskingChatClient>();
    verdict = std::make_unique<HeuristicVerdictClient>();
  }
  std::unique_ptr<EmbeddingClient> embedder;
  if (config.embedder == EmbedderKind::Remote) {
    embedder = std::make_unique<RemoteEmbeddingClient>(config.embedding_endpoint,
                                                       config.remote_dimension);
  } else {
    embedder = std::make_unique<HashedEmbedder>(config.hashed);
  }
  return std::make_unique<Platform>(std::move(config), std::move(anon), std::move(verdict),
                                    std::move(embedder), std::move(clock));
}

std::string Platform::record_text(const EmailContent& content, Label label) const {
  LabeledEmail labeled{content, std::nullopt};
  if (config_.embed_label_phrase) labeled.label = label;
  return email_to_text(labeled, config_.converter);
}

Vector Platform::embed(const std::string& text) const {
  return in_stage("embed", [&] {
    auto v = embedder_->embed(text);
    if (v.size() != bowl_->dimension()) throw DimensionError(bowl_->dimension(), v.size());
    return v;
  });
}

std::optional<Alert> Platform::observe(Vector vector, double label, std::string record_id,
                                       std::string text, std::string& group_out) {
  return in_stage("trend", [&]() -> std::optional<Alert> {
    auto result = trends_.add_observation(
        {std::move(vector), label, clock_(), std::move(record_id), std::move(text)});
    group_out = result.group_id;
    if (result.alert) alert_log_->append(*result.alert);
    return result.alert;
  });
}

ClassifyResponse Platform::classify(const ClassifyRequest& request) {
  if (request.email.has_value() == request.ocr_table.has_value()) {
    throw ValidationError("request", "exactly one of email fields or ocr_table is required");
  }
  ClassifyResponse out;

  EmailContent content;
  if (request.ocr_table) {
    out.extracted = in_stage("ocr", [&] {
      return extract_email(parse_word_table(*request.ocr_table), config_.ocr);
    });
    content = {out.extracted->sender, out.extracted->subject, out.extracted->body};
  } else {
    content = *request.email;
  }
  in_stage("request", [&] { content.validate(); });

  out.anonymized = in_stage("anonymize", [&] {
    return anonymize(content, *anonymizer_client_, config_.max_attempts);
  });
  const EmailContent masked = out.anonymized.to_content();
  out.text = in_stage("convert", [&] { return email_to_text({masked, std::nullopt}, config_.converter); });
  const std::string verdict_text = in_stage(
      "convert", [&] { return email_to_text({masked, std::nullopt}, config_.verdict_converter); });

  Vector vector = embed(out.text);
  if (bowl_->size() > 0) {
    try {
      out.bowl = in_stage("bowl", [&] { return score_vector(*bowl_, vector, config_.bowl); });
    } catch (const ColdBowlError&) {
      out.bowl.reset();
    }
  }

  out.verdict = in_stage("classify", [&] {
    return request_verdict(verdict_text, *verdict_client_, config_.max_attempts);
  });
  const double l_gpt = verdict_to_label(out.verdict);

  out.classification = in_stage("ensemble", [&] {
    return out.bowl ? combine(out.bowl->l_raw, out.bowl->l_conf, l_gpt, config_.ensemble)
                    : combine_gpt_only(l_gpt, config_.ensemble);
  });

  out.alert = observe(std::move(vector), out.classification.l_ensemble, "", out.text,
                      out.trend_group);
  return out;
}

SubmitResponse Platform::submit(const EmailContent& email) {
  in_stage("request", [&] { email.validate(); });
  const auto anonymized = in_stage("anonymize", [&] {
    return anonymize(email, *anonymizer_client_, config_.max_attempts);
  });
  const std::string text =
      in_stage("convert", [&] { return record_text(anonymized.to_content(), Label::Phishing); });
  Vector vector = embed(text);

  BowlRecord record;
  record.text = text;
  record.label = Label::Phishing;
  record.source = RecordSource::Submitted;
  record.vector = vector;
  record.created_at = clock_();

  SubmitResponse out;
  out.id = in_stage("bowl", [&] { return bowl_->add_record(std::move(record)); });
  out.alert = observe(std::move(vector), 1.0, out.id, text, out.trend_group);
  return out;
}

std::vector<SearchHit> Platform::search(std::string_view query, std::size_t n) const {
  if (n < 1 || n > 100) throw ValidationError("search", "n must lie in [1, 100]");
  return in_stage("search", [&] { return phishbowl::search(*bowl_, query, n, *embedder_); });
}

std::vector<GroupSummary> Platform::trends() const { return trends_.summaries(clock_()); }

std::vector<Alert> Platform::alerts() const { return alert_log_->list(); }

std::optional<BowlRecord> Platform::email(std::string_view id) const { return bowl_->find(id); }

std::size_t Platform::preload(const std::vector<LabeledEmail>& emails) {
  std::vector<BowlRecord> batch;
  batch.reserve(emails.size());
  const auto now = clock_();
  for (const auto& e : emails) {
    if (!e.label) throw ValidationError("preload", "preloaded emails must be labeled");
    BowlRecord r;
    r.text = in_stage("convert", [&] { return record_text(e.content, *e.label); });
    r.vector = embed(r.text);
    r.label = *e.label;
    r.source = RecordSource::Preloaded;
    r.created_at = now;
    batch.push_back(std::move(r));
  }
  return in_stage("bowl", [&] { return bowl_->add_records(std::move(batch)).size(); });
}

std::size_t Platform::preload_corpus(const std::filesystem::path& corpus) {
  return preload(load_corpus(corpus));
}

}  // namespace phishbowl
