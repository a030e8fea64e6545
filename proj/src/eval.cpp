#include "phishbowl/eval.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>

#include "phishbowl/bowl_analyzer.hpp"
#include "phishbowl/errors.hpp"
#include "phishbowl/phish_bowl.hpp"
#include "phishbowl/verdict.hpp"

namespace phishbowl {

namespace {

constexpr std::array<std::string_view, 40> kPhishWords{
    "account",  "verify",   "password", "urgent",    "suspended", "click",    "link",
    "prize",    "winner",   "claim",    "security",  "alert",     "confirm",  "login",
    "immediately", "locked", "refund",  "invoice",   "payment",   "wallet",   "bitcoin",
    "lottery",  "reward",   "gift",     "card",      "bank",      "update",   "unusual",
    "activity", "expire",   "deadline", "credentials", "reset",   "limited",  "offer",
    "congratulations", "selected", "transfer", "inheritance", "download"};

constexpr std::array<std::string_view, 40> kBenignWords{
    "meeting",  "agenda",   "lunch",    "report",   "project",  "schedule", "minutes",
    "quarterly", "review",  "draft",    "slides",   "budget",   "roadmap",  "standup",
    "notes",    "calendar", "office",   "holiday",  "feedback", "release",  "sprint",
    "design",   "document", "summary",  "workshop", "training", "coffee",   "weekend",
    "birthday", "presentation", "proposal", "milestone", "retrospective", "onboarding",
    "newsletter", "reminder", "conference", "deliverable", "timeline", "analysis"};

constexpr std::array<std::string_view, 30> kFillerWords{
    "the", "please", "team", "today", "email", "thanks", "regards", "and", "for", "with",
    "your", "our", "this", "that", "will", "have", "from", "about", "next", "week",
    "information", "details", "attached", "hello", "best", "time", "need", "also", "new", "see"};

std::string join_words(const std::vector<std::string_view>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

struct Split {
  std::vector<const LabeledEmail*> train;
  std::vector<const LabeledEmail*> test;
};

Split split_corpus(const ExperimentSpec& spec) {
  std::vector<const LabeledEmail*> phish;
  std::vector<const LabeledEmail*> benign;
  for (const auto& e : spec.corpus) {
    if (!e.label) throw ValidationError("eval", "corpus emails must be labeled");
    (*e.label == Label::Phishing ? phish : benign).push_back(&e);
  }
  std::mt19937_64 rng(spec.seed);
  std::shuffle(phish.begin(), phish.end(), rng);
  std::shuffle(benign.begin(), benign.end(), rng);

  const std::size_t test_phish = (spec.test_size + 1) / 2;
  const std::size_t test_benign = spec.test_size / 2;
  if (phish.size() < test_phish || benign.size() < test_benign) {
    throw ValidationError("eval", "corpus too small for the test split");
  }
  Split s;
  s.test.insert(s.test.end(), phish.begin(), phish.begin() + test_phish);
  s.test.insert(s.test.end(), benign.begin(), benign.begin() + test_benign);
  if (spec.memorize_test_split) {
    s.train = s.test;
    return s;
  }

  std::size_t train_phish = spec.train_size;
  std::size_t train_benign = 0;
  if (spec.balance == Balance::Balanced) {
    train_phish = (spec.train_size + 1) / 2;
    train_benign = spec.train_size / 2;
  }
  if (phish.size() < test_phish + train_phish || benign.size() < test_benign + train_benign) {
    throw ValidationError("eval", "corpus too small for the training split");
  }
  s.train.insert(s.train.end(), phish.begin() + test_phish,
                 phish.begin() + test_phish + train_phish);
  s.train.insert(s.train.end(), benign.begin() + test_benign,
                 benign.begin() + test_benign + train_benign);
  return s;
}

}  // namespace

Metrics metrics(const ConfusionCounts& c) {
  auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  return {ratio(c.tp + c.tn, c.total()), ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn)};
}

std::string format_percent(const std::optional<double>& fraction) {
  if (!fraction) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *fraction * 100.0);
  return buf;
}

std::string_view to_string(AnalyzerKind a) {
  switch (a) {
    case AnalyzerKind::Bowl: return "bowl";
    case AnalyzerKind::Gpt: return "gpt";
    case AnalyzerKind::Ensemble: return "ensemble";
  }
  return "bowl";
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.test_size == 0) throw ValidationError("eval", "test_size must be positive");
  if (spec.lambda && !(*spec.lambda >= 0.0)) throw ValidationError("eval", "lambda must be >= 0");
  spec.ensemble.validate();
  const Split split = split_corpus(spec);

  const HashedEmbedder embedder(spec.embedder);
  const ConverterConfig converter{Truncation::NoTruncation, 8191, 0.2815};
  PhishBowl bowl(embedder.dimension());
  std::vector<BowlRecord> batch;
  batch.reserve(split.train.size());
  for (const auto* e : split.train) {
    BowlRecord r;
    LabeledEmail as_stored{e->content, std::nullopt};
    if (spec.embed_label_phrase) as_stored.label = e->label;
    r.text = email_to_text(as_stored, converter);
    r.vector = embedder.embed(r.text);
    r.label = *e->label;
    r.source = RecordSource::Preloaded;
    batch.push_back(std::move(r));
  }
  bowl.add_records(std::move(batch));

  BowlConfig bowl_config;
  bowl_config.k = spec.k;
  bowl_config.lambda = spec.lambda.value_or(0.0);
  bowl_config.confidence_decay_enabled = spec.lambda.has_value();

  ExperimentResult result;
  result.bowl_size = bowl.size();
  for (const auto* e : split.test) {
    const std::string text = email_to_text({e->content, std::nullopt}, converter);
    double l_raw = 0.0;
    double l_conf = 0.0;
    const bool cold = bowl.size() == 0;
    if (!cold && spec.analyzer != AnalyzerKind::Gpt) {
      const auto s = score(bowl, text, embedder, bowl_config);
      l_raw = s.l_raw;
      l_conf = s.l_conf;
    }
    double l_gpt = 0.5;
    if (spec.analyzer != AnalyzerKind::Bowl) {
      l_gpt = verdict_to_label(HeuristicVerdictClient::judge(text));
    }

    bool predicted = false;
    switch (spec.analyzer) {
      case AnalyzerKind::Bowl:
        predicted = l_raw * l_conf >= spec.ensemble.decision_threshold;
        break;
      case AnalyzerKind::Gpt:
        predicted = l_gpt >= spec.ensemble.decision_threshold;
        break;
      case AnalyzerKind::Ensemble:
        predicted = (cold ? combine_gpt_only(l_gpt, spec.ensemble)
                          : combine(l_raw, l_conf, l_gpt, spec.ensemble))
                        .is_phishing;
        break;
    }
    const bool actual = *e->label == Label::Phishing;
    if (predicted && actual) ++result.counts.tp;
    if (predicted && !actual) ++result.counts.fp;
    if (!predicted && !actual) ++result.counts.tn;
    if (!predicted && actual) ++result.counts.fn;
  }
  result.metrics = metrics(result.counts);
  return result;
}

std::string results_header() {
  return "Training Samples\tConfidence Decay\tAnalyzer\tTP\tFP\tTN\tFN\tAccuracy\tPrecision\tRecall";
}

std::string results_row(const ExperimentSpec& spec, const ExperimentResult& r) {
  std::string decay = "-";
  if (spec.lambda) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", *spec.lambda);
    decay = buf;
  }
  std::string samples = std::to_string(r.bowl_size);
  if (spec.balance == Balance::PhishOnly && !spec.memorize_test_split) samples += "*";
  return samples + "\t" + decay + "\t" + std::string(to_string(spec.analyzer)) + "\t" +
         std::to_string(r.counts.tp) + "\t" + std::to_string(r.counts.fp) + "\t" +
         std::to_string(r.counts.tn) + "\t" + std::to_string(r.counts.fn) + "\t" +
         format_percent(r.metrics.accuracy) + "\t" + format_percent(r.metrics.precision) + "\t" +
         format_percent(r.metrics.recall);
}

std::vector<LabeledEmail> synthetic_corpus(const SyntheticCorpusConfig& config) {
  if (config.min_words == 0 || config.max_words < config.min_words) {
    throw ValidationError("eval", "synthetic corpus needs 0 < min_words <= max_words");
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> length(config.min_words, config.max_words);
  auto pick = [&](const auto& vocab) {
    std::uniform_int_distribution<std::size_t> idx(0, vocab.size() - 1);
    return vocab[idx(rng)];
  };

  std::vector<LabeledEmail> out;
  out.reserve(config.phishing + config.benign);
  std::uint64_t serial = 0;
  auto make = [&](Label label) {
    const bool phish = label == Label::Phishing;
    std::vector<std::string_view> words;
    const std::size_t n = length(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = unit(rng);
      if (u < config.filler) {
        words.push_back(pick(kFillerWords));
      } else if (u < config.filler + config.crossover) {
        words.push_back(phish ? pick(kBenignWords) : pick(kPhishWords));
      } else {
        words.push_back(phish ? pick(kPhishWords) : pick(kBenignWords));
      }
    }
    char ref[32];
    std::snprintf(ref, sizeof ref, "ref%08llx", static_cast<unsigned long long>(++serial));
    LabeledEmail e;
    e.content.body = join_words(words) + " " + ref;
    e.label = label;
    out.push_back(std::move(e));
  };
  // Interleave classes so a prefix of the corpus stays roughly balanced.
  for (std::size_t i = 0; i < std::max(config.phishing, config.benign); ++i) {
    if (i < config.phishing) make(Label::Phishing);
    if (i < config.benign) make(Label::Benign);
  }
  return out;
}

}  // namespace phishbowl
