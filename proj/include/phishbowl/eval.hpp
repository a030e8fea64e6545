#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phishbowl/email_model.hpp"
#include "phishbowl/embedding.hpp"
#include "phishbowl/ensemble.hpp"

namespace phishbowl {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Fractions in [0, 1]; a metric whose denominator is zero is empty.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
};

Metrics metrics(const ConfusionCounts& c);

/// "98.41%" (two decimals) or "undefined".
std::string format_percent(const std::optional<double>& fraction);

enum class Balance { Balanced, PhishOnly };
enum class AnalyzerKind { Bowl, Gpt, Ensemble };

std::string_view to_string(AnalyzerKind a);

/// Hermetic experiment: hashed embedder plus the heuristic verdict client.
struct ExperimentSpec {
  std::vector<LabeledEmail> corpus;
  std::size_t train_size = 2048;
  std::size_t test_size = 200;
  Balance balance = Balance::Balanced;
  /// Confidence decay; empty disables it.
  std::optional<double> lambda = 0.5;
  AnalyzerKind analyzer = AnalyzerKind::Bowl;
  std::uint64_t seed = 1;
  std::size_t k = 12;
  HashedEmbedderConfig embedder;
  EnsembleConfig ensemble;
  bool embed_label_phrase = false;
  /// Preload the bowl with the test split itself instead of a disjoint train
  /// split.
  bool memorize_test_split = false;
};

struct ExperimentResult {
  ConfusionCounts counts;
  Metrics metrics;
  std::size_t bowl_size = 0;
};

/// Splits the corpus (seeded, class-stratified, disjoint), preloads a fresh
/// in-memory bowl with the training split and classifies the test split.
/// Throws ValidationError when the corpus is too small for the split.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Tab-separated header and row mirroring the results tables.
std::string results_header();
std::string results_row(const ExperimentSpec& spec, const ExperimentResult& result);

struct SyntheticCorpusConfig {
  std::size_t phishing = 1200;
  std::size_t benign = 1200;
  std::size_t min_words = 12;
  std::size_t max_words = 30;
  /// Probability a word comes from the other class's vocabulary.
  double crossover = 0.2;
  /// Probability a word comes from the shared filler vocabulary.
  double filler = 0.3;
  std::uint64_t seed = 7;
};

/// Two class vocabularies with controlled overlap. Every email carries a
/// unique reference token, so no two texts coincide.
std::vector<LabeledEmail> synthetic_corpus(const SyntheticCorpusConfig& config = {});

}  // namespace phishbowl
