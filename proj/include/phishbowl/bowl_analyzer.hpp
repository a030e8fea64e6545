#pragma once

#include <span>
#include <string>
#include <vector>

#include "phishbowl/embedding.hpp"
#include "phishbowl/phish_bowl.hpp"

namespace phishbowl {

struct BowlConfig {
  std::size_t k = 12;
  double epsilon = 1e-8;
  double lambda = 0.5;
  bool confidence_decay_enabled = true;

  void validate() const;
};

struct WeightedNeighbor {
  std::string id;
  double distance = 0.0;  // squared Euclidean
  Label label = Label::Phishing;
  double weight = 0.0;
};

/// Output of the nearest-neighbor analyzer. `l_raw` is left unscaled by the
/// confidence; the ensembler applies it.
struct BowlScore {
  double l_raw = 0.0;
  double l_conf = 1.0;
  double d0 = 0.0;  // squared distance to the nearest record
  std::vector<WeightedNeighbor> neighbors;
};

/// w_i = (1 / (d_i + eps)) / sum_j (1 / (d_j + eps)). An exact duplicate
/// (d = 0) takes essentially all of the weight.
std::vector<double> reciprocal_weights(std::span<const double> sq_distances, double epsilon);

/// Sum of label_i * w_i, clamped to [0, 1] against rounding.
double weighted_label(std::span<const double> weights, std::span<const Label> labels);

/// exp(-lambda * d0) with d0 the squared distance to the nearest record.
double distance_confidence(double d0, double lambda);

BowlScore score_vector(const PhishBowl& bowl, std::span<const double> query,
                       const BowlConfig& config);

/// Embeds `query_text` and scores it against the bowl. Throws ColdBowlError
/// on an empty bowl.
BowlScore score(const PhishBowl& bowl, std::string_view query_text,
                const EmbeddingClient& client, const BowlConfig& config);

struct SearchHit {
  BowlRecord record;
  double distance = 0.0;
};

/// Up to `n` records nearest to the embedded query. Empty on a cold bowl.
std::vector<SearchHit> search(const PhishBowl& bowl, std::string_view query_text,
                              std::size_t n, const EmbeddingClient& client);

}  // namespace phishbowl
