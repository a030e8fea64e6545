#include "phishbowl/bowl_analyzer.hpp"

#include <algorithm>
#include <cmath>

#include "phishbowl/errors.hpp"

namespace phishbowl {

void BowlConfig::validate() const {
  if (k < 1) throw ValidationError("config", "k must be at least 1");
  if (!(epsilon > 0.0)) throw ValidationError("config", "epsilon must be positive");
  if (!(lambda >= 0.0)) throw ValidationError("config", "lambda must be non-negative");
}

std::vector<double> reciprocal_weights(std::span<const double> sq_distances, double epsilon) {
  std::vector<double> w(sq_distances.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(sq_distances[i] >= 0.0)) {
      throw ValidationError("bowl", "distances must be non-negative");
    }
    w[i] = 1.0 / (sq_distances[i] + epsilon);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

double weighted_label(std::span<const double> weights, std::span<const Label> labels) {
  if (weights.size() != labels.size()) {
    throw ValidationError("bowl", "weights and labels differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    sum += static_cast<int>(labels[i]) * weights[i];
  }
  return std::clamp(sum, 0.0, 1.0);
}

double distance_confidence(double d0, double lambda) { return std::exp(-lambda * d0); }

BowlScore score_vector(const PhishBowl& bowl, std::span<const double> query,
                       const BowlConfig& config) {
  config.validate();
  const auto nearest = bowl.nearest(query, config.k);

  std::vector<double> distances;
  std::vector<Label> labels;
  for (const auto& n : nearest) {
    distances.push_back(n.distance);
    labels.push_back(n.label);
  }
  const auto weights = reciprocal_weights(distances, config.epsilon);

  BowlScore out;
  out.l_raw = weighted_label(weights, labels);
  out.d0 = distances.front();
  out.l_conf = config.confidence_decay_enabled ? distance_confidence(out.d0, config.lambda) : 1.0;
  for (std::size_t i = 0; i < nearest.size(); ++i) {
    out.neighbors.push_back({nearest[i].id, nearest[i].distance, nearest[i].label, weights[i]});
  }
  return out;
}

BowlScore score(const PhishBowl& bowl, std::string_view query_text,
                const EmbeddingClient& client, const BowlConfig& config) {
  if (bowl.size() == 0) throw ColdBowlError();
  return score_vector(bowl, client.embed(query_text), config);
}

std::vector<SearchHit> search(const PhishBowl& bowl, std::string_view query_text,
                              std::size_t n, const EmbeddingClient& client) {
  if (n == 0) throw ValidationError("search", "n must be at least 1");
  if (bowl.size() == 0) return {};
  std::vector<Neighbor> nearest;
  try {
    nearest = bowl.nearest(client.embed(query_text), n);
  } catch (const ColdBowlError&) {
    return {};
  }
  std::vector<SearchHit> hits;
  for (const auto& nb : nearest) {
    if (auto record = bowl.find(nb.id)) hits.push_back({std::move(*record), nb.distance});
  }
  return hits;
}

}  // namespace phishbowl
