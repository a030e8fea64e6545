#pragma once

#include <string_view>

namespace phishbowl {

struct EnsembleConfig {
  double coefficient = 0.8;
  double exponent = 0.5;
  double decision_threshold = 0.5;

  void validate() const;
};

enum class EnsembleMode { Ensemble, GptOnly };

std::string_view to_string(EnsembleMode m);

struct Classification {
  double l_ensemble = 0.0;
  bool is_phishing = false;
  double l_raw = 0.0;
  double l_conf = 0.0;
  double l_gpt = 0.5;
  EnsembleMode mode = EnsembleMode::Ensemble;
};

/// coefficient * l_conf^exponent: how much the bowl analyzer is trusted.
double weight_policy(double l_conf, const EnsembleConfig& config = {});

/// l_raw * l_conf * f(l_conf) + l_gpt * (1 - f(l_conf)), thresholded.
/// Throws ValidationError when an input leaves [0, 1].
Classification combine(double l_raw, double l_conf, double l_gpt,
                       const EnsembleConfig& config = {});

/// Cold bowl: the verdict label alone (l_conf treated as 0).
Classification combine_gpt_only(double l_gpt, const EnsembleConfig& config = {});

}  // namespace phishbowl
