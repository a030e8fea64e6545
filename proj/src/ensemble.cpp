#include "phishbowl/ensemble.hpp"

#include <cmath>
#include <string>

#include "phishbowl/errors.hpp"

namespace phishbowl {

namespace {

void require_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError("ensemble", std::string(name) + " = " + std::to_string(x) +
                                          " outside [0, 1]");
  }
}

}  // namespace

void EnsembleConfig::validate() const {
  if (!(coefficient >= 0.0 && coefficient <= 1.0)) {
    throw ValidationError("config", "ensemble coefficient must lie in [0, 1]");
  }
  if (!(exponent > 0.0)) throw ValidationError("config", "ensemble exponent must be positive");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw ValidationError("config", "decision threshold must lie in (0, 1)");
  }
}

std::string_view to_string(EnsembleMode m) {
  return m == EnsembleMode::Ensemble ? "ensemble" : "gpt_only";
}

double weight_policy(double l_conf, const EnsembleConfig& config) {
  return config.coefficient * std::pow(l_conf, config.exponent);
}

Classification combine(double l_raw, double l_conf, double l_gpt, const EnsembleConfig& config) {
  config.validate();
  require_unit(l_raw, "l_raw");
  require_unit(l_conf, "l_conf");
  require_unit(l_gpt, "l_gpt");
  const double f = weight_policy(l_conf, config);
  Classification c;
  c.l_raw = l_raw;
  c.l_conf = l_conf;
  c.l_gpt = l_gpt;
  c.l_ensemble = l_raw * l_conf * f + l_gpt * (1.0 - f);
  c.is_phishing = c.l_ensemble >= config.decision_threshold;
  return c;
}

Classification combine_gpt_only(double l_gpt, const EnsembleConfig& config) {
  Classification c = combine(0.0, 0.0, l_gpt, config);
  c.mode = EnsembleMode::GptOnly;
  return c;
}

}  // namespace phishbowl
