#include "taldiag/config.hpp"

#include <stdexcept>

#include "taldiag/dataset.hpp"

namespace taldiag {

EvaluationConfig::EvaluationConfig() : tiou_thresholds(default_tiou_thresholds()) {}

std::vector<double> default_tiou_thresholds() {
  std::vector<double> out;
  out.reserve(10);
  for (int i = 0; i < 10; ++i) out.push_back((50 + 5 * i) / 100.0);
  return out;
}

void validate_config(const EvaluationConfig& config) {
  if (config.tiou_thresholds.empty()) {
    throw std::invalid_argument("config: tiou_thresholds must be non-empty");
  }
  double prev = 0.0;
  for (double t : config.tiou_thresholds) {
    if (t <= prev || t > 1.0) {
      throw std::invalid_argument(
          "config: tiou_thresholds must be strictly increasing within (0,1]");
    }
    prev = t;
  }
  if (config.normalization_constant && *config.normalization_constant <= 0.0) {
    throw std::invalid_argument("config: normalization_constant must be positive");
  }
  if (config.top_k_factor < 1) {
    throw std::invalid_argument("config: top_k_factor must be at least 1");
  }
  if (config.min_overlap_floor < 0.0 || config.min_overlap_floor >= 1.0) {
    throw std::invalid_argument("config: min_overlap_floor must lie in [0,1)");
  }
}

double resolve_normalization_constant(const EvaluationConfig& config, const Dataset& dataset) {
  if (config.normalization_constant) return *config.normalization_constant;
  std::size_t classes = 0;
  std::size_t total = 0;
  for (const auto& [label, ids] : dataset.class_index) {
    if (ids.empty()) continue;
    ++classes;
    total += ids.size();
  }
  if (classes == 0) {
    throw std::invalid_argument("dataset has no ground-truth instances to derive N from");
  }
  return static_cast<double>(total) / static_cast<double>(classes);
}

}  // namespace taldiag
