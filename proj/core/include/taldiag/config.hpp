#pragma once

#include <optional>
#include <vector>

namespace taldiag {

struct Dataset;

struct EvaluationConfig {
  /// tIoU thresholds, strictly increasing, each in (0,1].
  std::vector<double> tiou_thresholds;
  /// Normalization constant N of the normalized precision. Defaults to the
  /// mean ground-truth instance count over classes with at least one
  /// instance, resolved once on the full evaluated dataset.
  std::optional<double> normalization_constant;
  /// k of the top-kG truncation.
  int top_k_factor = 10;
  /// Minimum overlap separating localization/confusion errors from
  /// background errors.
  double min_overlap_floor = 0.1;

  EvaluationConfig();
};

/// 0.50, 0.55, ..., 0.95.
std::vector<double> default_tiou_thresholds();

/// Throws std::invalid_argument if the config violates its invariants.
void validate_config(const EvaluationConfig& config);

/// The configured N, or the dataset default when unset.
double resolve_normalization_constant(const EvaluationConfig& config, const Dataset& dataset);

}  // namespace taldiag
