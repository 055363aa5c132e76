#pragma once

#include <span>
#include <string>
#include <vector>

#include "taldiag/config.hpp"
#include "taldiag/dataset.hpp"
#include "taldiag/matching.hpp"

namespace taldiag {

/// Cumulative precision/recall rows of one class at one threshold, in
/// (score desc, prediction_id asc) order.
struct PRCurve {
  int total_instances = 0;          // G_j
  double normalization = 0.0;       // N
  std::vector<int> cumulative_tp;
  std::vector<int> cumulative_fp;
  std::vector<double> recall;
  std::vector<double> precision;
  std::vector<double> normalized_precision;  // R*N / (R*N + F)
};

PRCurve pr_curve(std::span<const PredictionMatch> ranked_matches, int total_instances,
                 double normalization);

/// Interpolated area under the curve: the precision envelope is made
/// monotone non-increasing from the right, then summed over the recall
/// steps (all-point interpolation). `use_normalized` applies the envelope
/// to the normalized precision instead.
double interpolated_ap(const PRCurve& curve, bool use_normalized);

struct EvalResult {
  std::vector<double> thresholds;
  std::vector<double> per_threshold_map;  // mAP at each threshold
  double average = 0.0;                   // mean over thresholds
  std::vector<std::string> class_labels;  // classes with ground truth, sorted
  std::vector<std::vector<double>> per_class_ap;  // [class][threshold]
  std::vector<std::string> skipped_classes;       // prediction-only labels
};

/// AP per (class, threshold) averaged into mAP per threshold and over the
/// threshold list. Classes without ground truth are excluded from the class
/// mean and reported in `skipped_classes`.
/// Throws std::invalid_argument when the dataset has no ground truth.
EvalResult average_map(const Dataset& dataset, std::span<const Prediction> predictions,
                       const EvaluationConfig& config, bool use_normalized);
EvalResult average_map(const EvaluationContext& context, const EvaluationConfig& config,
                       bool use_normalized);

/// Per class j, the k*G_j highest-scoring predictions (score ties broken by
/// prediction id). Classes absent from the ground truth contribute nothing.
/// Output keeps input file order.
std::vector<Prediction> truncate_top_k(std::span<const Prediction> predictions,
                                       const Dataset& dataset, int k);

}  // namespace taldiag
