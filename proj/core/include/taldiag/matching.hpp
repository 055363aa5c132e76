#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taldiag/dataset.hpp"
#include "taldiag/types.hpp"

namespace taldiag {

/// Outcome of one prediction at one tIoU threshold.
struct PredictionMatch {
  bool is_tp = false;
  std::optional<InstanceId> matched_instance;
  /// Max tIoU against same-class, same-video ground truth (0 when none).
  double best_tiou = 0.0;
};

/// The reference ground truth of a prediction: the same-video instance of
/// maximal tIoU over all labels. Ties prefer the same label, then the lower
/// instance id. Threshold independent.
struct ReferenceMatch {
  std::optional<InstanceId> instance;
  double tiou = 0.0;
  bool same_label = false;
};

/// Greedy score-ordered matching of one class at one threshold: each
/// prediction claims the unclaimed same-video instance of maximal tIoU if
/// that tIoU reaches `alpha`. Predictions and instances must share a single
/// label; predictions must be sorted by (score desc, prediction_id asc).
std::vector<PredictionMatch> match_predictions(std::span<const GroundTruthInstance> instances,
                                               std::span<const Prediction> predictions,
                                               double alpha);

/// Reference instance of every prediction against the full ground truth.
/// Indexed like `predictions`.
std::vector<ReferenceMatch> compute_references(const Dataset& dataset,
                                               std::span<const Prediction> predictions);

/// Per-class prepared view used by the evaluation loops.
struct ClassSlice {
  std::string label;
  std::vector<InstanceId> gt;          // instance ids of this class
  std::vector<std::int32_t> ranked;    // indices into the bound predictions,
                                       // sorted by (score desc, id asc)
  // Per ranked prediction: (slot into gt, tiou) sorted by (tiou desc,
  // instance_id asc), entries with tiou > 0 only.
  std::vector<std::vector<std::pair<std::int32_t, double>>> candidates;
};

/// TP flags and claimed instances for every bound prediction at one
/// threshold. Entries follow the prediction span order.
struct MatchLayer {
  std::vector<std::uint8_t> is_tp;
  std::vector<InstanceId> matched;  // -1 when unmatched
};

/// Immutable binding of a dataset and a prediction list with the per-class
/// indexes the metric and diagnosis passes need. Safe for concurrent reads.
class EvaluationContext {
 public:
  EvaluationContext(const Dataset& dataset, std::span<const Prediction> predictions);

  const Dataset& dataset() const { return *dataset_; }
  std::span<const Prediction> predictions() const { return predictions_; }

  /// Classes with ground truth, sorted by label.
  std::size_t class_count() const { return classes_.size(); }
  const ClassSlice& class_slice(std::size_t i) const { return classes_[i]; }

  /// Labels that appear only in predictions (no ground truth); sorted.
  const std::vector<std::string>& labels_without_ground_truth() const {
    return gt_less_labels_;
  }

  const ReferenceMatch& reference(std::size_t prediction_index) const {
    return references_[prediction_index];
  }
  const std::vector<ReferenceMatch>& references() const { return references_; }

  /// Match one class slice at one threshold (ranked order).
  std::vector<PredictionMatch> match_class(std::size_t class_index, double alpha) const;

  /// Match every class at one threshold, scattered back to prediction order.
  MatchLayer match_all(double alpha) const;

 private:
  const Dataset* dataset_;
  std::span<const Prediction> predictions_;
  std::vector<ClassSlice> classes_;
  std::vector<std::string> gt_less_labels_;
  std::vector<ReferenceMatch> references_;
};

}  // namespace taldiag
