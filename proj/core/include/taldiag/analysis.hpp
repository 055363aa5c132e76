#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "taldiag/config.hpp"
#include "taldiag/dataset.hpp"
#include "taldiag/matching.hpp"

namespace taldiag {

/// Average-mAP_N restricted to the `keep` instances. Predictions whose
/// reference instance (max-tIoU ground truth over all labels, at or above
/// the minimum overlap floor) lies outside the subset are ignored entirely;
/// the normalization constant stays at its full-dataset value so subset
/// scores remain comparable to the overall metric. Returns nullopt for an
/// empty subset.
std::optional<double> subset_evaluation(const Dataset& dataset,
                                        std::span<const Prediction> predictions,
                                        const EvaluationConfig& config,
                                        const std::unordered_set<InstanceId>& keep);

/// Bucket form: the subset is every instance whose profile puts it in
/// `bucket` of `characteristic`.
std::optional<double> subset_evaluation(const Dataset& dataset,
                                        std::span<const Prediction> predictions,
                                        const EvaluationConfig& config,
                                        Characteristic characteristic, std::string_view bucket);

/// Per-bucket average-mAP_N for every characteristic, with the spread
/// (max - min bucket) and the impact (max - overall) summaries.
struct SensitivityProfile {
  double overall = 0.0;  // average-mAP_N on the full set
  struct Bucket {
    std::string label;
    int instance_count = 0;
    std::optional<double> average_map_n;  // absent for empty buckets
  };
  struct Entry {
    Characteristic characteristic = Characteristic::Coverage;
    std::vector<Bucket> buckets;
    double sensitivity = 0.0;
    double impact = 0.0;
  };
  std::vector<Entry> entries;
  std::vector<std::string> notices;  // characteristics without data
};

SensitivityProfile sensitivity_profile(const Dataset& dataset,
                                       std::span<const Prediction> predictions,
                                       const EvaluationConfig& config);

/// Normalized-precision level below which ranked predictions stop counting
/// toward detection when deciding misses.
inline constexpr double kMissPrecisionCutoff = 0.05;

/// Miss-detection rates per characteristic bucket and bucket pair.
struct FNReport {
  std::vector<double> thresholds;
  struct Bucket {
    std::string label;
    int instance_count = 0;
    std::vector<int> missed_per_threshold;
    std::vector<double> rate_per_threshold;
    double mean_rate = 0.0;  // across thresholds
  };
  struct Entry {
    Characteristic characteristic = Characteristic::Coverage;
    std::vector<Bucket> buckets;
  };
  std::vector<Entry> entries;

  struct PairwiseCell {
    int instance_count = 0;
    std::optional<double> mean_rate;  // absent for empty cells
  };
  struct Pairwise {
    Characteristic rows = Characteristic::Coverage;
    Characteristic cols = Characteristic::ContextSize;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<PairwiseCell>> cells;  // [row][col]
  };
  std::vector<Pairwise> pairwise;
  std::vector<std::string> notices;
};

/// The pairs shown by default: coverage x context size, agreement x context
/// size, coverage x agreement.
std::vector<std::pair<Characteristic, Characteristic>> default_fn_pairs();

/// A ground-truth instance is missed at a threshold when no true positive
/// within the class's ranked prefix of normalized precision >= 0.05 matches
/// it; the prefix ends at the last rank still meeting the cutoff. Classes
/// that never reach the cutoff miss all their instances.
FNReport false_negatives(const Dataset& dataset, std::span<const Prediction> predictions,
                         const EvaluationConfig& config,
                         const std::vector<std::pair<Characteristic, Characteristic>>& pairs =
                             default_fn_pairs());

/// Element-wise mean of several FN reports (same dataset and config), the
/// across-method average view.
FNReport average_fn_reports(const std::vector<FNReport>& reports);

}  // namespace taldiag
