#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "taldiag/dataset.hpp"
#include "taldiag/diagnosis.hpp"
#include "taldiag/types.hpp"

namespace taldiag {

/// Synthetic detector benchmark: ground truth with known characteristics and
/// predictions planted so that each one satisfies exactly one error-category
/// rule against all ground truth in its video at the planting threshold.
struct SyntheticSpec {
  std::uint64_t seed = 17;
  int num_classes = 10;
  int num_videos = 120;
  /// P(instance count = i+1) for a video, i in [0, size).
  std::vector<double> instances_per_video_weights = {0.50, 0.20, 0.10, 0.08,
                                                     0.05, 0.03, 0.02, 0.02};
  int num_predictions = 1000;
  /// Proportions in kCategoryOrder: TP, DD, WL, LOC, CON, BG. Must sum to 1.
  std::array<double, kCategoryCount> mixture = {0.50, 0.10, 0.10, 0.20, 0.05, 0.05};
  double planting_alpha = 0.5;
  struct ScoreRange {
    double lo = 0.01;
    double hi = 0.99;
  };
  /// Category-conditional score ranges (uniform draws), kCategoryOrder.
  std::array<ScoreRange, kCategoryCount> score_ranges{};
  /// Buckets whose instances receive no true-positive detection.
  std::vector<std::pair<Characteristic, std::string>> degrade;
  std::string subset = "validation";
};

struct SyntheticOutput {
  Dataset dataset;  // profiles fully populated
  std::vector<Prediction> predictions;
  std::vector<ErrorCategory> planted;  // indexed by prediction_id
  nlohmann::ordered_json ground_truth_json;
  nlohmann::ordered_json predictions_json;
  nlohmann::ordered_json characteristics_json;
};

/// Deterministic in the seed: equal specs produce byte-identical files.
/// Throws std::invalid_argument for infeasible specs (mixture not summing
/// to 1, wrong-label errors with a single class, more true positives than
/// instances, ...).
SyntheticOutput generate_synthetic(const SyntheticSpec& spec);

/// Writes ground_truth.json, predictions.json, characteristics.json and the
/// planted_verdicts.csv sidecar (prediction_id, planted_category).
void write_synthetic_files(const SyntheticOutput& output, const std::filesystem::path& dir);

}  // namespace taldiag
