#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "taldiag/config.hpp"
#include "taldiag/dataset.hpp"
#include "taldiag/matching.hpp"

namespace taldiag {

enum class ErrorCategory : std::uint8_t {
  TruePositive,
  DoubleDetection,  // duplicate of an instance already claimed by a higher score
  WrongLabel,       // overlap above the threshold, label mismatch
  Localization,     // right label, overlap between the floor and the threshold
  Confusion,        // wrong label, overlap between the floor and the threshold
  Background,       // below the minimum overlap with every instance
};

inline constexpr std::size_t kCategoryCount = 6;
inline constexpr std::array<ErrorCategory, 5> kFPCategories = {
    ErrorCategory::DoubleDetection, ErrorCategory::WrongLabel, ErrorCategory::Localization,
    ErrorCategory::Confusion, ErrorCategory::Background,
};

std::string_view short_code(ErrorCategory c);  // "TP", "DD", "WL", "LOC", "CON", "BG"
std::string_view long_name(ErrorCategory c);   // "true_positive", ...
std::optional<ErrorCategory> category_from_code(std::string_view code);

struct ErrorVerdict {
  ErrorCategory category = ErrorCategory::Background;
  double threshold = 0.0;
  std::optional<InstanceId> reference_instance;
  double reference_tiou = 0.0;
};

/// Classifies one bound prediction at one threshold, given the match layer
/// produced at that threshold. True positives keep their verdict; every
/// false positive lands in exactly one of the five error categories.
ErrorVerdict classify_prediction(const EvaluationContext& context, const MatchLayer& layer,
                                 std::size_t prediction_index, double alpha,
                                 double min_overlap_floor);

/// Verdicts of every prediction at every configured threshold.
struct VerdictTable {
  std::vector<double> thresholds;
  std::vector<std::vector<ErrorCategory>> categories;  // [threshold][prediction]
};

VerdictTable classify_all(const EvaluationContext& context, const EvaluationConfig& config);

/// Category breakdown of the top-kG predictions over ten score-ranked splits.
struct FPProfile {
  int top_k_factor = 0;
  int retained_predictions = 0;
  std::vector<double> thresholds;
  struct Split {
    int size = 0;
    std::vector<std::array<double, kCategoryCount>> per_threshold;  // fractions
    std::array<double, kCategoryCount> mean{};                      // across thresholds
  };
  std::vector<Split> splits;  // ten, sizes differing by at most one
};

FPProfile build_fp_profile(const Dataset& dataset, std::span<const Prediction> predictions,
                           const EvaluationConfig& config);

/// Average-mAP_N gained by removing, per threshold, all predictions bearing
/// one error category.
struct ErrorImpact {
  std::vector<double> thresholds;
  double baseline = 0.0;  // average-mAP_N of the unmodified predictions
  std::vector<double> baseline_per_threshold;
  struct Entry {
    ErrorCategory category = ErrorCategory::Background;
    double after_removal = 0.0;
    double delta = 0.0;  // after_removal - baseline, never negative
    std::vector<double> per_threshold_after;
  };
  std::array<Entry, 5> categories;  // kFPCategories order
};

ErrorImpact error_impact(const Dataset& dataset, std::span<const Prediction> predictions,
                         const EvaluationConfig& config);

}  // namespace taldiag
