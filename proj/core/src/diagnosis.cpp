#include "taldiag/diagnosis.hpp"

#include <algorithm>
#include <stdexcept>

#include "taldiag/metrics.hpp"

namespace taldiag {

std::string_view short_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::TruePositive: return "TP";
    case ErrorCategory::DoubleDetection: return "DD";
    case ErrorCategory::WrongLabel: return "WL";
    case ErrorCategory::Localization: return "LOC";
    case ErrorCategory::Confusion: return "CON";
    case ErrorCategory::Background: return "BG";
  }
  return "?";
}

std::string_view long_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::TruePositive: return "true_positive";
    case ErrorCategory::DoubleDetection: return "double_detection";
    case ErrorCategory::WrongLabel: return "wrong_label";
    case ErrorCategory::Localization: return "localization";
    case ErrorCategory::Confusion: return "confusion";
    case ErrorCategory::Background: return "background";
  }
  return "?";
}

std::optional<ErrorCategory> category_from_code(std::string_view code) {
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    const auto c = static_cast<ErrorCategory>(i);
    if (code == short_code(c) || code == long_name(c)) return c;
  }
  return std::nullopt;
}

namespace {

// The five FP rules, applied in order, are mutually exclusive and exhaustive
// for any overlap value once the prediction is known not to be a TP.
ErrorCategory categorize(const ReferenceMatch& ref, double alpha, double floor) {
  if (!ref.instance) return ErrorCategory::Background;
  if (ref.tiou >= alpha) {
    return ref.same_label ? ErrorCategory::DoubleDetection : ErrorCategory::WrongLabel;
  }
  if (ref.tiou >= floor) {
    return ref.same_label ? ErrorCategory::Localization : ErrorCategory::Confusion;
  }
  return ErrorCategory::Background;
}

}  // namespace

ErrorVerdict classify_prediction(const EvaluationContext& context, const MatchLayer& layer,
                                 std::size_t prediction_index, double alpha,
                                 double min_overlap_floor) {
  const ReferenceMatch& ref = context.reference(prediction_index);
  ErrorVerdict v;
  v.threshold = alpha;
  v.reference_instance = ref.instance;
  v.reference_tiou = ref.tiou;
  v.category = layer.is_tp[prediction_index]
                   ? ErrorCategory::TruePositive
                   : categorize(ref, alpha, min_overlap_floor);
  return v;
}

VerdictTable classify_all(const EvaluationContext& context, const EvaluationConfig& config) {
  validate_config(config);
  VerdictTable table;
  table.thresholds = config.tiou_thresholds;
  table.categories.reserve(config.tiou_thresholds.size());
  for (double alpha : config.tiou_thresholds) {
    const MatchLayer layer = context.match_all(alpha);
    std::vector<ErrorCategory> row(context.predictions().size());
    for (std::size_t p = 0; p < row.size(); ++p) {
      row[p] = layer.is_tp[p] ? ErrorCategory::TruePositive
                              : categorize(context.reference(p), alpha,
                                           config.min_overlap_floor);
    }
    table.categories.push_back(std::move(row));
  }
  return table;
}

FPProfile build_fp_profile(const Dataset& dataset, std::span<const Prediction> predictions,
                           const EvaluationConfig& config) {
  validate_config(config);
  const std::vector<Prediction> retained =
      truncate_top_k(predictions, dataset, config.top_k_factor);
  EvaluationContext context(dataset, retained);
  const VerdictTable verdicts = classify_all(context, config);

  // Global score ranking of the retained predictions, then ten contiguous
  // splits whose sizes differ by at most one.
  std::vector<std::int32_t> order(retained.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
  std::sort(order.begin(), order.end(), [&retained](std::int32_t a, std::int32_t b) {
    if (retained[a].score != retained[b].score) return retained[a].score > retained[b].score;
    return retained[a].prediction_id < retained[b].prediction_id;
  });

  FPProfile profile;
  profile.top_k_factor = config.top_k_factor;
  profile.retained_predictions = static_cast<int>(retained.size());
  profile.thresholds = config.tiou_thresholds;
  const std::size_t split_count = 10;
  const std::size_t base = retained.size() / split_count;
  const std::size_t remainder = retained.size() % split_count;
  const std::size_t t_count = config.tiou_thresholds.size();

  std::size_t cursor = 0;
  for (std::size_t s = 0; s < split_count; ++s) {
    FPProfile::Split split;
    const std::size_t size = base + (s < remainder ? 1 : 0);
    split.size = static_cast<int>(size);
    split.per_threshold.assign(t_count, {});
    for (std::size_t t = 0; t < t_count; ++t) {
      auto& fractions = split.per_threshold[t];
      for (std::size_t i = cursor; i < cursor + size; ++i) {
        const auto category =
            verdicts.categories[t][static_cast<std::size_t>(order[i])];
        fractions[static_cast<std::size_t>(category)] += 1.0;
      }
      if (size > 0) {
        for (double& f : fractions) f /= static_cast<double>(size);
      }
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        split.mean[c] += fractions[c] / static_cast<double>(t_count);
      }
    }
    profile.splits.push_back(std::move(split));
    cursor += size;
  }
  return profile;
}

ErrorImpact error_impact(const Dataset& dataset, std::span<const Prediction> predictions,
                         const EvaluationConfig& config) {
  validate_config(config);
  EvaluationConfig resolved = config;
  resolved.normalization_constant = resolve_normalization_constant(config, dataset);

  EvaluationContext context(dataset, predictions);
  const EvalResult baseline = average_map(context, resolved, /*use_normalized=*/true);
  const VerdictTable verdicts = classify_all(context, resolved);

  ErrorImpact impact;
  impact.thresholds = resolved.tiou_thresholds;
  impact.baseline = baseline.average;
  impact.baseline_per_threshold = baseline.per_threshold_map;

  const std::size_t t_count = resolved.tiou_thresholds.size();
  for (std::size_t k = 0; k < kFPCategories.size(); ++k) {
    const ErrorCategory category = kFPCategories[k];
    ErrorImpact::Entry& entry = impact.categories[k];
    entry.category = category;
    entry.per_threshold_after.assign(t_count, 0.0);
    for (std::size_t t = 0; t < t_count; ++t) {
      std::vector<Prediction> remaining;
      remaining.reserve(predictions.size());
      for (std::size_t p = 0; p < predictions.size(); ++p) {
        if (verdicts.categories[t][p] != category) remaining.push_back(predictions[p]);
      }
      EvaluationConfig single = resolved;
      single.tiou_thresholds = {resolved.tiou_thresholds[t]};
      entry.per_threshold_after[t] =
          average_map(dataset, remaining, single, /*use_normalized=*/true).average;
    }
    double sum = 0.0;
    for (double v : entry.per_threshold_after) sum += v;
    entry.after_removal = sum / static_cast<double>(t_count);
    entry.delta = entry.after_removal - impact.baseline;
  }
  return impact;
}

}  // namespace taldiag
