#include "taldiag/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace taldiag {

PRCurve pr_curve(std::span<const PredictionMatch> ranked_matches, int total_instances,
                 double normalization) {
  if (total_instances <= 0) {
    throw std::invalid_argument("pr_curve: class without ground truth has no curve");
  }
  PRCurve c;
  c.total_instances = total_instances;
  c.normalization = normalization;
  const std::size_t n = ranked_matches.size();
  c.cumulative_tp.reserve(n);
  c.cumulative_fp.reserve(n);
  c.recall.reserve(n);
  c.precision.reserve(n);
  c.normalized_precision.reserve(n);

  int tp = 0;
  int fp = 0;
  const double g = static_cast<double>(total_instances);
  for (const PredictionMatch& m : ranked_matches) {
    m.is_tp ? ++tp : ++fp;
    c.cumulative_tp.push_back(tp);
    c.cumulative_fp.push_back(fp);
    c.recall.push_back(static_cast<double>(tp) / g);
    c.precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    // R*N computed as (tp*N)/G keeps P_N identical to plain precision when
    // N equals G.
    const double rn = static_cast<double>(tp) * normalization / g;
    const double denom = rn + static_cast<double>(fp);
    c.normalized_precision.push_back(denom > 0.0 ? rn / denom : 0.0);
  }
  return c;
}

double interpolated_ap(const PRCurve& curve, bool use_normalized) {
  const auto& prec = use_normalized ? curve.normalized_precision : curve.precision;
  const std::size_t n = prec.size();
  if (n == 0) return 0.0;
  // Right-to-left envelope; every true positive advances recall by exactly
  // 1/G, so AP is the envelope sum at TP rows over G.
  double envelope = 0.0;
  double sum = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    envelope = std::max(envelope, prec[i]);
    const int step = curve.cumulative_tp[i] - (i > 0 ? curve.cumulative_tp[i - 1] : 0);
    if (step > 0) sum += envelope;
  }
  return sum / static_cast<double>(curve.total_instances);
}

EvalResult average_map(const EvaluationContext& context, const EvaluationConfig& config,
                       bool use_normalized) {
  validate_config(config);
  if (context.class_count() == 0) {
    throw std::invalid_argument("average_map: no classes with ground truth");
  }
  const double n_const = resolve_normalization_constant(config, context.dataset());

  EvalResult result;
  result.thresholds = config.tiou_thresholds;
  result.skipped_classes = context.labels_without_ground_truth();
  const std::size_t t_count = config.tiou_thresholds.size();
  const std::size_t c_count = context.class_count();
  result.class_labels.reserve(c_count);
  result.per_class_ap.assign(c_count, std::vector<double>(t_count, 0.0));
  for (std::size_t c = 0; c < c_count; ++c) {
    result.class_labels.push_back(context.class_slice(c).label);
    const int g_count = static_cast<int>(context.class_slice(c).gt.size());
    for (std::size_t t = 0; t < t_count; ++t) {
      const auto matches = context.match_class(c, config.tiou_thresholds[t]);
      const PRCurve curve = pr_curve(matches, g_count, n_const);
      result.per_class_ap[c][t] = interpolated_ap(curve, use_normalized);
    }
  }

  result.per_threshold_map.assign(t_count, 0.0);
  for (std::size_t t = 0; t < t_count; ++t) {
    double sum = 0.0;
    for (std::size_t c = 0; c < c_count; ++c) sum += result.per_class_ap[c][t];
    result.per_threshold_map[t] = sum / static_cast<double>(c_count);
  }
  double sum = 0.0;
  for (double v : result.per_threshold_map) sum += v;
  result.average = sum / static_cast<double>(t_count);
  return result;
}

EvalResult average_map(const Dataset& dataset, std::span<const Prediction> predictions,
                       const EvaluationConfig& config, bool use_normalized) {
  EvaluationContext context(dataset, predictions);
  return average_map(context, config, use_normalized);
}

std::vector<Prediction> truncate_top_k(std::span<const Prediction> predictions,
                                       const Dataset& dataset, int k) {
  if (k < 1) throw std::invalid_argument("truncate_top_k: k must be at least 1");

  std::unordered_map<std::string, std::vector<std::int32_t>> per_class;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (dataset.class_index.contains(predictions[i].label)) {
      per_class[predictions[i].label].push_back(static_cast<std::int32_t>(i));
    }
  }

  std::vector<std::int32_t> retained;
  for (auto& [label, indices] : per_class) {
    const std::size_t budget =
        static_cast<std::size_t>(k) * dataset.class_index.at(label).size();
    if (indices.size() > budget) {
      std::nth_element(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(budget),
                       indices.end(), [&predictions](std::int32_t a, std::int32_t b) {
                         if (predictions[a].score != predictions[b].score) {
                           return predictions[a].score > predictions[b].score;
                         }
                         return predictions[a].prediction_id < predictions[b].prediction_id;
                       });
      indices.resize(budget);
    }
    retained.insert(retained.end(), indices.begin(), indices.end());
  }
  std::sort(retained.begin(), retained.end());  // keep input file order

  std::vector<Prediction> out;
  out.reserve(retained.size());
  for (std::int32_t i : retained) out.push_back(predictions[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace taldiag
