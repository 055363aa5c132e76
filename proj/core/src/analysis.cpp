#include "taldiag/analysis.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "taldiag/metrics.hpp"

namespace taldiag {

namespace {

// Shared core: `refs` are the caller's references against the FULL dataset.
std::optional<double> subset_eval_core(const Dataset& dataset,
                                       std::span<const Prediction> predictions,
                                       const std::vector<ReferenceMatch>& refs,
                                       const EvaluationConfig& config,
                                       const std::unordered_set<InstanceId>& keep) {
  if (keep.empty()) return std::nullopt;

  EvaluationConfig frozen = config;
  frozen.normalization_constant = resolve_normalization_constant(config, dataset);

  std::vector<InstanceId> kept_ids(keep.begin(), keep.end());
  const Dataset sub = restrict_to(dataset, kept_ids);
  if (sub.instances.empty()) return std::nullopt;

  // Predictions answering ground truth outside the subset are neither TP
  // nor FP; background-only predictions stay in.
  std::vector<Prediction> kept_preds;
  kept_preds.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const ReferenceMatch& ref = refs[i];
    if (ref.instance && ref.tiou >= config.min_overlap_floor && !keep.contains(*ref.instance)) {
      continue;
    }
    kept_preds.push_back(predictions[i]);
  }
  return average_map(sub, kept_preds, frozen, /*use_normalized=*/true).average;
}

std::unordered_set<InstanceId> bucket_members(const Dataset& dataset, Characteristic c,
                                              std::string_view bucket) {
  std::unordered_set<InstanceId> keep;
  for (const auto& g : dataset.instances) {
    const CharacteristicProfile* p = dataset.profile(g.instance_id);
    if (p == nullptr) continue;
    const auto label = p->bucket_label(c);
    if (label && *label == bucket) keep.insert(g.instance_id);
  }
  return keep;
}

}  // namespace

std::optional<double> subset_evaluation(const Dataset& dataset,
                                        std::span<const Prediction> predictions,
                                        const EvaluationConfig& config,
                                        const std::unordered_set<InstanceId>& keep) {
  validate_config(config);
  const auto refs = compute_references(dataset, predictions);
  return subset_eval_core(dataset, predictions, refs, config, keep);
}

std::optional<double> subset_evaluation(const Dataset& dataset,
                                        std::span<const Prediction> predictions,
                                        const EvaluationConfig& config,
                                        Characteristic characteristic, std::string_view bucket) {
  return subset_evaluation(dataset, predictions, config,
                           bucket_members(dataset, characteristic, bucket));
}

SensitivityProfile sensitivity_profile(const Dataset& dataset,
                                       std::span<const Prediction> predictions,
                                       const EvaluationConfig& config) {
  validate_config(config);
  SensitivityProfile profile;
  profile.overall = average_map(dataset, predictions, config, /*use_normalized=*/true).average;
  const auto refs = compute_references(dataset, predictions);

  for (Characteristic c : kAllCharacteristics) {
    if (!dataset.has_characteristic(c)) {
      profile.notices.push_back(std::string(to_string(c)) +
                                ": no instance carries this characteristic; omitted");
      continue;
    }
    SensitivityProfile::Entry entry;
    entry.characteristic = c;
    bool any = false;
    double lo = 0.0;
    double hi = 0.0;
    for (const std::string& label : bucket_labels(c)) {
      SensitivityProfile::Bucket bucket;
      bucket.label = label;
      const auto members = bucket_members(dataset, c, label);
      bucket.instance_count = static_cast<int>(members.size());
      bucket.average_map_n = subset_eval_core(dataset, predictions, refs, config, members);
      if (bucket.average_map_n) {
        if (!any) {
          lo = hi = *bucket.average_map_n;
          any = true;
        } else {
          lo = std::min(lo, *bucket.average_map_n);
          hi = std::max(hi, *bucket.average_map_n);
        }
      }
      entry.buckets.push_back(std::move(bucket));
    }
    if (!any) {
      profile.notices.push_back(std::string(to_string(c)) + ": all buckets empty; omitted");
      continue;
    }
    entry.sensitivity = hi - lo;
    entry.impact = hi - profile.overall;
    profile.entries.push_back(std::move(entry));
  }
  return profile;
}

std::vector<std::pair<Characteristic, Characteristic>> default_fn_pairs() {
  return {
      {Characteristic::Coverage, Characteristic::ContextSize},
      {Characteristic::Agreement, Characteristic::ContextSize},
      {Characteristic::Coverage, Characteristic::Agreement},
  };
}

FNReport false_negatives(const Dataset& dataset, std::span<const Prediction> predictions,
                         const EvaluationConfig& config,
                         const std::vector<std::pair<Characteristic, Characteristic>>& pairs) {
  validate_config(config);
  const double n_const = resolve_normalization_constant(config, dataset);
  EvaluationContext context(dataset, predictions);

  const std::size_t t_count = config.tiou_thresholds.size();
  // missed[t] indexed by position in dataset.instances
  std::vector<std::vector<std::uint8_t>> missed(
      t_count, std::vector<std::uint8_t>(dataset.instances.size(), 1));
  std::unordered_map<InstanceId, std::size_t> position;
  position.reserve(dataset.instances.size());
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    position.emplace(dataset.instances[i].instance_id, i);
  }

  for (std::size_t c = 0; c < context.class_count(); ++c) {
    const int g_count = static_cast<int>(context.class_slice(c).gt.size());
    for (std::size_t t = 0; t < t_count; ++t) {
      const auto matches = context.match_class(c, config.tiou_thresholds[t]);
      if (matches.empty()) continue;
      const PRCurve curve = pr_curve(matches, g_count, n_const);
      // The detection prefix ends at the last rank still reaching the
      // normalized-precision cutoff (most generous when P_N oscillates).
      std::ptrdiff_t cutoff = -1;
      for (std::size_t r = 0; r < curve.normalized_precision.size(); ++r) {
        if (curve.normalized_precision[r] >= kMissPrecisionCutoff) {
          cutoff = static_cast<std::ptrdiff_t>(r);
        }
      }
      for (std::ptrdiff_t r = 0; r <= cutoff; ++r) {
        const PredictionMatch& m = matches[static_cast<std::size_t>(r)];
        if (m.is_tp) missed[t][position.at(*m.matched_instance)] = 0;
      }
    }
  }

  FNReport report;
  report.thresholds = config.tiou_thresholds;

  for (Characteristic c : kAllCharacteristics) {
    if (!dataset.has_characteristic(c)) {
      report.notices.push_back(std::string(to_string(c)) +
                               ": no instance carries this characteristic; omitted");
      continue;
    }
    FNReport::Entry entry;
    entry.characteristic = c;
    for (const std::string& label : bucket_labels(c)) {
      FNReport::Bucket bucket;
      bucket.label = label;
      bucket.missed_per_threshold.assign(t_count, 0);
      bucket.rate_per_threshold.assign(t_count, 0.0);
      for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
        const CharacteristicProfile* p = dataset.profile(dataset.instances[i].instance_id);
        if (p == nullptr) continue;
        const auto member = p->bucket_label(c);
        if (!member || *member != label) continue;
        ++bucket.instance_count;
        for (std::size_t t = 0; t < t_count; ++t) {
          bucket.missed_per_threshold[t] += missed[t][i];
        }
      }
      if (bucket.instance_count > 0) {
        double sum = 0.0;
        for (std::size_t t = 0; t < t_count; ++t) {
          bucket.rate_per_threshold[t] =
              static_cast<double>(bucket.missed_per_threshold[t]) /
              static_cast<double>(bucket.instance_count);
          sum += bucket.rate_per_threshold[t];
        }
        bucket.mean_rate = sum / static_cast<double>(t_count);
      }
      entry.buckets.push_back(std::move(bucket));
    }
    report.entries.push_back(std::move(entry));
  }

  for (const auto& [rows, cols] : pairs) {
    if (!dataset.has_characteristic(rows) || !dataset.has_characteristic(cols)) continue;
    FNReport::Pairwise grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.row_labels = bucket_labels(rows);
    grid.col_labels = bucket_labels(cols);
    std::vector<std::vector<long>> miss_count(
        grid.row_labels.size(), std::vector<long>(grid.col_labels.size(), 0));
    std::vector<std::vector<int>> population(
        grid.row_labels.size(), std::vector<int>(grid.col_labels.size(), 0));
    for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
      const CharacteristicProfile* p = dataset.profile(dataset.instances[i].instance_id);
      if (p == nullptr) continue;
      const auto r_label = p->bucket_label(rows);
      const auto c_label = p->bucket_label(cols);
      if (!r_label || !c_label) continue;
      const auto r = static_cast<std::size_t>(
          std::find(grid.row_labels.begin(), grid.row_labels.end(), *r_label) -
          grid.row_labels.begin());
      const auto cc = static_cast<std::size_t>(
          std::find(grid.col_labels.begin(), grid.col_labels.end(), *c_label) -
          grid.col_labels.begin());
      ++population[r][cc];
      for (std::size_t t = 0; t < t_count; ++t) miss_count[r][cc] += missed[t][i];
    }
    grid.cells.assign(grid.row_labels.size(),
                      std::vector<FNReport::PairwiseCell>(grid.col_labels.size()));
    for (std::size_t r = 0; r < grid.row_labels.size(); ++r) {
      for (std::size_t cc = 0; cc < grid.col_labels.size(); ++cc) {
        grid.cells[r][cc].instance_count = population[r][cc];
        if (population[r][cc] > 0) {
          // missed / (population * thresholds): exact 0 and 1 at the ends
          grid.cells[r][cc].mean_rate =
              static_cast<double>(miss_count[r][cc]) /
              (static_cast<double>(population[r][cc]) * static_cast<double>(t_count));
        }
      }
    }
    report.pairwise.push_back(std::move(grid));
  }
  return report;
}

FNReport average_fn_reports(const std::vector<FNReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("average_fn_reports: nothing to average");
  FNReport out = reports.front();
  for (const FNReport& r : reports) {
    if (r.entries.size() != out.entries.size() || r.pairwise.size() != out.pairwise.size()) {
      throw std::invalid_argument(
          "average_fn_reports: reports disagree on the analyzed characteristics");
    }
  }
  const double k = static_cast<double>(reports.size());
  for (std::size_t e = 0; e < out.entries.size(); ++e) {
    for (std::size_t b = 0; b < out.entries[e].buckets.size(); ++b) {
      auto& bucket = out.entries[e].buckets[b];
      bucket.missed_per_threshold.clear();  // counts are per method, not averaged
      double mean = 0.0;
      for (const FNReport& r : reports) mean += r.entries[e].buckets[b].mean_rate;
      bucket.mean_rate = mean / k;
      for (std::size_t t = 0; t < bucket.rate_per_threshold.size(); ++t) {
        double sum = 0.0;
        for (const FNReport& r : reports) sum += r.entries[e].buckets[b].rate_per_threshold[t];
        bucket.rate_per_threshold[t] = sum / k;
      }
    }
  }
  for (std::size_t g = 0; g < out.pairwise.size(); ++g) {
    for (std::size_t r = 0; r < out.pairwise[g].cells.size(); ++r) {
      for (std::size_t c = 0; c < out.pairwise[g].cells[r].size(); ++c) {
        auto& cell = out.pairwise[g].cells[r][c];
        if (!cell.mean_rate) continue;
        double sum = 0.0;
        for (const FNReport& rep : reports) sum += *rep.pairwise[g].cells[r][c].mean_rate;
        cell.mean_rate = sum / k;
      }
    }
  }
  return out;
}

}  // namespace taldiag
