#include "taldiag/matching.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace taldiag {

namespace {

// (score desc, prediction_id asc)
bool ranked_before(const Prediction& a, const Prediction& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.prediction_id < b.prediction_id;
}

// Greedy walk of one ranked candidate table: each prediction claims the
// unclaimed instance of maximal tIoU if it reaches alpha.
std::vector<PredictionMatch> greedy_match(
    const std::vector<std::vector<std::pair<std::int32_t, double>>>& candidates,
    std::span<const InstanceId> gt_ids, double alpha) {
  std::vector<PredictionMatch> out(candidates.size());
  std::vector<std::uint8_t> claimed(gt_ids.size(), 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    PredictionMatch& m = out[i];
    if (!candidates[i].empty()) m.best_tiou = candidates[i].front().second;
    for (const auto& [slot, overlap] : candidates[i]) {
      if (overlap < alpha) break;  // sorted by tiou desc
      if (claimed[static_cast<std::size_t>(slot)]) continue;
      claimed[static_cast<std::size_t>(slot)] = 1;
      m.is_tp = true;
      m.matched_instance = gt_ids[static_cast<std::size_t>(slot)];
      break;
    }
  }
  return out;
}

}  // namespace

std::vector<PredictionMatch> match_predictions(std::span<const GroundTruthInstance> instances,
                                               std::span<const Prediction> predictions,
                                               double alpha) {
  for (std::size_t i = 1; i < predictions.size(); ++i) {
    if (ranked_before(predictions[i], predictions[i - 1])) {
      throw std::invalid_argument(
          "match_predictions: predictions must be sorted by (score desc, id asc)");
    }
  }
  std::vector<InstanceId> gt_ids;
  gt_ids.reserve(instances.size());
  for (const auto& g : instances) gt_ids.push_back(g.instance_id);

  std::vector<std::vector<std::pair<std::int32_t, double>>> candidates(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (std::size_t j = 0; j < instances.size(); ++j) {
      if (instances[j].video_id != predictions[i].video_id) continue;
      const double overlap = tiou(instances[j].segment, predictions[i].segment);
      if (overlap > 0.0) candidates[i].emplace_back(static_cast<std::int32_t>(j), overlap);
    }
    std::sort(candidates[i].begin(), candidates[i].end(),
              [&instances](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return instances[a.first].instance_id < instances[b.first].instance_id;
              });
  }
  return greedy_match(candidates, gt_ids, alpha);
}

std::vector<ReferenceMatch> compute_references(const Dataset& dataset,
                                               std::span<const Prediction> predictions) {
  std::vector<ReferenceMatch> refs(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Prediction& p = predictions[i];
    auto vit = dataset.video_index.find(p.video_id);
    if (vit == dataset.video_index.end()) continue;
    ReferenceMatch& ref = refs[i];
    for (InstanceId id : vit->second) {
      const GroundTruthInstance* g = dataset.find_instance(id);
      const double overlap = tiou(g->segment, p.segment);
      if (overlap <= 0.0) continue;
      const bool same = g->label == p.label;
      // max tIoU; ties prefer the same label, then the lower instance id
      bool better = false;
      if (!ref.instance) {
        better = true;
      } else if (overlap != ref.tiou) {
        better = overlap > ref.tiou;
      } else if (same != ref.same_label) {
        better = same;
      } else {
        better = id < *ref.instance;
      }
      if (better) {
        ref.instance = id;
        ref.tiou = overlap;
        ref.same_label = same;
      }
    }
  }
  return refs;
}

EvaluationContext::EvaluationContext(const Dataset& dataset,
                                     std::span<const Prediction> predictions)
    : dataset_(&dataset), predictions_(predictions) {
  // Class slices for every label with ground truth, in label order.
  std::unordered_map<std::string, std::size_t> class_of;
  classes_.reserve(dataset.class_index.size());
  for (const auto& [label, ids] : dataset.class_index) {
    if (ids.empty()) continue;
    class_of.emplace(label, classes_.size());
    ClassSlice slice;
    slice.label = label;
    slice.gt = ids;
    classes_.push_back(std::move(slice));
  }

  std::vector<std::string> orphan_labels;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    auto it = class_of.find(predictions[i].label);
    if (it == class_of.end()) {
      orphan_labels.push_back(predictions[i].label);
      continue;
    }
    classes_[it->second].ranked.push_back(static_cast<std::int32_t>(i));
  }
  std::sort(orphan_labels.begin(), orphan_labels.end());
  orphan_labels.erase(std::unique(orphan_labels.begin(), orphan_labels.end()),
                      orphan_labels.end());
  gt_less_labels_ = std::move(orphan_labels);

  for (ClassSlice& slice : classes_) {
    std::sort(slice.ranked.begin(), slice.ranked.end(),
              [&predictions](std::int32_t a, std::int32_t b) {
                return ranked_before(predictions[a], predictions[b]);
              });
    // gt slots per video for the candidate scan
    std::unordered_map<std::string, std::vector<std::int32_t>> by_video;
    for (std::size_t slot = 0; slot < slice.gt.size(); ++slot) {
      by_video[dataset.find_instance(slice.gt[slot])->video_id].push_back(
          static_cast<std::int32_t>(slot));
    }
    slice.candidates.resize(slice.ranked.size());
    for (std::size_t r = 0; r < slice.ranked.size(); ++r) {
      const Prediction& p = predictions[static_cast<std::size_t>(slice.ranked[r])];
      auto vit = by_video.find(p.video_id);
      if (vit == by_video.end()) continue;
      auto& row = slice.candidates[r];
      for (std::int32_t slot : vit->second) {
        const GroundTruthInstance* g = dataset.find_instance(slice.gt[slot]);
        const double overlap = tiou(g->segment, p.segment);
        if (overlap > 0.0) row.emplace_back(slot, overlap);
      }
      std::sort(row.begin(), row.end(), [&slice](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return slice.gt[a.first] < slice.gt[b.first];
      });
    }
  }

  references_ = compute_references(dataset, predictions);
}

std::vector<PredictionMatch> EvaluationContext::match_class(std::size_t class_index,
                                                            double alpha) const {
  const ClassSlice& slice = classes_[class_index];
  return greedy_match(slice.candidates, slice.gt, alpha);
}

MatchLayer EvaluationContext::match_all(double alpha) const {
  MatchLayer layer;
  layer.is_tp.assign(predictions_.size(), 0);
  layer.matched.assign(predictions_.size(), -1);
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const ClassSlice& slice = classes_[c];
    const auto matches = match_class(c, alpha);
    for (std::size_t r = 0; r < matches.size(); ++r) {
      if (!matches[r].is_tp) continue;
      const auto p = static_cast<std::size_t>(slice.ranked[r]);
      layer.is_tp[p] = 1;
      layer.matched[p] = *matches[r].matched_instance;
    }
  }
  return layer;
}

}  // namespace taldiag
