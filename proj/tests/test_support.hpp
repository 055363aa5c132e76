#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// re-derive expected values from first principles and must stay decoupled
// from the library's computation paths.

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "taldiag/config.hpp"
#include "taldiag/dataset.hpp"
#include "taldiag/matching.hpp"
#include "taldiag/metrics.hpp"
#include "taldiag/rng.hpp"
#include "taldiag/types.hpp"

namespace taldiag::test {

inline VideoRecord video(const std::string& id, double duration,
                         const std::string& subset = "validation") {
  return {id, duration, subset};
}

inline GroundTruthInstance gt(InstanceId id, const std::string& video_id,
                              const std::string& label, double start, double end) {
  return {id, video_id, label, {start, end}};
}

inline Prediction pred(PredictionId id, const std::string& video_id, const std::string& label,
                       double start, double end, double score) {
  return {id, video_id, label, {start, end}, score};
}

inline Dataset make_dataset(std::vector<VideoRecord> videos,
                            std::vector<GroundTruthInstance> instances) {
  DatasetBuildResult built = build_dataset(std::move(videos), std::move(instances));
  if (!built.ok()) {
    std::string message = "test dataset failed validation:";
    for (const auto& issue : built.errors) message += " " + issue.message + ";";
    throw std::runtime_error(message);
  }
  return std::move(built.dataset);
}

inline std::vector<Prediction> ranked(std::vector<Prediction> predictions) {
  std::sort(predictions.begin(), predictions.end(), [](const Prediction& a, const Prediction& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.prediction_id < b.prediction_id;
  });
  return predictions;
}

// ---------------------------------------------------------------------------
// Oracle 1: all-point interpolated AP by direct enumeration. For each recall
// level t/G the interpolated precision is the max precision over every curve
// point whose TP count has reached t. O(n^2), no envelope walk.
inline double ap_oracle(const std::vector<bool>& is_tp_ranked, int total_instances,
                        double normalization, bool use_normalized) {
  const std::size_t n = is_tp_ranked.size();
  std::vector<double> precision(n);
  std::vector<int> cumulative_tp(n);
  int tp = 0;
  int fp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    is_tp_ranked[i] ? ++tp : ++fp;
    cumulative_tp[i] = tp;
    if (use_normalized) {
      const double rn = static_cast<double>(tp) * normalization /
                        static_cast<double>(total_instances);
      precision[i] = rn + fp > 0.0 ? rn / (rn + static_cast<double>(fp)) : 0.0;
    } else {
      precision[i] = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
  }
  double ap = 0.0;
  for (int level = 1; level <= tp; ++level) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (cumulative_tp[i] >= level) best = std::max(best, precision[i]);
    }
    ap += best;
  }
  return ap / static_cast<double>(total_instances);
}

// ---------------------------------------------------------------------------
// Oracle 2: literal transcription of the matching rule, one class, one
// threshold: walk predictions by (score desc, id asc); claim the unclaimed
// same-video instance of max tIoU (ties: lower id) when it reaches alpha.
struct NaiveVerdict {
  bool is_tp = false;
  InstanceId matched = -1;
};

inline std::vector<NaiveVerdict> naive_match(const std::vector<GroundTruthInstance>& instances,
                                             const std::vector<Prediction>& ranked_predictions,
                                             double alpha) {
  std::vector<NaiveVerdict> verdicts(ranked_predictions.size());
  std::vector<bool> claimed(instances.size(), false);
  for (std::size_t p = 0; p < ranked_predictions.size(); ++p) {
    std::ptrdiff_t best = -1;
    double best_tiou = 0.0;
    for (std::size_t g = 0; g < instances.size(); ++g) {
      if (claimed[g] || instances[g].video_id != ranked_predictions[p].video_id) continue;
      const double overlap = tiou(instances[g].segment, ranked_predictions[p].segment);
      const bool better =
          overlap > best_tiou ||
          (overlap == best_tiou && best >= 0 &&
           instances[g].instance_id < instances[static_cast<std::size_t>(best)].instance_id);
      if (overlap > 0.0 && (best < 0 || better)) {
        best = static_cast<std::ptrdiff_t>(g);
        best_tiou = overlap;
      }
    }
    if (best >= 0 && best_tiou >= alpha) {
      claimed[static_cast<std::size_t>(best)] = true;
      verdicts[p].is_tp = true;
      verdicts[p].matched = instances[static_cast<std::size_t>(best)].instance_id;
    }
  }
  return verdicts;
}

// ---------------------------------------------------------------------------
// Random small evaluation scenes for the property tests.
struct RandomScene {
  Dataset dataset;
  std::vector<Prediction> predictions;
};

inline RandomScene random_scene(std::mt19937_64& rng, int max_videos = 5, int max_gt = 8,
                                int max_predictions = 20, int num_labels = 3) {
  RandomScene scene;
  const int video_count = 1 + static_cast<int>(uniform_index(rng, max_videos));
  std::vector<VideoRecord> videos;
  std::vector<std::string> video_ids;
  for (int v = 0; v < video_count; ++v) {
    const std::string id = "v" + std::to_string(v);
    videos.push_back(video(id, 100.0));
    video_ids.push_back(id);
  }
  std::vector<std::string> labels;
  for (int l = 0; l < num_labels; ++l) labels.push_back("label" + std::to_string(l));

  auto random_segment = [&rng]() {
    const double start = uniform(rng, 0.0, 90.0);
    const double length = uniform(rng, 1.0, 100.0 - start);
    return TemporalSegment{start, start + length};
  };

  std::vector<GroundTruthInstance> instances;
  const int gt_count = 1 + static_cast<int>(uniform_index(rng, max_gt));
  for (int g = 0; g < gt_count; ++g) {
    const auto seg = random_segment();
    instances.push_back({g, video_ids[uniform_index(rng, video_ids.size())],
                         labels[uniform_index(rng, labels.size())], seg});
  }
  scene.dataset = make_dataset(std::move(videos), std::move(instances));

  const int pred_count = static_cast<int>(uniform_index(rng, max_predictions + 1));
  for (int p = 0; p < pred_count; ++p) {
    const auto seg = random_segment();
    scene.predictions.push_back({p, video_ids[uniform_index(rng, video_ids.size())],
                                 labels[uniform_index(rng, labels.size())], seg,
                                 uniform(rng, 0.0, 1.0)});
  }
  return scene;
}

}  // namespace taldiag::test
