#include "taldiag/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "taldiag/loaders.hpp"
#include "taldiag/rng.hpp"

namespace taldiag {

std::size_t weighted_index(std::mt19937_64& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double draw = uniform01(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    draw -= weights[i];
    if (draw < 0.0) return i;
  }
  return weights.size() - 1;
}

namespace {

constexpr double kMinGap = 16.0;
constexpr double kMaxGap = 80.0;
constexpr double kOverlapFloor = 0.1;  // BG/LOC boundary the taxonomy uses

struct VideoLayout {
  std::string video_id;
  std::string label;
  double duration = 0.0;
  std::vector<TemporalSegment> instance_segments;       // chronological
  std::vector<TemporalSegment> gaps;                    // lead, in-between, tail
};

struct PlannedPrediction {
  std::size_t video = 0;
  std::string label;
  TemporalSegment segment;
  double score = 0.0;
  ErrorCategory category = ErrorCategory::Background;
};

std::string padded_id(const char* prefix, int i, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, i);
  return buf;
}

void validate_spec(const SyntheticSpec& spec) {
  double mixture_sum = 0.0;
  for (double p : spec.mixture) {
    if (p < 0.0) throw std::invalid_argument("synthetic: mixture proportions must be >= 0");
    mixture_sum += p;
  }
  if (std::abs(mixture_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("synthetic: mixture proportions must sum to 1");
  }
  if (spec.num_classes < 1) throw std::invalid_argument("synthetic: need at least one class");
  if (spec.num_videos < spec.num_classes) {
    throw std::invalid_argument("synthetic: need at least one video per class");
  }
  if (spec.num_predictions < 0) {
    throw std::invalid_argument("synthetic: negative prediction count");
  }
  if (spec.instances_per_video_weights.empty()) {
    throw std::invalid_argument("synthetic: empty instances-per-video distribution");
  }
  double weight_sum = 0.0;
  for (double w : spec.instances_per_video_weights) {
    if (w < 0.0) throw std::invalid_argument("synthetic: negative distribution weight");
    weight_sum += w;
  }
  if (weight_sum <= 0.0) {
    throw std::invalid_argument("synthetic: instances-per-video weights sum to zero");
  }
  if (spec.planting_alpha <= 0.0 || spec.planting_alpha > 1.0) {
    throw std::invalid_argument("synthetic: planting threshold must lie in (0,1]");
  }
  const bool needs_partial = spec.mixture[static_cast<std::size_t>(
                                 ErrorCategory::Localization)] > 0.0 ||
                             spec.mixture[static_cast<std::size_t>(
                                 ErrorCategory::Confusion)] > 0.0;
  if (needs_partial && spec.planting_alpha < kOverlapFloor + 0.05) {
    throw std::invalid_argument(
        "synthetic: planting threshold leaves no room between the overlap floor and alpha");
  }
  const bool needs_second_label =
      spec.mixture[static_cast<std::size_t>(ErrorCategory::WrongLabel)] > 0.0 ||
      spec.mixture[static_cast<std::size_t>(ErrorCategory::Confusion)] > 0.0;
  if (needs_second_label && spec.num_classes < 2) {
    throw std::invalid_argument("synthetic: wrong-label errors need at least two classes");
  }
  for (const auto& range : spec.score_ranges) {
    if (!(range.lo > 0.0) || !(range.lo < range.hi) || !(range.hi <= 1.0)) {
      throw std::invalid_argument("synthetic: score ranges must satisfy 0 < lo < hi <= 1");
    }
  }
}

std::array<int, kCategoryCount> mixture_counts(const SyntheticSpec& spec) {
  std::array<int, kCategoryCount> counts{};
  std::array<double, kCategoryCount> remainders{};
  int assigned = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    const double exact = spec.mixture[c] * spec.num_predictions;
    counts[c] = static_cast<int>(std::floor(exact));
    remainders[c] = exact - counts[c];
    assigned += counts[c];
  }
  // largest remainder rounding, category order breaking ties
  std::array<std::size_t, kCategoryCount> order{0, 1, 2, 3, 4, 5};
  std::stable_sort(order.begin(), order.end(), [&remainders](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (int extra = 0; extra < spec.num_predictions - assigned; ++extra) {
    ++counts[order[static_cast<std::size_t>(extra) % kCategoryCount]];
  }
  return counts;
}

double draw_instance_length(std::mt19937_64& rng) {
  // log-uniform over [5, 320]: populates every length and coverage bucket
  return std::exp(uniform(rng, std::log(5.0), std::log(320.0)));
}

}  // namespace

SyntheticOutput generate_synthetic(const SyntheticSpec& spec) {
  validate_spec(spec);
  std::mt19937_64 rng(spec.seed);

  // --- videos and ground truth ------------------------------------------
  std::vector<VideoLayout> videos;
  videos.reserve(static_cast<std::size_t>(spec.num_videos));
  std::vector<std::string> class_names;
  class_names.reserve(static_cast<std::size_t>(spec.num_classes));
  for (int c = 0; c < spec.num_classes; ++c) {
    class_names.push_back(padded_id("action_", c, 3));
  }

  std::vector<VideoRecord> video_records;
  std::vector<GroundTruthInstance> instances;
  InstanceId next_instance = 0;
  for (int v = 0; v < spec.num_videos; ++v) {
    VideoLayout layout;
    layout.video_id = padded_id("video_", v, 5);
    layout.label = class_names[static_cast<std::size_t>(v % spec.num_classes)];
    const std::size_t count = weighted_index(rng, spec.instances_per_video_weights) + 1;

    double cursor = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double gap = uniform(rng, kMinGap, kMaxGap);
      layout.gaps.push_back({cursor, cursor + gap});
      cursor += gap;
      const double length = draw_instance_length(rng);
      layout.instance_segments.push_back({cursor, cursor + length});
      cursor += length;
    }
    const double tail = uniform(rng, kMinGap, kMaxGap);
    layout.gaps.push_back({cursor, cursor + tail});
    layout.duration = cursor + tail;

    video_records.push_back({layout.video_id, layout.duration, spec.subset});
    for (const auto& segment : layout.instance_segments) {
      instances.push_back({next_instance++, layout.video_id, layout.label, segment});
    }
    videos.push_back(std::move(layout));
  }

  // --- characteristics ----------------------------------------------------
  // context sizes skewed toward rich context, mirroring real distributions
  const std::vector<double> context_weights = {0.07, 0.08, 0.10, 0.17, 0.20, 0.20, 0.18};
  const std::vector<double> distance_weights = {0.70, 0.20, 0.10};  // Far, Middle, Near

  struct InstanceExtras {
    int context_size = 0;
    ContextDistance distance = ContextDistance::Inf;
    std::vector<TemporalSegment> annotations;
  };
  std::vector<InstanceExtras> extras(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    InstanceExtras& e = extras[i];
    e.context_size = static_cast<int>(weighted_index(rng, context_weights));
    e.distance = e.context_size == 0
                     ? ContextDistance::Inf
                     : static_cast<ContextDistance>(1 + weighted_index(rng, distance_weights));
    // agreement lands exactly at lambda: annotations {g, g, sub, sub} have
    // pairwise tIoUs {1, 1, lambda x4}, whose median is lambda
    double lambda = 0.0;
    for (;;) {
      lambda = uniform(rng, 0.05, 1.0);
      bool near_edge = false;
      for (double edge : {0.2, 0.4, 0.6, 0.8}) {
        near_edge = near_edge || std::abs(lambda - edge) < 1e-6;
      }
      if (!near_edge) break;
    }
    const TemporalSegment& seg = instances[i].segment;
    const TemporalSegment sub{seg.start, seg.start + lambda * seg.length()};
    e.annotations = {seg, seg, sub, sub};
  }

  DatasetBuildResult built = build_dataset(video_records, instances);
  if (!built.ok() || !built.warnings.empty()) {
    throw std::logic_error("synthetic: generated ground truth failed validation");
  }
  std::unordered_map<InstanceId, RawCharacteristicRecord> raw;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    RawCharacteristicRecord rec;
    rec.context_size = extras[i].context_size;
    rec.context_distance = extras[i].distance;
    rec.agreement_annotations = extras[i].annotations;
    raw.emplace(instances[i].instance_id, std::move(rec));
  }
  CharacteristicsBuildResult merged = derive_characteristics(built.dataset, raw);
  if (!merged.ok() || !merged.warnings.empty()) {
    throw std::logic_error("synthetic: generated characteristics failed validation");
  }
  Dataset& dataset = built.dataset;

  // --- degradation: these instances receive no detection ------------------
  std::vector<std::uint8_t> degraded(instances.size(), 0);
  for (const auto& [characteristic, bucket] : spec.degrade) {
    bool valid_bucket = false;
    for (const auto& label : bucket_labels(characteristic)) {
      valid_bucket = valid_bucket || label == bucket;
    }
    if (!valid_bucket) {
      throw std::invalid_argument("synthetic: unknown bucket '" + bucket + "' for " +
                                  std::string(to_string(characteristic)));
    }
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto label = dataset.profile(instances[i].instance_id)
                             ->bucket_label(characteristic);
      if (label && *label == bucket) degraded[i] = 1;
    }
  }

  // --- planted predictions -------------------------------------------------
  const std::array<int, kCategoryCount> counts = mixture_counts(spec);
  std::vector<ErrorCategory> categories;
  categories.reserve(static_cast<std::size_t>(spec.num_predictions));
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    categories.insert(categories.end(), static_cast<std::size_t>(counts[c]),
                      static_cast<ErrorCategory>(c));
  }
  shuffle_deterministic(categories, rng);

  std::vector<std::size_t> eligible;  // instance index -> TP target pool
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!degraded[i]) eligible.push_back(i);
  }
  shuffle_deterministic(eligible, rng);
  if (static_cast<std::size_t>(counts[0]) > eligible.size()) {
    throw std::invalid_argument(
        "synthetic: mixture requires " + std::to_string(counts[0]) +
        " true positives but only " + std::to_string(eligible.size()) +
        " detectable instances exist; add videos or lower the TP share");
  }

  std::unordered_map<std::string, std::size_t> video_of;
  for (std::size_t v = 0; v < videos.size(); ++v) video_of.emplace(videos[v].video_id, v);
  auto video_index_of_instance = [&](std::size_t i) {
    return video_of.at(instances[i].video_id);
  };

  std::vector<PlannedPrediction> planned(categories.size());
  std::vector<std::ptrdiff_t> tp_of_instance(instances.size(), -1);  // planned index
  std::size_t next_eligible = 0;

  auto other_label = [&](const std::string& label) {
    const std::size_t pick = uniform_index(rng, static_cast<std::uint64_t>(
                                                    spec.num_classes - 1));
    std::size_t seen = 0;
    for (const auto& name : class_names) {
      if (name == label) continue;
      if (seen++ == pick) return name;
    }
    return class_names.back();
  };

  // First pass: geometry and scores. DD targets resolve in a second pass,
  // once every TP score is known.
  for (std::size_t p = 0; p < categories.size(); ++p) {
    PlannedPrediction& plan = planned[p];
    plan.category = categories[p];
    const auto& range = spec.score_ranges[static_cast<std::size_t>(plan.category)];
    plan.score = uniform(rng, range.lo, range.hi);

    switch (plan.category) {
      case ErrorCategory::TruePositive: {
        const std::size_t target = eligible[next_eligible++];
        plan.video = video_index_of_instance(target);
        plan.label = instances[target].label;
        plan.segment = instances[target].segment;
        tp_of_instance[target] = static_cast<std::ptrdiff_t>(p);
        break;
      }
      case ErrorCategory::DoubleDetection:
        break;  // second pass
      case ErrorCategory::WrongLabel: {
        const std::size_t target = uniform_index(rng, instances.size());
        plan.video = video_index_of_instance(target);
        plan.label = other_label(instances[target].label);
        plan.segment = instances[target].segment;
        break;
      }
      case ErrorCategory::Localization:
      case ErrorCategory::Confusion: {
        const std::size_t target = uniform_index(rng, instances.size());
        const TemporalSegment& seg = instances[target].segment;
        const double overlap =
            uniform(rng, kOverlapFloor + 0.02, spec.planting_alpha - 0.02);
        const double length = overlap * seg.length();
        const double start = uniform(rng, seg.start, seg.end - length);
        plan.video = video_index_of_instance(target);
        plan.label = plan.category == ErrorCategory::Localization
                         ? instances[target].label
                         : other_label(instances[target].label);
        plan.segment = {start, start + length};
        break;
      }
      case ErrorCategory::Background: {
        const std::size_t v = uniform_index(rng, videos.size());
        const auto& gaps = videos[v].gaps;
        const TemporalSegment gap = gaps[uniform_index(rng, gaps.size())];
        const double usable = gap.length() - 1.0;  // 0.5 s margins
        const double length = uniform(rng, 0.5, std::min(usable, 30.0));
        const double start = uniform(rng, gap.start + 0.5, gap.end - 0.5 - length);
        plan.video = v;
        plan.label = class_names[uniform_index(rng, class_names.size())];
        plan.segment = {start, start + length};
        break;
      }
    }
  }

  // Second pass: each double detection duplicates a TP-covered instance and
  // must rank strictly below that TP.
  std::vector<std::size_t> tp_planned;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (tp_of_instance[i] >= 0) tp_planned.push_back(static_cast<std::size_t>(i));
  }
  for (std::size_t p = 0; p < planned.size(); ++p) {
    if (planned[p].category != ErrorCategory::DoubleDetection) continue;
    if (tp_planned.empty()) {
      throw std::invalid_argument(
          "synthetic: double detections require at least one true positive");
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i : tp_planned) {
      if (planned[static_cast<std::size_t>(tp_of_instance[i])].score > planned[p].score) {
        candidates.push_back(i);
      }
    }
    if (candidates.empty()) {
      // the duplicate outranks every TP: trade scores with the top TP
      std::size_t top = tp_planned.front();
      for (std::size_t i : tp_planned) {
        if (planned[static_cast<std::size_t>(tp_of_instance[i])].score >
            planned[static_cast<std::size_t>(tp_of_instance[top])].score) {
          top = i;
        }
      }
      std::swap(planned[static_cast<std::size_t>(tp_of_instance[top])].score,
                planned[p].score);
      candidates.push_back(top);
    }
    const std::size_t target = candidates[uniform_index(rng, candidates.size())];
    planned[p].video = video_index_of_instance(target);
    planned[p].label = instances[target].label;
    planned[p].segment = instances[target].segment;
  }

  // --- emit files (video order, then creation order inside each video) ----
  std::vector<std::vector<std::size_t>> per_video(videos.size());
  for (std::size_t p = 0; p < planned.size(); ++p) per_video[planned[p].video].push_back(p);

  SyntheticOutput out;
  nlohmann::ordered_json database = nlohmann::ordered_json::object();
  std::size_t instance_cursor = 0;
  nlohmann::ordered_json characteristics = nlohmann::ordered_json::object();
  for (std::size_t v = 0; v < videos.size(); ++v) {
    const VideoLayout& layout = videos[v];
    nlohmann::ordered_json annotations = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < layout.instance_segments.size(); ++a, ++instance_cursor) {
      const auto& seg = layout.instance_segments[a];
      annotations.push_back({{"label", layout.label}, {"segment", {seg.start, seg.end}}});

      const InstanceExtras& e = extras[instance_cursor];
      nlohmann::ordered_json ann = nlohmann::ordered_json::array();
      for (const auto& s : e.annotations) ann.push_back({s.start, s.end});
      const CharacteristicProfile& profile =
          *dataset.profile(instances[instance_cursor].instance_id);
      characteristics[characteristics_key(layout.video_id, a)] = {
          {"context-size", e.context_size},
          {"context-distance", std::string(to_string(e.distance))},
          {"agreement", std::move(ann)},
          {"coverage", std::string(to_string(*profile.coverage_bucket))},
          {"length", std::string(to_string(*profile.length_bucket))},
          {"num-instances", std::string(to_string(*profile.num_instances_bucket))},
      };
    }
    database[layout.video_id] = {
        {"duration", layout.duration},
        {"subset", spec.subset},
        {"annotations", std::move(annotations)},
    };
  }
  out.ground_truth_json = {{"version", "synthetic"}, {"database", std::move(database)}};
  out.characteristics_json = std::move(characteristics);

  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  PredictionId next_prediction = 0;
  out.planted.reserve(planned.size());
  for (std::size_t v = 0; v < videos.size(); ++v) {
    if (per_video[v].empty()) continue;
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (std::size_t p : per_video[v]) {
      const PlannedPrediction& plan = planned[p];
      list.push_back({{"label", plan.label},
                      {"segment", {plan.segment.start, plan.segment.end}},
                      {"score", plan.score}});
      out.predictions.push_back({next_prediction++, videos[v].video_id, plan.label,
                                 plan.segment, plan.score});
      out.planted.push_back(plan.category);
    }
    results[videos[v].video_id] = std::move(list);
  }
  out.predictions_json = {{"version", "synthetic"}, {"results", std::move(results)},
                          {"external_data", nlohmann::ordered_json::object()}};
  out.dataset = std::move(dataset);
  return out;
}

void write_synthetic_files(const SyntheticOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << content;
  };
  write("ground_truth.json", output.ground_truth_json.dump(2) + "\n");
  write("predictions.json", output.predictions_json.dump(2) + "\n");
  write("characteristics.json", output.characteristics_json.dump(2) + "\n");

  std::string sidecar = "prediction_id,planted_category\n";
  for (std::size_t p = 0; p < output.planted.size(); ++p) {
    sidecar += std::to_string(p);
    sidecar += ',';
    sidecar += short_code(output.planted[p]);
    sidecar += '\n';
  }
  write("planted_verdicts.csv", sidecar);
}

}  // namespace taldiag
