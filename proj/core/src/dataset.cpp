#include "taldiag/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace taldiag {

const VideoRecord* Dataset::find_video(const std::string& video_id) const {
  auto it = videos.find(video_id);
  return it == videos.end() ? nullptr : &it->second;
}

const GroundTruthInstance* Dataset::find_instance(InstanceId id) const {
  auto it = std::lower_bound(instances.begin(), instances.end(), id,
                             [](const GroundTruthInstance& g, InstanceId v) {
                               return g.instance_id < v;
                             });
  if (it == instances.end() || it->instance_id != id) return nullptr;
  return &*it;
}

const CharacteristicProfile* Dataset::profile(InstanceId id) const {
  auto it = characteristics.find(id);
  return it == characteristics.end() ? nullptr : &it->second;
}

bool Dataset::has_characteristic(Characteristic c) const {
  for (const auto& [id, p] : characteristics) {
    if (p.bucket_label(c)) return true;
  }
  return false;
}

namespace {

std::string instance_location(const GroundTruthInstance& g) {
  return "instance/" + std::to_string(g.instance_id) + " (video " + g.video_id + ")";
}

}  // namespace

DatasetBuildResult build_dataset(std::vector<VideoRecord> videos,
                                 std::vector<GroundTruthInstance> instances) {
  DatasetBuildResult result;
  auto error = [&result](std::string location, std::string message) {
    result.errors.push_back({ValidationIssue::Severity::error, std::move(location),
                             std::move(message)});
  };
  auto warn = [&result](std::string location, std::string message) {
    result.warnings.push_back({ValidationIssue::Severity::warning, std::move(location),
                               std::move(message)});
  };

  Dataset& ds = result.dataset;
  for (auto& v : videos) {
    if (!(v.duration > 0.0) || !std::isfinite(v.duration)) {
      error("database/" + v.video_id, "video duration must be a positive finite number");
      continue;
    }
    if (!ds.videos.emplace(v.video_id, v).second) {
      error("database/" + v.video_id, "duplicate video id");
    }
  }

  std::unordered_set<InstanceId> seen_ids;
  for (auto& g : instances) {
    const std::string where = instance_location(g);
    if (!seen_ids.insert(g.instance_id).second) {
      error(where, "duplicate instance id");
      continue;
    }
    const VideoRecord* video = ds.find_video(g.video_id);
    if (video == nullptr) {
      error(where, "unknown video reference '" + g.video_id + "'");
      continue;
    }
    if (!std::isfinite(g.segment.start) || !std::isfinite(g.segment.end)) {
      error(where, "segment bounds must be finite");
      continue;
    }
    if (g.segment.start >= g.segment.end) {
      error(where, "inverted segment [" + std::to_string(g.segment.start) + ", " +
                       std::to_string(g.segment.end) + "]");
      continue;
    }
    TemporalSegment clamped{std::max(0.0, g.segment.start),
                            std::min(video->duration, g.segment.end)};
    if (clamped != g.segment) {
      if (!clamped.valid()) {
        error(where, "segment lies entirely outside the video");
        continue;
      }
      warn(where, "segment clamped to [0, duration]");
      g.segment = clamped;
    }
    if (g.label.empty()) {
      error(where, "empty label");
      continue;
    }
    ds.instances.push_back(std::move(g));
  }

  if (!result.errors.empty()) {
    result.dataset = Dataset{};
    return result;
  }

  std::stable_sort(ds.instances.begin(), ds.instances.end(),
                   [](const GroundTruthInstance& a, const GroundTruthInstance& b) {
                     return a.instance_id < b.instance_id;
                   });
  for (const auto& g : ds.instances) {
    ds.class_index[g.label].push_back(g.instance_id);
    ds.video_index[g.video_id].push_back(g.instance_id);
  }

  // Derivable characteristics exist for every instance; context and
  // agreement arrive from the characteristics file.
  for (const auto& g : ds.instances) {
    const VideoRecord& video = ds.videos.at(g.video_id);
    CharacteristicProfile p;
    p.coverage_value = compute_coverage(g, video);
    p.coverage_bucket = coverage_bucket(*p.coverage_value);
    p.length_seconds = g.segment.length();
    p.length_bucket = length_bucket(*p.length_seconds);
    int same_class = 0;
    for (InstanceId other : ds.video_index.at(g.video_id)) {
      if (ds.find_instance(other)->label == g.label) ++same_class;
    }
    p.num_instances = same_class;
    p.num_instances_bucket = count_bucket(same_class);
    ds.characteristics.emplace(g.instance_id, std::move(p));
  }
  return result;
}

std::vector<ValidationIssue> validate_dataset(const Dataset& dataset) {
  std::vector<ValidationIssue> issues;
  auto error = [&issues](std::string location, std::string message) {
    issues.push_back({ValidationIssue::Severity::error, std::move(location),
                      std::move(message)});
  };

  std::unordered_set<InstanceId> seen;
  std::size_t indexed = 0;
  for (const auto& g : dataset.instances) {
    const std::string where = instance_location(g);
    if (!seen.insert(g.instance_id).second) error(where, "duplicate instance id");
    if (!g.segment.valid()) error(where, "invalid segment");
    const VideoRecord* video = dataset.find_video(g.video_id);
    if (video == nullptr) {
      error(where, "unknown video reference");
    } else if (g.segment.end > video->duration + 1e-9) {
      error(where, "segment exceeds video duration");
    }
    auto cls = dataset.class_index.find(g.label);
    if (cls == dataset.class_index.end() ||
        std::find(cls->second.begin(), cls->second.end(), g.instance_id) == cls->second.end()) {
      error(where, "missing from class index");
    }
  }
  for (const auto& [label, ids] : dataset.class_index) {
    indexed += ids.size();
    for (InstanceId id : ids) {
      const GroundTruthInstance* g = dataset.find_instance(id);
      if (g == nullptr || g->label != label) {
        error("class_index/" + label, "entry " + std::to_string(id) + " is not of this class");
      }
    }
  }
  if (indexed != dataset.instances.size()) {
    error("class_index", "class index is not a partition of the instances");
  }

  // Stored buckets must agree with the boundary tables.
  for (const auto& [id, p] : dataset.characteristics) {
    const std::string where = "characteristics/" + std::to_string(id);
    if (dataset.find_instance(id) == nullptr) {
      error(where, "profile for unknown instance");
      continue;
    }
    if (p.coverage_value && p.coverage_bucket &&
        coverage_bucket(*p.coverage_value) != *p.coverage_bucket) {
      error(where, "coverage bucket inconsistent with value");
    }
    if (p.length_seconds && p.length_bucket &&
        length_bucket(*p.length_seconds) != *p.length_bucket) {
      error(where, "length bucket inconsistent with value");
    }
    if (p.num_instances && p.num_instances_bucket &&
        count_bucket(*p.num_instances) != *p.num_instances_bucket) {
      error(where, "num_instances bucket inconsistent with value");
    }
    if (p.agreement_score && p.agreement_bucket &&
        agreement_bucket(*p.agreement_score) != *p.agreement_bucket) {
      error(where, "agreement bucket inconsistent with score");
    }
    if (p.context_size && (*p.context_size < 0 || *p.context_size > 6)) {
      error(where, "context size out of range 0..6");
    }
  }
  return issues;
}

double compute_coverage(const GroundTruthInstance& instance, const VideoRecord& video) {
  if (instance.video_id != video.video_id) {
    throw std::invalid_argument("compute_coverage: instance does not belong to video '" +
                                video.video_id + "'");
  }
  return std::min(1.0, instance.segment.length() / video.duration);
}

double compute_agreement(std::span<const TemporalSegment> annotations) {
  if (annotations.size() < 2) {
    throw std::invalid_argument("agreement undefined for fewer than 2 annotations");
  }
  std::vector<double> pairwise;
  pairwise.reserve(annotations.size() * (annotations.size() - 1) / 2);
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    for (std::size_t j = i + 1; j < annotations.size(); ++j) {
      pairwise.push_back(tiou(annotations[i], annotations[j]));
    }
  }
  std::sort(pairwise.begin(), pairwise.end());
  const std::size_t m = pairwise.size();
  if (m % 2 == 1) return pairwise[m / 2];
  return 0.5 * (pairwise[m / 2 - 1] + pairwise[m / 2]);
}

CharacteristicsBuildResult derive_characteristics(
    Dataset& dataset, const std::unordered_map<InstanceId, RawCharacteristicRecord>& raw) {
  CharacteristicsBuildResult result;
  auto error = [&result](std::string location, std::string message) {
    result.errors.push_back({ValidationIssue::Severity::error, std::move(location),
                             std::move(message)});
  };
  auto warn = [&result](std::string location, std::string message) {
    result.warnings.push_back({ValidationIssue::Severity::warning, std::move(location),
                               std::move(message)});
  };

  for (const auto& [id, rec] : raw) {
    const std::string where = "characteristics/" + std::to_string(id);
    const GroundTruthInstance* g = dataset.find_instance(id);
    if (g == nullptr) {
      warn(where, "characteristic entry references an unknown instance; skipped");
      continue;
    }
    CharacteristicProfile& p = dataset.characteristics[id];

    if (rec.context_size) {
      if (*rec.context_size < 0 || *rec.context_size > 6) {
        error(where, "context-size out of range 0..6");
      } else {
        p.context_size = rec.context_size;
      }
    }
    if (rec.context_distance) {
      p.context_distance = rec.context_distance;
      if (p.context_size) {
        const bool inf = *rec.context_distance == ContextDistance::Inf;
        if (inf != (*p.context_size == 0)) {
          warn(where, "context-distance disagrees with context-size; label kept verbatim");
        }
      }
    } else if (p.context_size && *p.context_size == 0) {
      p.context_distance = ContextDistance::Inf;  // no glimpse anywhere
    }

    if (!rec.agreement_annotations.empty()) {
      bool ok = rec.agreement_annotations.size() >= 2;
      for (const auto& s : rec.agreement_annotations) ok = ok && s.valid();
      if (!ok) {
        error(where, "agreement annotations need >= 2 valid segments");
      } else {
        p.agreement_score = compute_agreement(rec.agreement_annotations);
        p.agreement_bucket = agreement_bucket(*p.agreement_score);
      }
    } else if (rec.agreement_score) {
      if (*rec.agreement_score < 0.0 || *rec.agreement_score > 1.0) {
        error(where, "agreement score outside [0,1]");
      } else {
        p.agreement_score = rec.agreement_score;
        p.agreement_bucket = agreement_bucket(*rec.agreement_score);
      }
    } else if (rec.agreement_bucket) {
      p.agreement_bucket = rec.agreement_bucket;
    }
    if (rec.agreement_bucket && p.agreement_score &&
        agreement_bucket(*p.agreement_score) != *rec.agreement_bucket) {
      error(where, "precomputed agreement bucket disagrees with derived score");
    }

    if (rec.coverage_bucket && p.coverage_bucket && *rec.coverage_bucket != *p.coverage_bucket) {
      error(where, "precomputed coverage bucket disagrees with derived value");
    }
    if (rec.length_bucket && p.length_bucket && *rec.length_bucket != *p.length_bucket) {
      error(where, "precomputed length bucket disagrees with derived value");
    }
    if (rec.num_instances_bucket && p.num_instances_bucket &&
        *rec.num_instances_bucket != *p.num_instances_bucket) {
      error(where, "precomputed num-instances bucket disagrees with derived value");
    }
  }
  return result;
}

Dataset restrict_to(const Dataset& dataset, const std::vector<InstanceId>& keep) {
  std::unordered_set<InstanceId> wanted(keep.begin(), keep.end());
  Dataset out;
  out.videos = dataset.videos;
  for (const auto& g : dataset.instances) {
    if (!wanted.contains(g.instance_id)) continue;
    out.instances.push_back(g);
    out.class_index[g.label].push_back(g.instance_id);
    out.video_index[g.video_id].push_back(g.instance_id);
    auto it = dataset.characteristics.find(g.instance_id);
    if (it != dataset.characteristics.end()) out.characteristics.emplace(*it);
  }
  return out;
}

}  // namespace taldiag
