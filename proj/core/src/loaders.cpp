#include "taldiag/loaders.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace taldiag {

using ordered_json = nlohmann::ordered_json;

ParseError::ParseError(std::string file, std::size_t byte_offset, const std::string& detail)
    : std::runtime_error(file + ": parse error at byte " + std::to_string(byte_offset) + ": " +
                         detail),
      file_(std::move(file)),
      byte_offset_(byte_offset) {}

SchemaError::SchemaError(std::string file, std::string field_path, const std::string& detail)
    : std::runtime_error(file + ": schema violation at " + field_path + ": " + detail),
      file_(std::move(file)),
      field_path_(std::move(field_path)) {}

namespace {

std::string issues_message(const std::vector<ValidationIssue>& issues) {
  std::ostringstream os;
  os << issues.size() << " validation error(s)";
  for (const auto& issue : issues) {
    os << "\n  " << issue.location << ": " << issue.message;
  }
  return os.str();
}

}  // namespace

ValidationFailure::ValidationFailure(std::vector<ValidationIssue> issues)
    : std::runtime_error(issues_message(issues)), issues_(std::move(issues)) {}

namespace {

// Parses with the document key order preserved; file order defines ids.
ordered_json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), e.byte, e.what());
  }
}

const ordered_json& require(const ordered_json& node, const char* key,
                            const std::string& file, const std::string& path) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw SchemaError(file, path + "/" + key, "missing required field");
  }
  return *it;
}

double require_number(const ordered_json& node, const std::string& file,
                      const std::string& path) {
  if (!node.is_number()) throw SchemaError(file, path, "expected a number");
  return node.get<double>();
}

std::string require_string(const ordered_json& node, const std::string& file,
                           const std::string& path) {
  if (!node.is_string()) throw SchemaError(file, path, "expected a string");
  return node.get<std::string>();
}

TemporalSegment require_segment(const ordered_json& node, const std::string& file,
                                const std::string& path) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    throw SchemaError(file, path, "expected a [start, end] pair of numbers");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

}  // namespace

GroundTruthLoad load_ground_truth(const std::filesystem::path& path,
                                  const std::optional<std::string>& subset) {
  const std::string file = path.string();
  const ordered_json doc = parse_file(path);
  if (!doc.is_object()) throw SchemaError(file, "/", "expected a top-level object");
  const ordered_json& database = require(doc, "database", file, "");
  if (!database.is_object()) throw SchemaError(file, "database", "expected an object");

  std::vector<VideoRecord> videos;
  std::vector<GroundTruthInstance> instances;
  InstanceId next_id = 0;
  for (const auto& [video_id, body] : database.items()) {
    const std::string vpath = "database/" + video_id;
    if (!body.is_object()) throw SchemaError(file, vpath, "expected an object");
    VideoRecord video;
    video.video_id = video_id;
    video.duration = require_number(require(body, "duration", file, vpath), file,
                                    vpath + "/duration");
    if (auto it = body.find("subset"); it != body.end()) {
      video.subset = require_string(*it, file, vpath + "/subset");
    }
    if (subset && video.subset != *subset) continue;
    videos.push_back(video);

    auto annotations = body.find("annotations");
    if (annotations == body.end()) continue;
    if (!annotations->is_array()) {
      throw SchemaError(file, vpath + "/annotations", "expected an array");
    }
    std::size_t index = 0;
    for (const auto& a : *annotations) {
      const std::string apath = vpath + "/annotations/" + std::to_string(index);
      if (!a.is_object()) throw SchemaError(file, apath, "expected an object");
      GroundTruthInstance g;
      g.instance_id = next_id++;
      g.video_id = video_id;
      g.label = require_string(require(a, "label", file, apath), file, apath + "/label");
      g.segment = require_segment(require(a, "segment", file, apath), file, apath + "/segment");
      instances.push_back(std::move(g));
      ++index;
    }
  }

  DatasetBuildResult built = build_dataset(std::move(videos), std::move(instances));
  if (!built.ok()) throw ValidationFailure(std::move(built.errors));
  return {std::move(built.dataset), std::move(built.warnings)};
}

PredictionsLoad load_predictions(const std::filesystem::path& path, const Dataset& dataset) {
  const std::string file = path.string();
  const ordered_json doc = parse_file(path);
  if (!doc.is_object()) throw SchemaError(file, "/", "expected a top-level object");
  const ordered_json& results = require(doc, "results", file, "");
  if (!results.is_object()) throw SchemaError(file, "results", "expected an object");

  PredictionsLoad out;
  std::vector<ValidationIssue> errors;
  PredictionId next_id = 0;
  std::size_t unknown_videos = 0;
  for (const auto& [video_id, list] : results.items()) {
    const std::string vpath = "results/" + video_id;
    if (!list.is_array()) throw SchemaError(file, vpath, "expected an array");
    const bool known = dataset.videos.contains(video_id);
    if (!known && !list.empty()) ++unknown_videos;
    std::size_t index = 0;
    for (const auto& e : list) {
      const std::string epath = vpath + "/" + std::to_string(index);
      if (!e.is_object()) throw SchemaError(file, epath, "expected an object");
      Prediction p;
      p.video_id = video_id;
      p.label = require_string(require(e, "label", file, epath), file, epath + "/label");
      p.segment = require_segment(require(e, "segment", file, epath), file, epath + "/segment");
      p.score = require_number(require(e, "score", file, epath), file, epath + "/score");
      ++index;
      if (!known) continue;  // e.g. predictions for another subset
      if (!std::isfinite(p.score)) {
        errors.push_back({ValidationIssue::Severity::error, epath, "score must be finite"});
        continue;
      }
      if (!std::isfinite(p.segment.start) || !std::isfinite(p.segment.end) ||
          p.segment.start >= p.segment.end || p.segment.start < 0.0) {
        errors.push_back({ValidationIssue::Severity::error, epath,
                          "prediction segment must satisfy 0 <= start < end"});
        continue;
      }
      p.prediction_id = next_id++;
      out.predictions.push_back(std::move(p));
    }
  }
  if (!errors.empty()) throw ValidationFailure(std::move(errors));
  if (unknown_videos > 0) {
    out.warnings.push_back({ValidationIssue::Severity::warning, "results",
                            std::to_string(unknown_videos) +
                                " video(s) not present in the dataset; their predictions "
                                "were dropped"});
  }
  return out;
}

std::string characteristics_key(const std::string& video_id, std::size_t annotation_index) {
  return video_id + "_" + std::to_string(annotation_index);
}

namespace {

// "<video_id>_<index>" -> (video_id, index)
std::optional<std::pair<std::string, std::size_t>> split_key(const std::string& key) {
  const std::size_t pos = key.rfind('_');
  if (pos == std::string::npos || pos + 1 >= key.size()) return std::nullopt;
  std::size_t index = 0;
  for (std::size_t i = pos + 1; i < key.size(); ++i) {
    if (key[i] < '0' || key[i] > '9') return std::nullopt;
    index = index * 10 + static_cast<std::size_t>(key[i] - '0');
  }
  return std::make_pair(key.substr(0, pos), index);
}

}  // namespace

std::vector<ValidationIssue> load_characteristics(const std::filesystem::path& path,
                                                  Dataset& dataset) {
  const std::string file = path.string();
  const ordered_json doc = parse_file(path);
  if (!doc.is_object()) throw SchemaError(file, "/", "expected a top-level object");

  std::vector<ValidationIssue> warnings;
  std::size_t unknown_keys = 0;
  std::unordered_map<InstanceId, RawCharacteristicRecord> raw;
  for (const auto& [key, body] : doc.items()) {
    const auto parsed = split_key(key);
    InstanceId id = -1;
    if (parsed) {
      auto vit = dataset.video_index.find(parsed->first);
      if (vit != dataset.video_index.end() && parsed->second < vit->second.size()) {
        id = vit->second[parsed->second];
      }
    }
    if (id < 0) {
      ++unknown_keys;
      continue;
    }
    if (!body.is_object()) throw SchemaError(file, key, "expected an object");
    RawCharacteristicRecord rec;
    if (auto it = body.find("context-size"); it != body.end()) {
      if (!it->is_number_integer()) {
        throw SchemaError(file, key + "/context-size", "expected an integer");
      }
      rec.context_size = it->get<int>();
    }
    if (auto it = body.find("context-distance"); it != body.end()) {
      const auto d = context_distance_from_string(
          require_string(*it, file, key + "/context-distance"));
      if (!d) {
        throw SchemaError(file, key + "/context-distance",
                          "expected one of Inf, Far, Middle, Near");
      }
      rec.context_distance = d;
    }
    if (auto it = body.find("agreement"); it != body.end()) {
      if (it->is_array()) {
        std::size_t index = 0;
        for (const auto& s : *it) {
          rec.agreement_annotations.push_back(
              require_segment(s, file, key + "/agreement/" + std::to_string(index)));
          ++index;
        }
      } else if (it->is_number()) {
        rec.agreement_score = it->get<double>();
      } else if (it->is_string()) {
        const auto b = agreement_bucket_from_string(it->get<std::string>());
        if (!b) {
          throw SchemaError(file, key + "/agreement",
                            "expected a bucket label XW/W/M/H/XH, a score or annotations");
        }
        rec.agreement_bucket = b;
      } else {
        throw SchemaError(file, key + "/agreement",
                          "expected a bucket label, a score or an annotation array");
      }
    }
    auto parse_size_bucket = [&](const char* name) -> std::optional<SizeBucket> {
      auto it = body.find(name);
      if (it == body.end()) return std::nullopt;
      const auto b = size_bucket_from_string(require_string(*it, file, key + "/" + name));
      if (!b) throw SchemaError(file, key + "/" + name, "expected XS/S/M/L/XL");
      return b;
    };
    rec.coverage_bucket = parse_size_bucket("coverage");
    rec.length_bucket = parse_size_bucket("length");
    if (auto it = body.find("num-instances"); it != body.end()) {
      const auto b =
          count_bucket_from_string(require_string(*it, file, key + "/num-instances"));
      if (!b) throw SchemaError(file, key + "/num-instances", "expected XS/S/M/L");
      rec.num_instances_bucket = b;
    }
    raw.emplace(id, std::move(rec));
  }

  CharacteristicsBuildResult merged = derive_characteristics(dataset, raw);
  if (!merged.ok()) throw ValidationFailure(std::move(merged.errors));
  warnings = std::move(merged.warnings);
  if (unknown_keys > 0) {
    warnings.push_back({ValidationIssue::Severity::warning, "(keys)",
                        std::to_string(unknown_keys) +
                            " characteristic key(s) matched no loaded instance; skipped"});
  }
  return warnings;
}

}  // namespace taldiag
