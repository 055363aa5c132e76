#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "taldiag/characteristics.hpp"
#include "taldiag/types.hpp"

namespace taldiag {

struct ValidationIssue {
  enum class Severity { warning, error };
  Severity severity = Severity::error;
  std::string location;  // e.g. "database/<video_id>/annotations/3"
  std::string message;
};

/// Immutable evaluation dataset: videos, ground-truth instances and their
/// characteristic profiles. Safe for concurrent reads once built.
struct Dataset {
  std::map<std::string, VideoRecord> videos;
  std::vector<GroundTruthInstance> instances;  // ordered by instance_id
  std::unordered_map<InstanceId, CharacteristicProfile> characteristics;
  std::map<std::string, std::vector<InstanceId>> class_index;  // label -> instances
  std::map<std::string, std::vector<InstanceId>> video_index;  // video -> instances, file order

  const VideoRecord* find_video(const std::string& video_id) const;
  const GroundTruthInstance* find_instance(InstanceId id) const;
  const CharacteristicProfile* profile(InstanceId id) const;
  /// True when at least one instance carries the characteristic.
  bool has_characteristic(Characteristic c) const;
};

struct DatasetBuildResult {
  Dataset dataset;  // meaningful only when ok()
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;
  bool ok() const { return errors.empty(); }
};

/// Validates raw records and assembles the dataset. Collects every violation
/// instead of stopping at the first. Segments reaching past the video bounds
/// are clamped to [0, duration] with a warning; inverted or empty segments
/// are errors. Coverage, length and #instances profiles are derived for all
/// instances; context and agreement arrive later via derive_characteristics.
DatasetBuildResult build_dataset(std::vector<VideoRecord> videos,
                                 std::vector<GroundTruthInstance> instances);

/// Re-checks the invariants of an already-assembled dataset (video
/// references, class/video index partitions, bucket/raw-value consistency).
std::vector<ValidationIssue> validate_dataset(const Dataset& dataset);

/// Fraction of the video covered by the instance, in (0,1].
double compute_coverage(const GroundTruthInstance& instance, const VideoRecord& video);

/// Median pairwise tIoU over >= 2 boundary annotations of one instance.
/// Even pair counts take the mean of the two central values.
/// Throws std::invalid_argument for fewer than two annotations.
double compute_agreement(std::span<const TemporalSegment> annotations);

/// Per-instance characteristic inputs as read from a characteristics file.
struct RawCharacteristicRecord {
  std::optional<int> context_size;
  std::optional<ContextDistance> context_distance;
  std::vector<TemporalSegment> agreement_annotations;  // original + re-annotations
  std::optional<double> agreement_score;               // given directly
  std::optional<AgreementBucket> agreement_bucket;     // given as a label
  // Precomputed buckets are cross-checked against derived values.
  std::optional<SizeBucket> coverage_bucket;
  std::optional<SizeBucket> length_bucket;
  std::optional<CountBucket> num_instances_bucket;
};

struct CharacteristicsBuildResult {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;
  bool ok() const { return errors.empty(); }
};

/// Merges supplied context/agreement data into the dataset's profiles and
/// validates precomputed buckets against the derived values. Instances
/// absent from `raw` keep their derivable fields and leave the rest unset.
CharacteristicsBuildResult derive_characteristics(
    Dataset& dataset, const std::unordered_map<InstanceId, RawCharacteristicRecord>& raw);

/// Dataset restricted to `keep` instances (videos retained, indexes rebuilt).
Dataset restrict_to(const Dataset& dataset, const std::vector<InstanceId>& keep);

}  // namespace taldiag
