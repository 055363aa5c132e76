#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace taldiag {

/// The six per-instance action characteristics the analyses group by.
enum class Characteristic {
  ContextSize,
  ContextDistance,
  Agreement,
  Coverage,
  Length,
  NumInstances,
};

inline constexpr std::array<Characteristic, 6> kAllCharacteristics = {
    Characteristic::ContextSize,  Characteristic::ContextDistance,
    Characteristic::Agreement,    Characteristic::Coverage,
    Characteristic::Length,       Characteristic::NumInstances,
};

std::string_view to_string(Characteristic c);
std::optional<Characteristic> characteristic_from_string(std::string_view s);

/// Furthest position at which a context glimpse exists. Inf means no
/// temporal context at all (context size 0).
enum class ContextDistance { Inf, Far, Middle, Near };

/// Quintile buckets for coverage and length.
enum class SizeBucket { XS, S, M, L, XL };

/// Quintile buckets for boundary-annotation agreement.
enum class AgreementBucket { XW, W, M, H, XH };

/// Buckets for the per-video same-class instance count.
enum class CountBucket { XS, S, M, L };

std::string_view to_string(ContextDistance d);
std::string_view to_string(SizeBucket b);
std::string_view to_string(AgreementBucket b);
std::string_view to_string(CountBucket b);
std::optional<ContextDistance> context_distance_from_string(std::string_view s);
std::optional<SizeBucket> size_bucket_from_string(std::string_view s);
std::optional<AgreementBucket> agreement_bucket_from_string(std::string_view s);
std::optional<CountBucket> count_bucket_from_string(std::string_view s);

// Bucket boundary tables. All ranges are half-open (lo, hi]: a coverage of
// exactly 0.2 falls in XS. The bottom bucket additionally absorbs 0, which
// only agreement can produce (fully disjoint annotations).
SizeBucket coverage_bucket(double value);        // 0.2 / 0.4 / 0.6 / 0.8 splits of (0,1]
AgreementBucket agreement_bucket(double value);  // same splits of [0,1]
SizeBucket length_bucket(double seconds);        // 30 / 60 / 120 / 180 splits, XL above
CountBucket count_bucket(int n);                 // 1 / [2,4] / [5,8] / >8

/// Grouped context-size axis used by the analyses: {0}, {1,2}, {3,4}, {5,6}.
/// Returns the group index 0..3.
int context_size_group(int context_size);

struct CharacteristicProfile {
  std::optional<int> context_size;  // 0..6 context glimpses
  std::optional<ContextDistance> context_distance;
  std::optional<double> agreement_score;  // median pairwise tIoU, in [0,1]
  std::optional<AgreementBucket> agreement_bucket;
  std::optional<double> coverage_value;  // instance length / video duration
  std::optional<SizeBucket> coverage_bucket;
  std::optional<double> length_seconds;
  std::optional<SizeBucket> length_bucket;
  std::optional<int> num_instances;  // same-class instances in the video
  std::optional<CountBucket> num_instances_bucket;

  /// Bucket label of this instance for one characteristic, or nullopt when
  /// the underlying field is absent. Context size reports the grouped axis.
  std::optional<std::string> bucket_label(Characteristic c) const;
};

/// Bucket labels of a characteristic in report order.
const std::vector<std::string>& bucket_labels(Characteristic c);

}  // namespace taldiag
