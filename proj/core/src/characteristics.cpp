#include "taldiag/characteristics.hpp"

namespace taldiag {

std::string_view to_string(Characteristic c) {
  switch (c) {
    case Characteristic::ContextSize: return "context_size";
    case Characteristic::ContextDistance: return "context_distance";
    case Characteristic::Agreement: return "agreement";
    case Characteristic::Coverage: return "coverage";
    case Characteristic::Length: return "length";
    case Characteristic::NumInstances: return "num_instances";
  }
  return "?";
}

std::optional<Characteristic> characteristic_from_string(std::string_view s) {
  for (Characteristic c : kAllCharacteristics) {
    if (s == to_string(c)) return c;
  }
  // accept the hyphenated file spelling too
  if (s == "context-size") return Characteristic::ContextSize;
  if (s == "context-distance") return Characteristic::ContextDistance;
  if (s == "num-instances") return Characteristic::NumInstances;
  return std::nullopt;
}

std::string_view to_string(ContextDistance d) {
  switch (d) {
    case ContextDistance::Inf: return "Inf";
    case ContextDistance::Far: return "Far";
    case ContextDistance::Middle: return "Middle";
    case ContextDistance::Near: return "Near";
  }
  return "?";
}

std::optional<ContextDistance> context_distance_from_string(std::string_view s) {
  if (s == "Inf" || s == "inf") return ContextDistance::Inf;
  if (s == "Far" || s == "F") return ContextDistance::Far;
  if (s == "Middle" || s == "M") return ContextDistance::Middle;
  if (s == "Near" || s == "N") return ContextDistance::Near;
  return std::nullopt;
}

std::string_view to_string(SizeBucket b) {
  switch (b) {
    case SizeBucket::XS: return "XS";
    case SizeBucket::S: return "S";
    case SizeBucket::M: return "M";
    case SizeBucket::L: return "L";
    case SizeBucket::XL: return "XL";
  }
  return "?";
}

std::optional<SizeBucket> size_bucket_from_string(std::string_view s) {
  if (s == "XS") return SizeBucket::XS;
  if (s == "S") return SizeBucket::S;
  if (s == "M") return SizeBucket::M;
  if (s == "L") return SizeBucket::L;
  if (s == "XL") return SizeBucket::XL;
  return std::nullopt;
}

std::string_view to_string(AgreementBucket b) {
  switch (b) {
    case AgreementBucket::XW: return "XW";
    case AgreementBucket::W: return "W";
    case AgreementBucket::M: return "M";
    case AgreementBucket::H: return "H";
    case AgreementBucket::XH: return "XH";
  }
  return "?";
}

std::optional<AgreementBucket> agreement_bucket_from_string(std::string_view s) {
  if (s == "XW") return AgreementBucket::XW;
  if (s == "W") return AgreementBucket::W;
  if (s == "M") return AgreementBucket::M;
  if (s == "H") return AgreementBucket::H;
  if (s == "XH") return AgreementBucket::XH;
  return std::nullopt;
}

std::string_view to_string(CountBucket b) {
  switch (b) {
    case CountBucket::XS: return "XS";
    case CountBucket::S: return "S";
    case CountBucket::M: return "M";
    case CountBucket::L: return "L";
  }
  return "?";
}

std::optional<CountBucket> count_bucket_from_string(std::string_view s) {
  if (s == "XS") return CountBucket::XS;
  if (s == "S") return CountBucket::S;
  if (s == "M") return CountBucket::M;
  if (s == "L") return CountBucket::L;
  return std::nullopt;
}

namespace {

// (0,0.2], (0.2,0.4], (0.4,0.6], (0.6,0.8], (0.8,1.0]
int unit_range_slot(double v) {
  if (v <= 0.2) return 0;
  if (v <= 0.4) return 1;
  if (v <= 0.6) return 2;
  if (v <= 0.8) return 3;
  return 4;
}

}  // namespace

SizeBucket coverage_bucket(double value) {
  return static_cast<SizeBucket>(unit_range_slot(value));
}

AgreementBucket agreement_bucket(double value) {
  return static_cast<AgreementBucket>(unit_range_slot(value));
}

SizeBucket length_bucket(double seconds) {
  if (seconds <= 30.0) return SizeBucket::XS;
  if (seconds <= 60.0) return SizeBucket::S;
  if (seconds <= 120.0) return SizeBucket::M;
  if (seconds <= 180.0) return SizeBucket::L;
  return SizeBucket::XL;
}

CountBucket count_bucket(int n) {
  if (n <= 1) return CountBucket::XS;
  if (n <= 4) return CountBucket::S;
  if (n <= 8) return CountBucket::M;
  return CountBucket::L;
}

int context_size_group(int context_size) {
  if (context_size <= 0) return 0;
  if (context_size <= 2) return 1;
  if (context_size <= 4) return 2;
  return 3;
}

namespace {

const std::vector<std::string> kContextSizeLabels = {"0", "1-2", "3-4", "5-6"};
const std::vector<std::string> kContextDistanceLabels = {"Inf", "Far", "Middle", "Near"};
const std::vector<std::string> kAgreementLabels = {"XW", "W", "M", "H", "XH"};
const std::vector<std::string> kSizeLabels = {"XS", "S", "M", "L", "XL"};
const std::vector<std::string> kCountLabels = {"XS", "S", "M", "L"};

}  // namespace

const std::vector<std::string>& bucket_labels(Characteristic c) {
  switch (c) {
    case Characteristic::ContextSize: return kContextSizeLabels;
    case Characteristic::ContextDistance: return kContextDistanceLabels;
    case Characteristic::Agreement: return kAgreementLabels;
    case Characteristic::Coverage:
    case Characteristic::Length: return kSizeLabels;
    case Characteristic::NumInstances: return kCountLabels;
  }
  return kSizeLabels;
}

std::optional<std::string> CharacteristicProfile::bucket_label(Characteristic c) const {
  switch (c) {
    case Characteristic::ContextSize:
      if (!context_size) return std::nullopt;
      return kContextSizeLabels[static_cast<std::size_t>(context_size_group(*context_size))];
    case Characteristic::ContextDistance:
      if (!context_distance) return std::nullopt;
      return std::string(to_string(*context_distance));
    case Characteristic::Agreement:
      if (!agreement_bucket) return std::nullopt;
      return std::string(to_string(*agreement_bucket));
    case Characteristic::Coverage:
      if (!coverage_bucket) return std::nullopt;
      return std::string(to_string(*coverage_bucket));
    case Characteristic::Length:
      if (!length_bucket) return std::nullopt;
      return std::string(to_string(*length_bucket));
    case Characteristic::NumInstances:
      if (!num_instances_bucket) return std::nullopt;
      return std::string(to_string(*num_instances_bucket));
  }
  return std::nullopt;
}

}  // namespace taldiag
