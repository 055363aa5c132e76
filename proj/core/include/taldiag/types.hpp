#pragma once

#include <cstdint>
#include <string>

#include "taldiag/segment.hpp"

namespace taldiag {

using InstanceId = std::int32_t;
using PredictionId = std::int32_t;

struct VideoRecord {
  std::string video_id;
  double duration = 0.0;  // seconds, > 0
  std::string subset;     // e.g. "validation" / "testing"
};

struct GroundTruthInstance {
  InstanceId instance_id = -1;  // unique ordinal, assigned in load order
  std::string video_id;
  std::string label;
  TemporalSegment segment;
};

struct Prediction {
  PredictionId prediction_id = -1;  // input file order; deterministic tie-break key
  std::string video_id;
  std::string label;
  TemporalSegment segment;
  double score = 0.0;
};

}  // namespace taldiag
