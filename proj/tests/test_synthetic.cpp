#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "taldiag/diagnosis.hpp"
#include "taldiag/loaders.hpp"
#include "taldiag/metrics.hpp"
#include "taldiag/synthetic.hpp"

#include "test_support.hpp"

using namespace taldiag;
using namespace taldiag::test;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "taldiag_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("spec validation rejects infeasible requests") {
  SyntheticSpec bad_mix;
  bad_mix.mixture = {0.5, 0.5, 0.5, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(generate_synthetic(bad_mix), std::invalid_argument);

  SyntheticSpec one_class;
  one_class.num_classes = 1;
  one_class.num_videos = 10;
  one_class.mixture = {0.5, 0.0, 0.5, 0.0, 0.0, 0.0};  // WL needs a second label
  CHECK_THROWS_AS(generate_synthetic(one_class), std::invalid_argument);

  SyntheticSpec dd_without_tp;
  dd_without_tp.mixture = {0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(generate_synthetic(dd_without_tp), std::invalid_argument);

  SyntheticSpec too_many_tp;
  too_many_tp.num_videos = 10;
  too_many_tp.num_classes = 2;
  too_many_tp.instances_per_video_weights = {1.0};  // exactly one instance per video
  too_many_tp.num_predictions = 100;
  too_many_tp.mixture = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(generate_synthetic(too_many_tp), std::invalid_argument);

  SyntheticSpec tight_alpha;
  tight_alpha.planting_alpha = 0.12;
  tight_alpha.mixture = {0.5, 0.0, 0.0, 0.5, 0.0, 0.0};
  CHECK_THROWS_AS(generate_synthetic(tight_alpha), std::invalid_argument);
}

TEST_CASE("every planted prediction satisfies its category rule against all ground truth") {
  SyntheticSpec spec;
  spec.seed = 101;
  spec.num_videos = 150;
  spec.num_classes = 5;
  spec.num_predictions = 600;
  const SyntheticOutput data = generate_synthetic(spec);
  REQUIRE(data.predictions.size() == 600);
  REQUIRE(data.planted.size() == 600);

  // direct rule check, independent of the classifier
  for (std::size_t p = 0; p < data.predictions.size(); ++p) {
    const Prediction& prediction = data.predictions[p];
    double best = 0.0;
    const GroundTruthInstance* reference = nullptr;
    for (const auto& g : data.dataset.instances) {
      if (g.video_id != prediction.video_id) continue;
      const double overlap = tiou(g.segment, prediction.segment);
      if (overlap > best) {
        best = overlap;
        reference = &g;
      }
    }
    switch (data.planted[p]) {
      case ErrorCategory::TruePositive:
      case ErrorCategory::DoubleDetection:
        REQUIRE(reference != nullptr);
        CHECK(best == 1.0);
        CHECK(reference->label == prediction.label);
        break;
      case ErrorCategory::WrongLabel:
        REQUIRE(reference != nullptr);
        CHECK(best == 1.0);
        CHECK(reference->label != prediction.label);
        break;
      case ErrorCategory::Localization:
        REQUIRE(reference != nullptr);
        CHECK(best >= 0.1);
        CHECK(best < spec.planting_alpha);
        CHECK(reference->label == prediction.label);
        break;
      case ErrorCategory::Confusion:
        REQUIRE(reference != nullptr);
        CHECK(best >= 0.1);
        CHECK(best < spec.planting_alpha);
        CHECK(reference->label != prediction.label);
        break;
      case ErrorCategory::Background:
        CHECK(best < 0.1);
        break;
    }
  }
}

TEST_CASE("the classifier recovers every planted verdict at the planting threshold") {
  SyntheticSpec spec;
  spec.seed = 103;
  spec.num_videos = 250;
  spec.num_classes = 8;
  spec.num_predictions = 1000;
  spec.mixture = {0.5, 0.1, 0.1, 0.2, 0.05, 0.05};
  const SyntheticOutput data = generate_synthetic(spec);

  EvaluationContext context(data.dataset, data.predictions);
  const MatchLayer layer = context.match_all(spec.planting_alpha);
  for (std::size_t p = 0; p < data.predictions.size(); ++p) {
    const ErrorVerdict v =
        classify_prediction(context, layer, p, spec.planting_alpha, 0.1);
    REQUIRE(v.category == data.planted[p]);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  SyntheticSpec spec;
  spec.seed = 107;
  spec.num_videos = 40;
  spec.num_classes = 3;
  spec.num_predictions = 150;
  const SyntheticOutput a = generate_synthetic(spec);
  const SyntheticOutput b = generate_synthetic(spec);
  CHECK(a.ground_truth_json.dump() == b.ground_truth_json.dump());
  CHECK(a.predictions_json.dump() == b.predictions_json.dump());
  CHECK(a.characteristics_json.dump() == b.characteristics_json.dump());
  CHECK(a.planted == b.planted);

  spec.seed = 108;
  const SyntheticOutput c = generate_synthetic(spec);
  CHECK(a.predictions_json.dump() != c.predictions_json.dump());
}

TEST_CASE("written files round-trip through the loaders with zero warnings") {
  SyntheticSpec spec;
  spec.seed = 109;
  spec.num_videos = 80;
  spec.num_classes = 4;
  spec.num_predictions = 300;
  const SyntheticOutput data = generate_synthetic(spec);
  const fs::path dir = temp_dir("roundtrip");
  write_synthetic_files(data, dir);

  GroundTruthLoad gt_load = load_ground_truth(dir / "ground_truth.json");
  CHECK(gt_load.warnings.empty());
  const auto char_warnings = load_characteristics(dir / "characteristics.json",
                                                  gt_load.dataset);
  CHECK(char_warnings.empty());
  PredictionsLoad pred_load = load_predictions(dir / "predictions.json", gt_load.dataset);
  CHECK(pred_load.warnings.empty());

  REQUIRE(gt_load.dataset.instances.size() == data.dataset.instances.size());
  REQUIRE(pred_load.predictions.size() == data.predictions.size());
  CHECK(validate_dataset(gt_load.dataset).empty());

  // the loaded dataset carries the same profiles the generator derived
  for (const auto& g : data.dataset.instances) {
    const CharacteristicProfile* generated = data.dataset.profile(g.instance_id);
    const CharacteristicProfile* loaded = gt_load.dataset.profile(g.instance_id);
    REQUIRE(loaded != nullptr);
    CHECK(generated->context_size == loaded->context_size);
    CHECK(generated->agreement_bucket == loaded->agreement_bucket);
    CHECK(generated->coverage_bucket == loaded->coverage_bucket);
  }
  // prediction ids follow file order and carry identical payloads
  for (std::size_t p = 0; p < data.predictions.size(); ++p) {
    CHECK(pred_load.predictions[p].prediction_id == data.predictions[p].prediction_id);
    CHECK(pred_load.predictions[p].video_id == data.predictions[p].video_id);
    CHECK(pred_load.predictions[p].score == data.predictions[p].score);
  }

  // evaluating the loaded copy reproduces the in-memory metrics bit for bit
  EvaluationConfig config;
  const double from_memory =
      average_map(data.dataset, data.predictions, config, true).average;
  const double from_files =
      average_map(gt_load.dataset, pred_load.predictions, config, true).average;
  CHECK(from_memory == from_files);

  // the sidecar lists one verdict per prediction
  const std::string sidecar = slurp(dir / "planted_verdicts.csv");
  std::size_t lines = 0;
  for (char c : sidecar) lines += c == '\n';
  CHECK(lines == data.predictions.size() + 1);
}

TEST_CASE("pure TP mixtures evaluate to a perfect score") {
  SyntheticSpec spec;
  spec.seed = 113;
  spec.num_videos = 30;
  spec.num_classes = 3;
  spec.instances_per_video_weights = {1.0};  // one instance per video
  spec.num_predictions = 30;                 // one exact copy each
  spec.mixture = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const SyntheticOutput data = generate_synthetic(spec);
  EvaluationConfig config;
  CHECK(average_map(data.dataset, data.predictions, config, false).average == 1.0);
  CHECK(average_map(data.dataset, data.predictions, config, true).average == 1.0);
}
