#include "doctest.h"

#include <cmath>

#include "taldiag/analysis.hpp"
#include "taldiag/synthetic.hpp"

#include "test_support.hpp"

using namespace taldiag;
using namespace taldiag::test;

namespace {

std::vector<Prediction> perfect_predictions(const Dataset& ds) {
  std::vector<Prediction> out;
  for (const auto& g : ds.instances) {
    out.push_back(pred(static_cast<PredictionId>(out.size()), g.video_id, g.label,
                       g.segment.start, g.segment.end, 1.0));
  }
  return out;
}

std::unordered_set<InstanceId> all_ids(const Dataset& ds) {
  std::unordered_set<InstanceId> ids;
  for (const auto& g : ds.instances) ids.insert(g.instance_id);
  return ids;
}

}  // namespace

TEST_CASE("subset evaluation identities") {
  SyntheticSpec spec;
  spec.seed = 71;
  spec.num_videos = 80;
  spec.num_classes = 4;
  spec.num_predictions = 300;
  const SyntheticOutput data = generate_synthetic(spec);
  EvaluationConfig config;

  SUBCASE("whole-dataset subset equals the overall metric") {
    const double overall =
        average_map(data.dataset, data.predictions, config, true).average;
    const auto subset =
        subset_evaluation(data.dataset, data.predictions, config, all_ids(data.dataset));
    REQUIRE(subset.has_value());
    CHECK(*subset == doctest::Approx(overall).epsilon(1e-12));
  }
  SUBCASE("empty bucket reports absent, never zero") {
    CHECK_FALSE(subset_evaluation(data.dataset, data.predictions, config, {}).has_value());
  }
  SUBCASE("perfect predictions score 1.0 on any bucket") {
    const auto perfect = perfect_predictions(data.dataset);
    for (const std::string& label : bucket_labels(Characteristic::Coverage)) {
      const auto score = subset_evaluation(data.dataset, perfect, config,
                                           Characteristic::Coverage, label);
      if (score) CHECK(*score == 1.0);
    }
  }
  SUBCASE("subset keeps the full-dataset normalization constant") {
    // half the instances; an explicit N equal to the full-dataset default
    // must reproduce the implicit behavior
    std::vector<InstanceId> half;
    for (const auto& g : data.dataset.instances) {
      if (g.instance_id % 2 == 0) half.push_back(g.instance_id);
    }
    const auto implicit = subset_evaluation(
        data.dataset, data.predictions, config,
        std::unordered_set<InstanceId>(half.begin(), half.end()));
    EvaluationConfig pinned = config;
    pinned.normalization_constant = resolve_normalization_constant(config, data.dataset);
    const auto explicit_n = subset_evaluation(
        data.dataset, data.predictions, pinned,
        std::unordered_set<InstanceId>(half.begin(), half.end()));
    REQUIRE(implicit.has_value());
    CHECK(*implicit == *explicit_n);
  }
}

TEST_CASE("sensitivity profile identities") {
  SyntheticSpec spec;
  spec.seed = 73;
  spec.num_videos = 100;
  spec.num_classes = 4;
  spec.num_predictions = 0;
  const SyntheticOutput data = generate_synthetic(spec);
  EvaluationConfig config;

  SUBCASE("perfect predictions have zero sensitivity everywhere") {
    const auto perfect = perfect_predictions(data.dataset);
    const SensitivityProfile profile = sensitivity_profile(data.dataset, perfect, config);
    CHECK(profile.overall == 1.0);
    CHECK(profile.entries.size() == kAllCharacteristics.size());
    for (const auto& entry : profile.entries) {
      CHECK(entry.sensitivity == doctest::Approx(0.0));
      CHECK(entry.impact == doctest::Approx(0.0));
      for (const auto& bucket : entry.buckets) {
        if (bucket.average_map_n) CHECK(*bucket.average_map_n == 1.0);
      }
    }
  }
  SUBCASE("the overall line matches average_map on the same config") {
    SyntheticSpec mixed = spec;
    mixed.num_predictions = 250;
    mixed.seed = 74;
    const SyntheticOutput noisy = generate_synthetic(mixed);
    const SensitivityProfile profile =
        sensitivity_profile(noisy.dataset, noisy.predictions, config);
    const double overall =
        average_map(noisy.dataset, noisy.predictions, config, true).average;
    CHECK(profile.overall == overall);
  }
  SUBCASE("characteristics without data are omitted with a notice") {
    Dataset plain = make_dataset({video("a", 100.0)},
                                 {gt(0, "a", "x", 0, 10), gt(1, "a", "x", 40, 80)});
    const SensitivityProfile profile =
        sensitivity_profile(plain, perfect_predictions(plain), config);
    // coverage, length, num_instances derive from the dataset itself
    CHECK(profile.entries.size() == 3);
    CHECK(profile.notices.size() == 3);
  }
}

TEST_CASE("degrading one bucket makes its characteristic the most sensitive") {
  SyntheticSpec spec;
  spec.seed = 77;
  spec.num_videos = 600;
  spec.num_classes = 6;
  spec.num_predictions = 600;
  spec.mixture = {0.55, 0.0, 0.0, 0.35, 0.0, 0.10};
  spec.degrade = {{Characteristic::Coverage, "XS"}};
  const SyntheticOutput data = generate_synthetic(spec);
  EvaluationConfig config;
  const SensitivityProfile profile =
      sensitivity_profile(data.dataset, data.predictions, config);

  double coverage_sensitivity = -1.0;
  const SensitivityProfile::Entry* coverage_entry = nullptr;
  for (const auto& entry : profile.entries) {
    if (entry.characteristic == Characteristic::Coverage) {
      coverage_sensitivity = entry.sensitivity;
      coverage_entry = &entry;
    }
  }
  REQUIRE(coverage_entry != nullptr);
  // the degraded bucket is present and scores exactly zero
  REQUIRE(coverage_entry->buckets[0].label == "XS");
  REQUIRE(coverage_entry->buckets[0].instance_count > 0);
  REQUIRE(coverage_entry->buckets[0].average_map_n.has_value());
  CHECK(*coverage_entry->buckets[0].average_map_n == 0.0);
  for (const auto& entry : profile.entries) {
    if (entry.characteristic == Characteristic::Coverage) continue;
    CHECK(coverage_sensitivity > entry.sensitivity);
  }
}

TEST_CASE("false negative identities") {
  SyntheticSpec spec;
  spec.seed = 79;
  spec.num_videos = 60;
  spec.num_classes = 3;
  spec.num_predictions = 0;
  const SyntheticOutput data = generate_synthetic(spec);
  EvaluationConfig config;

  SUBCASE("perfect predictions miss nothing") {
    const FNReport report =
        false_negatives(data.dataset, perfect_predictions(data.dataset), config);
    for (const auto& entry : report.entries) {
      for (const auto& bucket : entry.buckets) {
        if (bucket.instance_count == 0) continue;
        CHECK(bucket.mean_rate == 0.0);
        for (double rate : bucket.rate_per_threshold) CHECK(rate == 0.0);
      }
    }
  }
  SUBCASE("no predictions miss everything") {
    const FNReport report = false_negatives(data.dataset, {}, config);
    for (const auto& entry : report.entries) {
      for (const auto& bucket : entry.buckets) {
        if (bucket.instance_count == 0) continue;
        CHECK(bucket.mean_rate == 1.0);
      }
    }
    for (const auto& grid : report.pairwise) {
      for (const auto& row : grid.cells) {
        for (const auto& cell : row) {
          if (cell.mean_rate) CHECK(*cell.mean_rate == 1.0);
        }
      }
    }
  }
  SUBCASE("rates stay within [0,1] and empty buckets stay absent") {
    SyntheticSpec noisy = spec;
    noisy.num_predictions = 200;
    noisy.seed = 80;
    const SyntheticOutput sample = generate_synthetic(noisy);
    const FNReport report = false_negatives(sample.dataset, sample.predictions, config);
    for (const auto& entry : report.entries) {
      for (const auto& bucket : entry.buckets) {
        if (bucket.instance_count == 0) {
          for (int missed : bucket.missed_per_threshold) CHECK(missed == 0);
          continue;
        }
        CHECK(bucket.mean_rate >= 0.0);
        CHECK(bucket.mean_rate <= 1.0);
      }
    }
  }
}

TEST_CASE("a degraded bucket is missed completely, the rest is not") {
  SyntheticSpec spec;
  spec.seed = 83;
  spec.num_videos = 350;
  spec.num_classes = 5;
  spec.num_predictions = 600;
  spec.mixture = {0.9, 0.0, 0.0, 0.05, 0.0, 0.05};
  spec.degrade = {{Characteristic::Agreement, "XW"}};
  const SyntheticOutput data = generate_synthetic(spec);
  EvaluationConfig config;
  const FNReport report = false_negatives(data.dataset, data.predictions, config);

  for (const auto& entry : report.entries) {
    if (entry.characteristic != Characteristic::Agreement) continue;
    REQUIRE(entry.buckets[0].label == "XW");
    REQUIRE(entry.buckets[0].instance_count > 0);
    CHECK(entry.buckets[0].mean_rate == 1.0);
    // healthy buckets retain detections
    bool any_detected = false;
    for (std::size_t b = 1; b < entry.buckets.size(); ++b) {
      if (entry.buckets[b].instance_count > 0 && entry.buckets[b].mean_rate < 1.0) {
        any_detected = true;
      }
    }
    CHECK(any_detected);
  }
}

TEST_CASE("adding a matching detection above the cutoff cures the miss") {
  Dataset ds = make_dataset({video("a", 200.0)},
                            {gt(0, "a", "x", 0, 20), gt(1, "a", "x", 100, 140)});
  EvaluationConfig config;
  config.tiou_thresholds = {0.5};

  std::vector<Prediction> only_one = {pred(0, "a", "x", 0, 20, 0.9)};
  const FNReport before = false_negatives(ds, only_one, config);
  // instance 1 is missed: one instance per coverage bucket tells which
  int missed_before = 0;
  for (const auto& bucket : before.entries.front().buckets) {
    for (int missed : bucket.missed_per_threshold) missed_before += missed;
  }
  CHECK(missed_before == 1);

  std::vector<Prediction> both = {pred(0, "a", "x", 0, 20, 0.9),
                                  pred(1, "a", "x", 100, 140, 0.8)};
  const FNReport after = false_negatives(ds, both, config);
  int missed_after = 0;
  for (const auto& bucket : after.entries.front().buckets) {
    for (int missed : bucket.missed_per_threshold) missed_after += missed;
  }
  CHECK(missed_after == 0);
}

TEST_CASE("classes that never reach the precision cutoff miss everything") {
  Dataset ds = make_dataset({video("a", 400.0)},
                            {gt(0, "a", "x", 0, 20), gt(1, "a", "x", 50, 70)});
  EvaluationConfig config;
  config.tiou_thresholds = {0.5};
  // a tiny N keeps R*N negligible against the FP count, so P_N stays below
  // 0.05 at every rank
  config.normalization_constant = 1.0e-4;
  std::vector<Prediction> predictions;
  for (int i = 0; i < 30; ++i) {
    predictions.push_back(pred(i, "a", "x", 200 + i * 5, 204 + i * 5, 0.99 - 0.01 * i));
  }
  predictions.push_back(pred(99, "a", "x", 0, 20, 0.01));
  const FNReport report = false_negatives(ds, predictions, config);
  for (const auto& bucket : report.entries.front().buckets) {
    if (bucket.instance_count == 0) continue;
    CHECK(bucket.mean_rate == 1.0);
  }
}

TEST_CASE("pairwise marginals reproduce the single-characteristic rates") {
  SyntheticSpec spec;
  spec.seed = 89;
  spec.num_videos = 200;
  spec.num_classes = 4;
  spec.num_predictions = 600;
  const SyntheticOutput data = generate_synthetic(spec);
  EvaluationConfig config;
  const FNReport report = false_negatives(data.dataset, data.predictions, config);

  for (const auto& grid : report.pairwise) {
    const FNReport::Entry* row_entry = nullptr;
    for (const auto& entry : report.entries) {
      if (entry.characteristic == grid.rows) row_entry = &entry;
    }
    REQUIRE(row_entry != nullptr);
    for (std::size_t r = 0; r < grid.row_labels.size(); ++r) {
      double weighted = 0.0;
      int population = 0;
      for (std::size_t c = 0; c < grid.col_labels.size(); ++c) {
        const auto& cell = grid.cells[r][c];
        if (!cell.mean_rate) continue;
        weighted += *cell.mean_rate * cell.instance_count;
        population += cell.instance_count;
      }
      const auto& bucket = row_entry->buckets[r];
      CHECK(population == bucket.instance_count);
      if (population > 0) {
        CHECK(weighted / population == doctest::Approx(bucket.mean_rate).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("averaging FN reports across methods") {
  SyntheticSpec spec;
  spec.seed = 97;
  spec.num_videos = 60;
  spec.num_classes = 3;
  spec.num_predictions = 200;
  const SyntheticOutput a = generate_synthetic(spec);
  spec.seed = 98;
  const SyntheticOutput b = generate_synthetic(spec);  // same layout driver, new seed

  EvaluationConfig config;
  const FNReport fa = false_negatives(a.dataset, a.predictions, config);
  const FNReport fb = false_negatives(a.dataset, {}, config);  // all missed
  const FNReport mean = average_fn_reports({fa, fb});
  for (std::size_t e = 0; e < mean.entries.size(); ++e) {
    for (std::size_t k = 0; k < mean.entries[e].buckets.size(); ++k) {
      const auto& bucket = mean.entries[e].buckets[k];
      if (bucket.instance_count == 0) continue;
      const double expected = (fa.entries[e].buckets[k].mean_rate + 1.0) / 2.0;
      CHECK(bucket.mean_rate == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  (void)b;
}
