// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Criterion 5 needs the released dataset annotation files and is
// skipped (not failed) when TALDIAG_ANET_GT / TALDIAG_ANET_CHAR are unset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <sys/resource.h>

#include "taldiag/analysis.hpp"
#include "taldiag/csv.hpp"
#include "taldiag/loaders.hpp"
#include "taldiag/metrics.hpp"
#include "taldiag/report.hpp"
#include "taldiag/svg.hpp"
#include "taldiag/synthetic.hpp"

#include "test_support.hpp"

using namespace taldiag;
using namespace taldiag::test;

namespace {

namespace fs = std::filesystem;

int g_failures = 0;

void report_line(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", id, name,
              detail.empty() ? "" : " - ", detail.c_str());
  if (!ok) ++g_failures;
}

void skip_line(int id, const char* name, const std::string& reason) {
  std::printf("[SKIP] criterion %d: %s - %s\n", id, name, reason.c_str());
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double peak_rss_gb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) / (1024.0 * 1024.0);  // KiB -> GiB
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

// --- criterion 1: AP oracle equivalence ------------------------------------
void criterion_ap_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(0x5eed0001);
  double worst = 0.0;
  int checked = 0;
  for (int round = 0; round < 1000; ++round) {
    RandomScene scene = random_scene(rng, 5, 8, 20);
    EvaluationContext context(scene.dataset, scene.predictions);
    const double n_const = uniform(rng, 0.5, 10.0);
    const double alpha = uniform(rng, 0.1, 0.95);
    for (std::size_t c = 0; c < context.class_count(); ++c) {
      const auto matches = context.match_class(c, alpha);
      const int g_count = static_cast<int>(context.class_slice(c).gt.size());
      const PRCurve curve = pr_curve(matches, g_count, n_const);
      std::vector<bool> verdicts;
      for (const auto& m : matches) verdicts.push_back(m.is_tp);
      for (bool normalized : {false, true}) {
        const double expected = ap_oracle(verdicts, g_count, n_const, normalized);
        const double actual = interpolated_ap(curve, normalized);
        worst = std::max(worst, std::abs(actual - expected));
        ++checked;
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool ok = worst <= 1e-9 && elapsed < 10.0;
  report_line(1, "AP equals brute-force PR enumeration on 1000 random instances", ok,
              fmt("max |delta| %.2e, %.2f s", worst, elapsed) + ", " +
                  std::to_string(checked) + " curves");
}

// --- criterion 2: planted-error recovery ------------------------------------
void criterion_planted_recovery() {
  const auto start = std::chrono::steady_clock::now();
  SyntheticSpec spec;
  spec.seed = 2;
  spec.num_videos = 250;
  spec.num_classes = 8;
  spec.num_predictions = 1000;
  spec.mixture = {0.50, 0.10, 0.10, 0.20, 0.05, 0.05};
  const SyntheticOutput data = generate_synthetic(spec);

  EvaluationContext context(data.dataset, data.predictions);
  const MatchLayer layer = context.match_all(spec.planting_alpha);
  int recovered = 0;
  for (std::size_t p = 0; p < data.predictions.size(); ++p) {
    const ErrorVerdict v = classify_prediction(context, layer, p, spec.planting_alpha, 0.1);
    recovered += v.category == data.planted[p];
  }

  EvaluationConfig config;
  config.tiou_thresholds = {spec.planting_alpha};
  const FPProfile profile = build_fp_profile(data.dataset, data.predictions, config);
  bool splits_ok = profile.retained_predictions == spec.num_predictions;
  for (const auto& split : profile.splits) {
    if (split.size == 0) continue;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      const double p = spec.mixture[c];
      const double sigma = std::sqrt(p * (1.0 - p) / split.size);
      splits_ok = splits_ok && std::abs(split.mean[c] - p) <= 3.0 * sigma + 1e-12;
    }
  }
  const double elapsed = seconds_since(start);
  const bool ok = recovered == spec.num_predictions && splits_ok && elapsed < 5.0;
  report_line(2, "planted verdicts recovered and split mixture within 3 sigma", ok,
              std::to_string(recovered) + "/1000 recovered, " +
                  fmt("%.2f s", elapsed));
}

// --- criterion 3: perfect-detector identities -------------------------------
void criterion_perfect_detector() {
  SyntheticSpec spec;
  spec.seed = 0x5eed0003;
  spec.num_videos = 60;
  spec.num_classes = 5;
  spec.num_predictions = 0;
  const SyntheticOutput data = generate_synthetic(spec);
  std::vector<Prediction> perfect;
  for (const auto& g : data.dataset.instances) {
    perfect.push_back({static_cast<PredictionId>(perfect.size()), g.video_id, g.label,
                       g.segment, 1.0});
  }
  EvaluationConfig config;
  const double plain = average_map(data.dataset, perfect, config, false).average;
  const double normalized = average_map(data.dataset, perfect, config, true).average;

  const SensitivityProfile profile = sensitivity_profile(data.dataset, perfect, config);
  bool sensitivity_zero = profile.entries.size() == kAllCharacteristics.size();
  for (const auto& entry : profile.entries) {
    sensitivity_zero = sensitivity_zero && entry.sensitivity == 0.0 && entry.impact == 0.0;
  }

  const FNReport fn = false_negatives(data.dataset, perfect, config);
  bool fn_zero = true;
  for (const auto& entry : fn.entries) {
    for (const auto& bucket : entry.buckets) {
      if (bucket.instance_count > 0) fn_zero = fn_zero && bucket.mean_rate == 0.0;
    }
  }
  for (const auto& grid : fn.pairwise) {
    for (const auto& row : grid.cells) {
      for (const auto& cell : row) {
        if (cell.mean_rate) fn_zero = fn_zero && *cell.mean_rate == 0.0;
      }
    }
  }

  const bool ok = plain == 1.0 && normalized == 1.0 && sensitivity_zero && fn_zero;
  report_line(3, "predictions == ground truth give exactly 1.0 / zero sensitivity / zero FN",
              ok, fmt("avg-mAP %.12f, avg-mAP_N %.12f", plain, normalized));
}

// --- criterion 4: FP-removal monotonicity ------------------------------------
void criterion_removal_monotonicity() {
  std::mt19937_64 rng(0x5eed0004);
  EvaluationConfig config;
  double worst = 0.0;
  for (int round = 0; round < 200; ++round) {
    RandomScene scene = random_scene(rng);
    if (scene.predictions.empty()) continue;
    const ErrorImpact impact = error_impact(scene.dataset, scene.predictions, config);
    for (const auto& entry : impact.categories) {
      for (std::size_t t = 0; t < impact.thresholds.size(); ++t) {
        worst = std::min(worst,
                         entry.per_threshold_after[t] - impact.baseline_per_threshold[t]);
      }
    }
  }
  report_line(4, "removing any FP category never lowers mAP_N at any threshold",
              worst >= -1e-12, fmt("worst delta %.2e", worst));
}

// --- criterion 5: released-annotation distributions -------------------------
struct BucketStats {
  double zero_context = 0.0;
  double far_context = 0.0;
  double xw_agreement = 0.0;
  double at_least_mid_agreement = 0.0;
  double xs_coverage = 0.0;
  double xl_coverage = 0.0;
  double xs_length = 0.0;
  double single_instance = 0.0;
  double mean_agreement = 0.0;
};

void criterion_dataset_distributions() {
  const char* gt_path = std::getenv("TALDIAG_ANET_GT");
  const char* char_path = std::getenv("TALDIAG_ANET_CHAR");
  if (gt_path == nullptr || char_path == nullptr) {
    skip_line(5, "released characteristic annotation distributions",
              "set TALDIAG_ANET_GT and TALDIAG_ANET_CHAR to the converted annotation "
              "files to enable this check");
    return;
  }
  try {
    GroundTruthLoad gt_load = load_ground_truth(gt_path);
    load_characteristics(char_path, gt_load.dataset);
    const Dataset& ds = gt_load.dataset;

    BucketStats stats;
    double context_total = 0.0, agreement_total = 0.0, total = 0.0, score_total = 0.0;
    for (const auto& g : ds.instances) {
      const CharacteristicProfile* p = ds.profile(g.instance_id);
      total += 1.0;
      if (p->context_size) {
        context_total += 1.0;
        stats.zero_context += *p->context_size == 0;
      }
      if (p->context_distance) {
        stats.far_context += *p->context_distance == ContextDistance::Far;
      }
      if (p->agreement_bucket) {
        agreement_total += 1.0;
        stats.xw_agreement += *p->agreement_bucket == AgreementBucket::XW;
        stats.at_least_mid_agreement += *p->agreement_bucket >= AgreementBucket::M;
      }
      if (p->agreement_score) score_total += *p->agreement_score;
      stats.xs_coverage += *p->coverage_bucket == SizeBucket::XS;
      stats.xl_coverage += *p->coverage_bucket == SizeBucket::XL;
      stats.xs_length += *p->length_bucket == SizeBucket::XS;
      stats.single_instance += *p->num_instances == 1;
    }
    auto pct = [](double n, double d) { return d > 0.0 ? 100.0 * n / d : -1.0; };
    struct Check {
      const char* name;
      double actual;
      double expected;
    };
    const std::vector<Check> checks = {
        {"zero context", pct(stats.zero_context, context_total), 6.9},
        {"far context", pct(stats.far_context, context_total), 69.9},
        {"XW agreement", pct(stats.xw_agreement, agreement_total), 2.1},
        {">= Mid agreement", pct(stats.at_least_mid_agreement, agreement_total), 83.8},
        {"XS coverage", pct(stats.xs_coverage, total), 42.4},
        {"XL coverage", pct(stats.xl_coverage, total), 27.4},
        {"XS length", pct(stats.xs_length, total), 54.4},
        {"single instance", pct(stats.single_instance, total), 50.0},
        {"mean agreement", pct(score_total, agreement_total), 64.1},
    };
    bool ok = true;
    std::string detail;
    for (const auto& check : checks) {
      const bool within = std::abs(check.actual - check.expected) <= 0.5;
      ok = ok && within;
      if (!within) {
        detail += std::string(check.name) + " " + fmt("%.2f vs %.2f; ", check.actual,
                                                      check.expected);
      }
    }
    report_line(5, "released characteristic annotation distributions", ok,
                ok ? std::string("all nine figures within 0.5pp") : detail);
  } catch (const std::exception& e) {
    report_line(5, "released characteristic annotation distributions", false, e.what());
  }
}

// --- criterion 6: qualitative trend ------------------------------------------
void criterion_localization_dominates() {
  SyntheticSpec spec;
  spec.seed = 0x5eed0006;
  spec.num_videos = 300;
  spec.num_classes = 8;
  spec.num_predictions = 1500;
  spec.mixture = {0.40, 0.04, 0.04, 0.40, 0.06, 0.06};  // localization-weak detector
  const SyntheticOutput data = generate_synthetic(spec);
  EvaluationConfig config;
  const ErrorImpact impact = error_impact(data.dataset, data.predictions, config);
  const double loc = impact.categories[2].delta;
  bool dominant = true;
  std::string detail;
  for (const auto& entry : impact.categories) {
    detail += std::string(short_code(entry.category)) + " " +
              fmt("%+.2f ", entry.delta * 100.0);
    if (entry.category != ErrorCategory::Localization) {
      dominant = dominant && loc > entry.delta;
    }
  }
  report_line(6, "planted localization weakness makes LOC removal the largest gain",
              dominant, detail);
}

// --- criterion 7: scale and performance --------------------------------------
void criterion_scale() {
  SyntheticSpec spec;
  spec.seed = 0x5eed0007;
  spec.num_videos = 20000;
  spec.num_classes = 200;
  spec.instances_per_video_weights = {0.88, 0.09, 0.02, 0.01};  // ~1.16 per video
  spec.num_predictions = 230000;
  spec.mixture = {0.09, 0.03, 0.05, 0.23, 0.10, 0.50};
  const auto generation_start = std::chrono::steady_clock::now();
  const SyntheticOutput data = generate_synthetic(spec);
  const double generation_s = seconds_since(generation_start);

  const auto start = std::chrono::steady_clock::now();
  DiagnosisOptions options;
  options.timestamp_override = "2026-01-01T00:00:00Z";
  const DiagnosisReport report = diagnose(data.dataset, data.predictions, options);

  const fs::path dir = fs::temp_directory_path() / "taldiag_acceptance_scale";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << dump_json_fixed(report_to_json(report));
  }
  EvaluationContext context(data.dataset, data.predictions);
  const VerdictTable verdicts = classify_all(context, report.config);
  write_verdicts_csv(dir / "verdicts.csv", context, verdicts);
  write_fp_profile_csv(dir / "fp_profile.csv", report.fp_profile);
  write_error_impact_csv(dir / "error_impact.csv", report.impact);
  {
    std::ofstream out(dir / "fp_profile.svg", std::ios::binary);
    out << fp_profile_svg(report.fp_profile);
  }
  if (report.sensitivity) {
    write_sensitivity_csv(dir / "sensitivity.csv", *report.sensitivity);
    std::ofstream out(dir / "sensitivity.svg", std::ios::binary);
    out << sensitivity_svg(*report.sensitivity);
  }
  if (report.false_negatives) {
    write_fn_rates_csv(dir / "fn_rates.csv", *report.false_negatives);
    for (const auto& pair : report.false_negatives->pairwise) {
      write_fn_pairwise_csv(dir / ("fn_" + std::string(to_string(pair.rows)) + "_x_" +
                                   std::string(to_string(pair.cols)) + ".csv"),
                            pair);
    }
  }
  const double elapsed = seconds_since(start);
  const double rss = peak_rss_gb();

  const bool size_ok = data.dataset.instances.size() > 20000 &&
                       data.predictions.size() == 230000 &&
                       report.config.tiou_thresholds.size() == 10;
  const bool ok = size_ok && elapsed < 60.0 && rss < 2.0;
  report_line(7, "ActivityNet-scale diagnosis within 60 s and 2 GB", ok,
              fmt("diagnosis+report %.1f s, peak rss %.2f GB", elapsed, rss) +
                  fmt(", generation %.1f s", generation_s) + ", " +
                  std::to_string(data.dataset.instances.size()) + " instances");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  criterion_ap_oracle();
  criterion_planted_recovery();
  criterion_perfect_detector();
  criterion_removal_monotonicity();
  criterion_dataset_distributions();
  criterion_localization_dominates();
  criterion_scale();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all runnable criteria passed\n");
  return 0;
}
