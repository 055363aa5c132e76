#include <benchmark/benchmark.h>

#include "taldiag/analysis.hpp"
#include "taldiag/diagnosis.hpp"
#include "taldiag/metrics.hpp"
#include "taldiag/report.hpp"
#include "taldiag/synthetic.hpp"

namespace {

using namespace taldiag;

SyntheticOutput make_benchmark_data(int videos, int classes, int predictions) {
  SyntheticSpec spec;
  spec.seed = 9001;
  spec.num_videos = videos;
  spec.num_classes = classes;
  spec.num_predictions = predictions;
  spec.mixture = {0.12, 0.04, 0.08, 0.26, 0.10, 0.40};
  return generate_synthetic(spec);
}

void BM_Generate(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        make_benchmark_data(static_cast<int>(state.range(0)), 50,
                            static_cast<int>(state.range(0)) * 10));
  }
}
BENCHMARK(BM_Generate)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_MatchAll(benchmark::State& state) {
  const SyntheticOutput data =
      make_benchmark_data(static_cast<int>(state.range(0)), 100,
                          static_cast<int>(state.range(0)) * 12);
  EvaluationContext context(data.dataset, data.predictions);
  for (auto _ : state) {
    benchmark::DoNotOptimize(context.match_all(0.5));
  }
}
BENCHMARK(BM_MatchAll)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_AverageMapNormalized(benchmark::State& state) {
  const SyntheticOutput data =
      make_benchmark_data(static_cast<int>(state.range(0)), 100,
                          static_cast<int>(state.range(0)) * 12);
  EvaluationConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(average_map(data.dataset, data.predictions, config, true));
  }
}
BENCHMARK(BM_AverageMapNormalized)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FullDiagnosis(benchmark::State& state) {
  const SyntheticOutput data =
      make_benchmark_data(static_cast<int>(state.range(0)), 50,
                          static_cast<int>(state.range(0)) * 12);
  DiagnosisOptions options;
  options.timestamp_override = "2026-01-01T00:00:00Z";
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagnose(data.dataset, data.predictions, options));
  }
}
BENCHMARK(BM_FullDiagnosis)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_FalseNegatives(benchmark::State& state) {
  const SyntheticOutput data =
      make_benchmark_data(static_cast<int>(state.range(0)), 100,
                          static_cast<int>(state.range(0)) * 12);
  EvaluationConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(false_negatives(data.dataset, data.predictions, config));
  }
}
BENCHMARK(BM_FalseNegatives)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
