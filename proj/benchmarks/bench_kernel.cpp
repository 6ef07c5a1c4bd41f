#include <benchmark/benchmark.h>

#include "icg/analysis.hpp"
#include "icg/kernel.hpp"
#include "icg/normal.hpp"
#include "icg/processes.hpp"

namespace {

using namespace icg;

void BM_NormalCdf(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normal_cdf(x));
    x = x < 4.0 ? x + 1e-6 : -4.0;
  }
}
BENCHMARK(BM_NormalCdf);

void BM_NormalQuantile(benchmark::State& state) {
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normal_quantile(p));
    p = p < 0.99 ? p + 1e-6 : 0.01;
  }
}
BENCHMARK(BM_NormalQuantile);

void BM_ThresholdStep(benchmark::State& state) {
  double A = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(threshold_step(0.25, A, 1.0));
  }
}
BENCHMARK(BM_ThresholdStep)->Arg(1)->Arg(100)->Arg(10000);

void BM_GammaStep(benchmark::State& state) {
  double A = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_step(0.6745, A));
  }
}
BENCHMARK(BM_GammaStep)->Arg(1)->Arg(100)->Arg(10000);

void BM_ThresholdPathIid(benchmark::State& state) {
  std::size_t T = static_cast<std::size_t>(state.range(0));
  GameConfig config(1.0, 0.75);
  PosteriorSchedule schedule = materialize(IidSignals{1.0}, T);
  for (auto _ : state) {
    benchmark::DoNotOptimize(threshold_path(config, schedule, T));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(T));
}
BENCHMARK(BM_ThresholdPathIid)->Arg(100)->Arg(1000)->Arg(10000);

void BM_LimitThresholdIid(benchmark::State& state) {
  GameConfig config(1.0, 0.75);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        limit_threshold(config, IidSignals{1.0}, 1e-6, 100000));
  }
}
BENCHMARK(BM_LimitThresholdIid);

void BM_GammaTailProbe(benchmark::State& state) {
  GameConfig config(1.0, 0.75);
  std::size_t T = static_cast<std::size_t>(state.range(0));
  LearningSpec spec = PowerPrecision{900.0, 3.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_tail_probe(config, spec, T, 100));
  }
}
BENCHMARK(BM_GammaTailProbe)->Arg(100000)->Arg(10000000);

}  // namespace

BENCHMARK_MAIN();
