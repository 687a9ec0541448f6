#include <benchmark/benchmark.h>

#include "frontier/rng.hpp"
#include "frontier/truncnorm.hpp"

using namespace frontier;

static void BM_NormLogCdf(benchmark::State& state) {
  double x = -12.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(norm_log_cdf(x));
    x = x < 4.0 ? x + 0.01 : -12.0;
  }
}
BENCHMARK(BM_NormLogCdf);

static void BM_TnSample(benchmark::State& state) {
  auto rng = make_rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tn_sample(0.4, 0.2, rng));
  }
}
BENCHMARK(BM_TnSample);

static void BM_SolveSigmaU(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_sigma_u(0.38, 0.03));
  }
}
BENCHMARK(BM_SolveSigmaU);
