#include <benchmark/benchmark.h>

#include "frontier/frontier_fit.hpp"
#include "frontier/likelihood.hpp"
#include "frontier/synth.hpp"
#include "frontier/variance.hpp"

using namespace frontier;

namespace {

GeneratedPanel bench_panel(int blocs) {
  std::vector<HeightParams> truth;
  PanelShape shape;
  for (int h = 1; h <= 8; ++h) {
    truth.push_back({h, 8.85, 0.38, 0.2, 0.08, 0.05});
    shape.push_back(shape_from_counts(h, blocs, blocs * 2, blocs * 9, 0.5, 7 + h));
  }
  return generate_panel(truth, shape, 11);
}

}  // namespace

static void BM_LoglikHeight(benchmark::State& state) {
  const auto gen = bench_panel(static_cast<int>(state.range(0)));
  const auto stats = make_height_stats(gen.panel.groups[0], 0.08, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loglik_height(stats, 8.8, 0.38, 0.2));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LoglikHeight)->Arg(100)->Arg(1000);

static void BM_ProfileHeight(benchmark::State& state) {
  const auto gen = bench_panel(200);
  const auto stats = make_height_stats(gen.panel.groups[0], 0.08, 0.05);
  const auto g_grid = default_g_grid(gen.panel.groups[0], GridConfig{});
  const auto mu_grid = default_mu_grid(0.035, GridConfig{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(profile_height(stats, g_grid, mu_grid, 0.035));
  }
}
BENCHMARK(BM_ProfileHeight);

static void BM_FitConstrained(benchmark::State& state) {
  const auto gen = bench_panel(150);
  auto variances = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  smooth_variances(variances);
  const auto profiles = compute_profiles(gen.panel, variances, GridConfig{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_constrained(profiles));
  }
}
BENCHMARK(BM_FitConstrained);
