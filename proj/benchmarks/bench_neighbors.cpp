#include <benchmark/benchmark.h>

#include <random>

#include "frontier/rng.hpp"
#include "frontier/tax.hpp"

using namespace frontier;

namespace {

std::vector<TaxUnit> random_units(std::size_t n) {
  auto rng = make_rng(5, 0);
  std::uniform_real_distribution<double> coord(0.0, 20000.0);
  std::vector<TaxUnit> units(n);
  for (auto& u : units) {
    u.x = coord(rng);
    u.y = coord(rng);
  }
  return units;
}

}  // namespace

static void BM_BuildNeighbors(benchmark::State& state) {
  const auto units = random_units(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_neighbors(units, 500.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildNeighbors)->Arg(1000)->Arg(10000);

static void BM_RampMin(benchmark::State& state) {
  auto rng = make_rng(7, 0);
  std::uniform_real_distribution<double> d(-500.0, 500.0);
  std::vector<double> a(state.range(0)), b(state.range(0));
  for (std::size_t j = 0; j < a.size(); ++j) {
    a[j] = d(rng);
    b[j] = d(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_max_affine_ramps(a, b));
  }
}
BENCHMARK(BM_RampMin)->Arg(10)->Arg(80);
