#include <ocokit/robust.hpp>

#include <benchmark/benchmark.h>

using namespace ocokit;

// One full feasibility decision at the bound-derived horizon.
static void BM_RobustScheme(benchmark::State& state) {
  const auto scheme = static_cast<Scheme>(state.range(0));
  std::mt19937_64 rng(9);
  PlantOptions po;
  po.eps = 0.1;
  const auto planted = plant_instance(rng, po);
  FeasibilityConfig fc;
  fc.eps = po.eps;
  fc.scheme = scheme;
  fc.allow_doubling = false;
  for (auto _ : state) benchmark::DoNotOptimize(run_scheme(planted.instance, fc).horizon);
  state.SetLabel(to_string(scheme));
}
BENCHMARK(BM_RobustScheme)
    ->Arg(static_cast<int>(Scheme::kStrongStrong))
    ->Arg(static_cast<int>(Scheme::kStrongUSmoothX))
    ->Arg(static_cast<int>(Scheme::kSmoothUStrongX))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
