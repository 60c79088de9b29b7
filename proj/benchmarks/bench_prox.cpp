#include <ocokit/prox.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace ocokit;

namespace {

Vector noise(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Vector::NullaryExpr(n, [&] { return g(rng); });
}

void run_prox(benchmark::State& state, const ProximalSetup& s) {
  std::mt19937_64 rng(1);
  const Vector c = s.sample(rng);
  const Vector xi = noise(rng, s.dim());
  for (auto _ : state) benchmark::DoNotOptimize(s.prox(c, xi));
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

static void BM_EntropyProx(benchmark::State& state) {
  run_prox(state, ProximalSetup::entropy_simplex(state.range(0)));
}
BENCHMARK(BM_EntropyProx)->RangeMultiplier(8)->Range(8, 4096);

static void BM_EuclideanSimplexProx(benchmark::State& state) {
  run_prox(state, ProximalSetup::euclidean_simplex(state.range(0)));
}
BENCHMARK(BM_EuclideanSimplexProx)->RangeMultiplier(8)->Range(8, 4096);

static void BM_BallProx(benchmark::State& state) {
  run_prox(state, ProximalSetup::euclidean_ball(state.range(0), 1.0));
}
BENCHMARK(BM_BallProx)->RangeMultiplier(8)->Range(8, 4096);

static void BM_ProductProx(benchmark::State& state) {
  const Index n = state.range(0);
  run_prox(state, ProximalSetup::product(ProximalSetup::entropy_simplex(n), ProximalSetup::euclidean_ball(n, 1.0),
                                         1.0, 1.0));
}
BENCHMARK(BM_ProductProx)->RangeMultiplier(8)->Range(8, 4096);

BENCHMARK_MAIN();
