#include <ocokit/regret.hpp>

#include <benchmark/benchmark.h>

using namespace ocokit;

// Engine cost alone: no per-step inequality checks, no comparator solve.
static void BM_MirrorDescentSimplex(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const auto s = ProximalSetup::entropy_simplex(10);
  const auto stream = streams::max_affine(rng, T, 10, 5);
  const auto theta = WeightSchedule::uniform(T);
  StepParams p;
  p.omega = s.set_width();
  p.G = stream.lipschitz_bound(s);
  const auto steps = StepSchedule::make(StepKind::kConstantNonsmooth, p, theta);
  EngineOptions quiet;
  quiet.check_inequality = false;
  for (auto _ : state) {
    auto trace = mirror_descent(
        s, steps, [&](int t, const Vector& x) -> Vector { return theta(t) * stream.subgradient(t, x); }, quiet);
    benchmark::DoNotOptimize(trace.final_center.data());
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_MirrorDescentSimplex)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_MirrorProxBall(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const auto s = ProximalSetup::euclidean_ball(10, 1.0);
  const auto stream = streams::quadratic(rng, T, s, 1.0);
  const auto theta = WeightSchedule::uniform(T);
  StepParams p;
  p.L = stream.smoothness();
  const auto steps = StepSchedule::make(StepKind::kConstantSmooth, p, theta);
  const Feed feed = [&](int t, const Vector& x) -> Vector { return theta(t) * stream.subgradient(t, x); };
  EngineOptions quiet;
  quiet.check_inequality = false;
  for (auto _ : state) {
    auto trace = mirror_prox(s, steps, feed, feed, quiet);
    benchmark::DoNotOptimize(trace.final_center.data());
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_MirrorProxBall)->Arg(256)->Arg(1024)->Arg(4096);

// Overhead of checking the per-step inequality at the default comparators.
static void BM_MirrorDescentChecked(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto s = ProximalSetup::entropy_simplex(10);
  const auto stream = streams::max_affine(rng, 1024, 10, 5);
  EngineOptions opts;
  for (int k = 0; k < static_cast<int>(state.range(0)); ++k) opts.comparators.push_back(s.sample(rng));
  for (auto _ : state) benchmark::DoNotOptimize(run_oco(Regime::kNonsmooth, s, stream, opts).report.realized);
}
BENCHMARK(BM_MirrorDescentChecked)->Arg(0)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_OnlineSaddle(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const Index n = state.range(0);
  const auto games = streams::bilinear(rng, 512, n, n, 0.2);
  const auto product = balanced_product(ProximalSetup::entropy_simplex(n), ProximalSetup::entropy_simplex(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_online_saddle(Regime::kSmooth, product, games).report.realized);
  }
}
BENCHMARK(BM_OnlineSaddle)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
