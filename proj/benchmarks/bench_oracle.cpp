#include <ocokit/functions.hpp>
#include <ocokit/offline.hpp>

#include <benchmark/benchmark.h>

using namespace ocokit;

static void BM_MinimizeQuadraticsClosedForm(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const auto ball = ProximalSetup::euclidean_ball(10, 1.0);
  const auto stream = streams::quadratic(rng, static_cast<int>(state.range(0)), ball, 1.0);
  const std::vector<double> w(stream.terms().size(), 1.0 / static_cast<double>(stream.terms().size()));
  for (auto _ : state) benchmark::DoNotOptimize(minimize_weighted_sum(stream.terms(), w, ball).value);
}
BENCHMARK(BM_MinimizeQuadraticsClosedForm)->Arg(256)->Arg(4096);

static void BM_MinimizeMaxAffine(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const auto s = ProximalSetup::entropy_simplex(10);
  const auto stream = streams::max_affine(rng, static_cast<int>(state.range(0)), 10, 5);
  const std::vector<double> w(stream.terms().size(), 1.0 / static_cast<double>(stream.terms().size()));
  for (auto _ : state) benchmark::DoNotOptimize(minimize_weighted_sum(stream.terms(), w, s).value);
}
BENCHMARK(BM_MinimizeMaxAffine)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_SolveMatrixGame(benchmark::State& state) {
  std::mt19937_64 rng(8);
  const Index n = state.range(0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Matrix A = Matrix::NullaryExpr(n, n, [&] { return u(rng); });
  const auto s = ProximalSetup::entropy_simplex(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_saddle(BilinearGame::matrix(A), s, s).gap);
}
BENCHMARK(BM_SolveMatrixGame)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
