#include "support/reference.hpp"

#include <ocokit/engine.hpp>
#include <ocokit/errors.hpp>
#include <ocokit/functions.hpp>
#include <ocokit/schedule.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace ocokit;

TEST(Weights, Uniform) {
  const auto w = WeightSchedule::uniform(4);
  for (int t = 1; t <= 4; ++t) EXPECT_DOUBLE_EQ(w(t), 0.25);
  EXPECT_DOUBLE_EQ(w.sup(), 0.25);
}

TEST(Weights, IncreasingLinear) {
  const auto w = WeightSchedule::increasing_linear(3);
  EXPECT_DOUBLE_EQ(w(1), 2.0 / 12);
  EXPECT_DOUBLE_EQ(w(2), 4.0 / 12);
  EXPECT_DOUBLE_EQ(w(3), 6.0 / 12);
  EXPECT_DOUBLE_EQ(w.sup(), 0.5);
}

TEST(Weights, SumToOne) {
  for (int T : {1, 2, 7, 100, 4096}) {
    for (auto kind : {WeightKind::kUniform, WeightKind::kIncreasingLinear}) {
      const auto v = WeightSchedule::make(kind, T).values();
      EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 1.0, 1e-12);
    }
  }
}

TEST(Weights, CustomValidation) {
  EXPECT_NO_THROW(WeightSchedule::custom({0.2, 0.3, 0.5}));
  EXPECT_THROW(WeightSchedule::custom({0.2, 0.3}), ConfigError);
  EXPECT_THROW(WeightSchedule::custom({-0.5, 1.5}), ConfigError);
  EXPECT_THROW(WeightSchedule::uniform(0), ConfigError);
  EXPECT_DOUBLE_EQ(WeightSchedule::custom({0.1, 0.7, 0.2}).sup(), 0.7);
}

TEST(Steps, ConstantNonsmooth) {
  const auto theta = WeightSchedule::uniform(100);
  StepParams p;
  p.omega = std::log(2.0);
  p.G = 1.0;
  const auto s = StepSchedule::make(StepKind::kConstantNonsmooth, p, theta);
  // sqrt(2 Omega / ((1/T)^2 G^2 T)) = sqrt(2 Omega T) / G.
  const double expected = std::sqrt(2.0 * std::log(2.0) * 100.0);
  for (int t = 1; t <= 100; ++t) EXPECT_NEAR(s.gamma(t), expected, 1e-12);
}

TEST(Steps, InverseLinear) {
  StepParams p;
  p.alpha = 2.0;
  const auto s = StepSchedule::make(StepKind::kInverseLinear, p, WeightSchedule::increasing_linear(5));
  EXPECT_DOUBLE_EQ(s.gamma(1), 0.5);
  EXPECT_DOUBLE_EQ(s.gamma(5), 2.0 / (2.0 * 6.0));
}

TEST(Steps, ConstantSmooth) {
  StepParams p;
  p.L = 10.0;
  const auto s = StepSchedule::make(StepKind::kConstantSmooth, p, WeightSchedule::uniform(10));
  EXPECT_DOUBLE_EQ(s.gamma(3), 1.0);
}

TEST(Steps, MissingOrInvalidParameter) {
  const auto theta = WeightSchedule::uniform(10);
  StepParams p;
  p.omega = 1.0;
  EXPECT_THROW(StepSchedule::make(StepKind::kConstantNonsmooth, p, theta), ConfigError);
  EXPECT_THROW(StepSchedule::make(StepKind::kInverseLinear, p, theta), ConfigError);
  p.L = -1.0;
  EXPECT_THROW(StepSchedule::make(StepKind::kConstantSmooth, p, theta), ConfigError);
}

TEST(Steps, KindNamesRoundTrip) {
  for (auto k : {StepKind::kConstantNonsmooth, StepKind::kInverseLinear, StepKind::kConstantSmooth})
    EXPECT_EQ(parse_step_kind(to_string(k)), k);
  for (auto k : {WeightKind::kUniform, WeightKind::kIncreasingLinear, WeightKind::kCustom})
    EXPECT_EQ(parse_weight_kind(to_string(k)), k);
  EXPECT_THROW(parse_step_kind("adaptive"), ConfigError);
}

namespace {

// gamma = 1 / (L sup theta) with uniform weights, so L = T / gamma.
StepSchedule constant_steps(int T, double gamma) {
  StepParams p;
  p.L = T / gamma;
  return StepSchedule::make(StepKind::kConstantSmooth, p, WeightSchedule::uniform(T));
}

}  // namespace

TEST(MirrorDescent, ZeroFeedStaysAtCenter) {
  const auto s = ProximalSetup::entropy_simplex(4);
  const auto trace = mirror_descent(s, constant_steps(10, 1.0), [&](int, const Vector&) { return Vector::Zero(4); });
  for (const auto& z : trace.points) EXPECT_LT((z - s.omega_center()).norm(), 1e-15);
}

TEST(MirrorDescent, EuclideanBallIsProjectedGradient) {
  std::mt19937_64 rng(1);
  const auto ball = ProximalSetup::euclidean_ball(3, 1.0);
  std::vector<Vector> targets;
  for (int t = 0; t < 50; ++t) targets.push_back(ref::gaussian(rng, 3, 1.5));
  // Uniform weights with T = 50 and L = 2.5 give gamma = 1 / (2.5 / 50) = 20;
  // scale the gradients by theta = 1/50 to get an effective step of 0.4.
  const auto steps = StepSchedule::make(StepKind::kConstantSmooth, StepParams{{}, {}, {}, 2.5}, WeightSchedule::uniform(50));
  const auto trace = mirror_descent(ball, steps, [&](int t, const Vector& x) -> Vector {
    return (x - targets[static_cast<size_t>(t - 1)]) / 50.0;
  });
  const auto expected = ref::projected_gradient(Vector::Zero(3), 1.0, targets, 0.4);
  for (size_t t = 0; t < 50; ++t) EXPECT_LT((trace.points[t] - expected[t]).norm(), 1e-12);
}

TEST(MirrorDescent, PerStepInequality) {
  std::mt19937_64 rng(2);
  for (const auto& s : {ProximalSetup::entropy_simplex(10), ProximalSetup::euclidean_ball(6, 2.0)}) {
    const auto stream = streams::max_affine(rng, 100, s.dim(), 4);
    EngineOptions o;
    for (int k = 0; k < 20; ++k) o.comparators.push_back(s.sample(rng));
    StepParams p;
    p.omega = s.set_width();
    p.G = stream.lipschitz_bound(s);
    const auto theta = WeightSchedule::uniform(100);
    const auto steps = StepSchedule::make(StepKind::kConstantNonsmooth, p, theta);
    const auto trace = mirror_descent(s, steps, [&](int t, const Vector& x) -> Vector {
      return theta(t) * stream.subgradient(t, x);
    }, o);
    EXPECT_EQ(trace.horizon(), 100);
    EXPECT_LE(trace.max_residual(), 1e-8);
  }
}

TEST(MirrorDescent, NonFiniteFeedAborts) {
  const auto s = ProximalSetup::euclidean_ball(2, 1.0);
  MirrorDescent md(s, constant_steps(5, 1.0));
  md.advance(Vector::Ones(2));
  Vector bad = Vector::Ones(2);
  bad[0] = std::nan("");
  EXPECT_THROW(md.advance(bad), InputError);
  EXPECT_THROW(md.advance(Vector::Ones(3)), InputError);
}

TEST(MirrorDescent, HorizonExhausted) {
  const auto s = ProximalSetup::euclidean_ball(2, 1.0);
  MirrorDescent md(s, constant_steps(2, 1.0));
  md.advance(Vector::Ones(2));
  md.advance(Vector::Ones(2));
  EXPECT_TRUE(md.done());
  EXPECT_THROW(md.advance(Vector::Ones(2)), ConfigError);
}

TEST(MirrorProx, ZeroFeedsStayAtCenter) {
  const auto s = ProximalSetup::entropy_simplex(3);
  const Feed zero = [](int, const Vector&) { return Vector::Zero(3); };
  const auto trace = mirror_prox(s, constant_steps(8, 1.0), zero, zero);
  for (size_t t = 0; t < trace.points.size(); ++t) {
    EXPECT_LT((trace.points[t] - s.omega_center()).norm(), 1e-15);
    EXPECT_LT((trace.leaders[t] - s.omega_center()).norm(), 1e-15);
  }
}

// Static smooth quadratic with known minimum: the averaged iterate's gap is O(1/T).
TEST(MirrorProx, StaticQuadraticGapIsOneOverT) {
  const auto ball = ProximalSetup::euclidean_ball(3, 1.0);
  Vector H(3);
  H << 1.0, 4.0, 9.0;
  Vector target(3);
  target << 0.2, -0.1, 0.3;
  auto f = [&](const Vector& x) { return 0.5 * (x - target).dot(H.asDiagonal() * (x - target)); };
  auto grad = [&](const Vector& x) -> Vector { return H.asDiagonal() * (x - target); };
  auto gap_at = [&](int T) {
    const auto theta = WeightSchedule::uniform(T);
    StepParams p;
    p.L = H.maxCoeff();
    const auto steps = StepSchedule::make(StepKind::kConstantSmooth, p, theta);
    const Feed feed = [&](int t, const Vector& x) -> Vector { return theta(t) * grad(x); };
    const auto trace = mirror_prox(ball, steps, feed, feed);
    const double gap = f(trace.average(theta.values()));
    const double bound = ball.set_width() * H.maxCoeff() / T;
    return std::pair{gap, bound};
  };
  for (int T : {10, 40, 160}) {
    const auto [gap, bound] = gap_at(T);
    EXPECT_GE(gap, 0.0);
    EXPECT_LE(gap, bound);
  }
}

TEST(MirrorProx, PerStepInequalityAndCancellation) {
  std::mt19937_64 rng(3);
  for (const auto& s : {ProximalSetup::euclidean_simplex(10), ProximalSetup::euclidean_ball(5, 1.0)}) {
    const auto stream = streams::quadratic(rng, 100, s, 2.0);
    EngineOptions o;
    for (int k = 0; k < 20; ++k) o.comparators.push_back(s.sample(rng));
    const auto theta = WeightSchedule::uniform(100);
    StepParams p;
    p.L = 2.0;
    const auto steps = StepSchedule::make(StepKind::kConstantSmooth, p, theta);
    const Feed feed = [&](int t, const Vector& x) -> Vector { return theta(t) * stream.subgradient(t, x); };
    const auto trace = mirror_prox(s, steps, feed, feed, o);
    EXPECT_LE(trace.max_residual(), 1e-8);
    EXPECT_LE(trace.max_cancellation(), 1e-8);
  }
}

TEST(MirrorProx, LookaheadOrderIsEnforced) {
  const auto s = ProximalSetup::euclidean_ball(2, 1.0);
  MirrorProx mp(s, constant_steps(3, 1.0));
  EXPECT_THROW(mp.current(), ConfigError);
  EXPECT_THROW(mp.advance(Vector::Zero(2)), ConfigError);
  mp.propose(Vector::Zero(2));
  EXPECT_THROW(mp.propose(Vector::Zero(2)), ConfigError);
  mp.advance(Vector::Zero(2));
  EXPECT_EQ(mp.t(), 2);
}

TEST(Determinism, IdenticalInputsGiveIdenticalTraces) {
  auto run = [] {
    std::mt19937_64 rng(42);
    const auto s = ProximalSetup::entropy_simplex(10);
    const auto stream = streams::max_affine(rng, 200, 10, 5);
    StepParams p;
    p.omega = s.set_width();
    p.G = stream.lipschitz_bound(s);
    const auto theta = WeightSchedule::uniform(200);
    return mirror_descent(s, StepSchedule::make(StepKind::kConstantNonsmooth, p, theta),
                          [&](int t, const Vector& x) -> Vector { return theta(t) * stream.subgradient(t, x); });
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.points.size(), b.points.size());
  for (size_t t = 0; t < a.points.size(); ++t) {
    EXPECT_EQ(a.points[t], b.points[t]);
    EXPECT_EQ(a.steps[t].step_residual, b.steps[t].step_residual);
  }
}

TEST(Oracles, SubgradientInequality) {
  std::mt19937_64 rng(4);
  const auto s = ProximalSetup::euclidean_ball(4, 1.0);
  const auto stream = streams::strongly_convex_max(rng, 20, s, 0.5, 3, 1.0);
  for (int t = 1; t <= 20; ++t) {
    for (int k = 0; k < 20; ++k) {
      const Vector x = s.sample(rng);
      const Vector y = s.sample(rng);
      EXPECT_GE(stream.value(t, y), stream.value(t, x) + stream.subgradient(t, x).dot(y - x) - 1e-8);
    }
  }
}

TEST(Oracles, SaddleOperatorIsMonotone) {
  std::mt19937_64 rng(5);
  const auto games = streams::bilinear(rng, 10, 3, 4, 0.3);
  const auto sx = ProximalSetup::entropy_simplex(3);
  const auto sy = ProximalSetup::entropy_simplex(4);
  for (int t = 1; t <= 10; ++t) {
    for (int k = 0; k < 20; ++k) {
      const Vector x1 = sx.sample(rng), y1 = sy.sample(rng), x2 = sx.sample(rng), y2 = sy.sample(rng);
      const Vector d = games.op(t, x1, y1) - games.op(t, x2, y2);
      const Vector z = ProximalSetup::concat(x1 - x2, y1 - y2);
      EXPECT_GE(d.dot(z), -1e-8);
    }
  }
}
