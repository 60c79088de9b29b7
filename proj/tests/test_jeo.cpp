#include "support/reference.hpp"

#include <ocokit/errors.hpp>
#include <ocokit/jeo.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace ocokit;

namespace {

struct Fixture {
  Vector u_star;
  Vector u0;
  Matrix H;
};

Fixture make_fixture(Index n, double kappa, double offset) {
  Fixture f;
  f.u_star = Vector::LinSpaced(n, -0.3, 0.3);
  f.u0 = f.u_star + Vector::Constant(n, offset);
  f.H = Vector::LinSpaced(n, 1.0, kappa).asDiagonal();
  return f;
}

JeoInstance with_derived_constants(const ProximalSetup& X, const JeoObjective& f, const Vector& u_star, double radius) {
  const JeoInstance probe(X, f, JeoConstants{1.0, {}, {}, {}, {}}, u_star);
  return JeoInstance(X, f, probe.derived_constants(u_star, radius), u_star);
}

}  // namespace

TEST(Estimator, IdentityObjectiveConvergesInOneStep) {
  Vector u_star(3);
  u_star << 0.5, -1.0, 2.0;
  auto s = EstimatorStream::from_g(EstimationObjective::quadratic(Matrix::Identity(3, 3), u_star), Vector::Zero(3));
  EXPECT_LT((s.next() - u_star).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(s.decay()->beta, 0.0);
}

TEST(Estimator, DeclaredDecayHolds) {
  const auto fx = make_fixture(5, 10.0, 1.0);
  auto s = EstimatorStream::from_g(EstimationObjective::quadratic(fx.H, fx.u_star), fx.u0);
  const auto d = *s.decay();
  EXPECT_NEAR(d.beta, 9.0 / 11.0, 1e-15);
  double prev = (fx.u0 - fx.u_star).norm();
  for (int t = 1; t <= 50; ++t) {
    const double dist = (s.next() - fx.u_star).norm();
    EXPECT_LE(dist, d.C * std::pow(d.beta, t) + 1e-15);
    EXPECT_LE(dist, d.beta * prev + 1e-15);
    prev = dist;
  }
}

TEST(Estimator, StartAtOptimumIsConstant) {
  const auto fx = make_fixture(3, 4.0, 0.0);
  auto s = EstimatorStream::from_g(EstimationObjective::quadratic(fx.H, fx.u_star), fx.u_star);
  for (int t = 0; t < 5; ++t) EXPECT_EQ(s.next(), fx.u_star);
}

TEST(Estimator, NonContractiveStepIsDetected) {
  const auto fx = make_fixture(3, 4.0, 1.0);
  auto g = EstimationObjective::quadratic(fx.H, fx.u_star);
  g.L = 1.0;  // understated smoothness: steps overshoot
  g.mu = 1.0;
  auto s = EstimatorStream::from_g(g, fx.u0);
  EXPECT_THROW(
      {
        for (int t = 0; t < 10; ++t) s.next();
      },
      OracleError);
}

TEST(Estimator, FiniteStreamExhausts) {
  auto s = EstimatorStream::from_values({Vector::Zero(2), Vector::Ones(2)});
  s.next();
  s.next();
  EXPECT_THROW(s.next(), InputError);
}

TEST(DecaySum, Examples) {
  EXPECT_DOUBLE_EQ(weighted_decay_sum(WeightSchedule::uniform(4), {0, 0, 0, 0}), 0.0);
  EXPECT_NEAR(weighted_decay_sum(WeightSchedule::uniform(3), {0.5, 0.25, 0.125}), 7.0 / 24.0, 1e-15);
}

TEST(DecaySum, ClosedFormsMatchDirectSums) {
  for (double beta : {0.3, 0.9, 0.99}) {
    const LinearDecay d{1.7, beta};
    for (int T : {1, 5, 50, 400}) {
      std::vector<double> dist;
      for (int t = 1; t <= T; ++t) dist.push_back(d.C * std::pow(beta, t));
      for (auto kind : {WeightKind::kUniform, WeightKind::kIncreasingLinear}) {
        const double direct = weighted_decay_sum(WeightSchedule::make(kind, T), dist);
        EXPECT_NEAR(decay_sum_closed_form(kind, d, T), direct, 1e-12 * std::max(1.0, direct));
        const double scale = kind == WeightKind::kUniform ? T : static_cast<double>(T) * T;
        EXPECT_LE(direct, decay_constant(kind, d) / scale + 1e-15);
      }
    }
  }
}

TEST(DecaySum, ConstantsClosedForm) {
  const LinearDecay d{2.0, 0.5};
  EXPECT_NEAR(decay_constant(WeightKind::kUniform, d), 2.0 * 0.5 / 0.5, 1e-15);
  EXPECT_NEAR(decay_constant(WeightKind::kIncreasingLinear, d), 2.0 * 2.0 * 0.5 / 0.25, 1e-15);
}

TEST(RunJeo, ConstantStreamAtTruthHasZeroPenalties) {
  const Index n = 3;
  const auto X = ProximalSetup::euclidean_ball(n, 1.0);
  Vector u_star(n);
  u_star << 0.2, -0.1, 0.4;
  const auto f = JeoObjective::tracking(2.0, n);
  const auto inst = with_derived_constants(X, f, u_star, 0.0);
  auto s = EstimatorStream::constant(u_star);
  const auto r = run_jeo(inst, s, Regime::kStronglyConvex, 100);
  EXPECT_DOUBLE_EQ(*r.data_penalty, 0.0);
  EXPECT_DOUBLE_EQ(*r.eval_penalty, 0.0);
  const double G = inst.constants().G_X;
  const double alpha = *inst.constants().alpha_X;
  EXPECT_LE(*r.gap, 2 * G * G / (alpha * 101) + 1e-12);
  EXPECT_LE(r.regret, r.regret_bound + 1e-6);
}

TEST(RunJeo, TrackingGapHalvesWhenHorizonDoubles) {
  // Uniform weights and a constant step: the transient of x_t toward u* lasts
  // about sqrt(T) steps, so the averaged iterate is off by O(1/sqrt(T)) and the
  // quadratic gap is O(1/T).
  const auto fx = make_fixture(4, 4.0, 0.5);
  const auto X = ProximalSetup::euclidean_ball(4, 1.0);
  const auto inst = with_derived_constants(X, JeoObjective::tracking(1.0, 4), fx.u_star, 0.5 * 2.0);
  double prev = 0.0;
  for (int T : {100, 200, 400}) {
    auto s = EstimatorStream::from_g(EstimationObjective::quadratic(fx.H, fx.u_star), fx.u0);
    const auto r = run_jeo(inst, s, Regime::kNonsmooth, T);
    EXPECT_GE(*r.decomposition_slack, -2e-9);
    EXPECT_LE(*r.gap, r.regret_bound + *r.data_penalty_bound + *r.eval_penalty_bound + 2e-9);
    if (prev > 0) {
      EXPECT_GE(*r.gap / prev, 0.4);
      EXPECT_LE(*r.gap / prev, 0.65);
    }
    prev = *r.gap;
  }
}

TEST(RunJeo, NonsmoothL1GapRate) {
  // Near u* each coordinate oscillates with the step length, and the bias of
  // the average depends on where u* falls within that cycle. Averaging over
  // random u* removes the phase dependence.
  const Index n = 3;
  const auto X = ProximalSetup::euclidean_ball(n, 1.0);
  std::mt19937_64 rng(7);
  double a = 0.0, b = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Vector u_star = ref::uniform(rng, n, -0.4, 0.4);
    const Vector u0 = u_star + Vector::Constant(n, 0.4);
    const Matrix H = Vector::LinSpaced(n, 1.0, 3.0).asDiagonal();
    const auto inst = with_derived_constants(X, JeoObjective::l1_distance(n), u_star, 0.4 * std::sqrt(3.0));
    for (int T : {256, 1024}) {
      auto s = EstimatorStream::from_g(EstimationObjective::quadratic(H, u_star), u0);
      const auto r = run_jeo(inst, s, Regime::kNonsmooth, T);
      EXPECT_GE(*r.decomposition_slack, -2e-9);
      (T == 256 ? a : b) += *r.gap;
    }
  }
  EXPECT_LE(b / a, 0.75);
}

TEST(RunJeo, SmoothRegimeDecompositionHolds) {
  const auto fx = make_fixture(4, 6.0, 0.5);
  const auto X = ProximalSetup::euclidean_ball(4, 1.0);
  const auto inst = with_derived_constants(X, JeoObjective::tracking(1.0, 4), fx.u_star, 1.0);
  auto s = EstimatorStream::from_g(EstimationObjective::quadratic(fx.H, fx.u_star), fx.u0);
  const auto r = run_jeo(inst, s, Regime::kSmooth, 200);
  EXPECT_GE(*r.decomposition_slack, -2e-9);
  EXPECT_LE(r.regret, r.regret_bound + 1e-6);
}

TEST(RunJeo, WithoutTruthOnlyComputableTerms) {
  const auto X = ProximalSetup::euclidean_ball(2, 1.0);
  const auto f = JeoObjective::tracking(1.0, 2);
  const JeoInstance inst(X, f, JeoConstants{4.0, 1.0, 1.0, 2.0, 1.0});
  auto s = EstimatorStream::constant(Vector::Constant(2, 0.1));
  const auto r = run_jeo(inst, s, Regime::kStronglyConvex, 20);
  EXPECT_FALSE(r.gap.has_value());
  EXPECT_FALSE(r.decomposition_slack.has_value());
  EXPECT_TRUE(std::isnan(r.trace.back().u_dist));
  const auto j = to_json(r);
  EXPECT_FALSE(j.contains("gap"));
  EXPECT_TRUE(j.contains("regret"));
}

TEST(RunJeo, StreamExhaustionIsAnInputError) {
  const auto X = ProximalSetup::euclidean_ball(2, 1.0);
  const JeoInstance inst(X, JeoObjective::tracking(1.0, 2), JeoConstants{4.0, 1.0, 1.0, 2.0, 1.0});
  auto s = EstimatorStream::from_values({Vector::Zero(2), Vector::Zero(2)});
  EXPECT_THROW(run_jeo(inst, s, Regime::kStronglyConvex, 5), InputError);
}

TEST(RunJeo, StronglyConvexNeedsAlpha) {
  const auto X = ProximalSetup::euclidean_ball(2, 1.0);
  const JeoInstance inst(X, JeoObjective::tracking(1.0, 2), JeoConstants{4.0, {}, 1.0, 2.0, 1.0});
  auto s = EstimatorStream::constant(Vector::Zero(2));
  EXPECT_THROW(run_jeo(inst, s, Regime::kStronglyConvex, 5), ConfigError);
}

TEST(RunJeo, NonsmoothStronglyConvexFamily) {
  std::mt19937_64 rng(1);
  const Index n = 4;
  const auto fx = make_fixture(n, 19.0, 1.0);
  const Matrix a = Matrix::NullaryExpr(3, n, [&] { return ref::uniform(rng, 1)[0]; });
  const Matrix d = 0.5 * Matrix::NullaryExpr(3, n, [&] { return ref::uniform(rng, 1)[0]; });
  const auto f = JeoObjective::max_affine(1.0, a, d, ref::uniform(rng, 3));
  const auto X = ProximalSetup::euclidean_ball(n, 1.0);
  const auto inst = with_derived_constants(X, f, fx.u_star, 2.0);
  for (int T : {100, 400}) {
    auto s = EstimatorStream::from_g(EstimationObjective::quadratic(fx.H, fx.u_star), fx.u0);
    const auto r = run_jeo(inst, s, Regime::kStronglyConvex, T);
    EXPECT_GE(*r.decomposition_slack, -2e-9);
    EXPECT_LE(r.regret, r.regret_bound + 1e-6);
    EXPECT_LE(*r.decay_sum, decay_constant(WeightKind::kIncreasingLinear, *s.decay()) / (double(T) * T) + 1e-15);
  }
}

TEST(RunJeo, PenaltyShareShrinksWithHorizon) {
  const auto fx = make_fixture(4, 9.0, 1.0);
  const auto X = ProximalSetup::euclidean_ball(4, 1.0);
  const auto inst = with_derived_constants(X, JeoObjective::tracking(1.0, 4), fx.u_star, 2.0);
  double prev = INFINITY;
  for (int T : {50, 100, 200, 400, 800}) {
    auto s = EstimatorStream::from_g(EstimationObjective::quadratic(fx.H, fx.u_star), fx.u0);
    const auto r = run_jeo(inst, s, Regime::kStronglyConvex, T);
    const double ratio = (*r.data_penalty_bound + *r.eval_penalty_bound) / r.regret_bound;
    EXPECT_LT(ratio, prev);
    prev = ratio;
  }
}

TEST(Baseline, FixedEstimatePlateausWhileJointRunImproves) {
  const Index n = 3;
  // Estimates stay between u0 and u*, inside the decision ball.
  const auto fx = make_fixture(n, 25.0, 0.3);
  const auto X = ProximalSetup::euclidean_ball(n, 1.0);
  const auto inst = with_derived_constants(X, JeoObjective::tracking(1.0, n), fx.u_star, 0.6);
  auto b1 = EstimatorStream::from_g(EstimationObjective::quadratic(fx.H, fx.u_star), fx.u0);
  const auto base = sequential_baseline(inst, b1, 5);
  // With a tracking objective the baseline gap is exactly half the squared
  // estimate error, no matter how long the solve runs.
  EXPECT_NEAR(base.gap, 0.5 * base.u_dist * base.u_dist, 1e-9);
  EXPECT_GT(base.gap, 0.0);
  double prev = INFINITY;
  for (int T : {200, 800, 3200}) {
    auto s = EstimatorStream::from_g(EstimationObjective::quadratic(fx.H, fx.u_star), fx.u0);
    const auto r = run_jeo(inst, s, Regime::kStronglyConvex, T);
    EXPECT_LT(*r.optimality_gap, prev);
    prev = *r.optimality_gap;
  }
  EXPECT_LT(prev, base.gap);
}
