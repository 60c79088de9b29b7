// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "cli.hpp"
#include "support/reference.hpp"

#include <ocokit/ocokit.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace ocokit;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Bregman divergences written out here rather than taken from the library.
double kl(const Vector& z, const Vector& w) {
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    if (w[i] > 0.0) s += w[i] * std::log(w[i] / z[i]);
  }
  return s;
}

double half_sq(const Vector& z, const Vector& w) { return 0.5 * (z - w).squaredNorm(); }

struct Geometry {
  ProximalSetup setup;
  std::function<double(const Vector&, const Vector&)> V;  // V_z(w)
  std::function<double(const Vector&)> dual;
  std::function<double(const Vector&)> primal;
};

Geometry simplex_geometry(Index n) {
  return {ProximalSetup::entropy_simplex(n), kl, [](const Vector& v) { return v.cwiseAbs().maxCoeff(); },
          [](const Vector& v) { return v.cwiseAbs().sum(); }};
}

Geometry ball_geometry(Index n) {
  return {ProximalSetup::euclidean_ball(n, 1.0), half_sq, [](const Vector& v) { return v.norm(); },
          [](const Vector& v) { return v.norm(); }};
}

std::vector<Vector> fresh_comparators(const ProximalSetup& s, std::mt19937_64& rng, int k) {
  std::vector<Vector> w;
  for (int i = 0; i < k; ++i) w.push_back(s.sample(rng));
  return w;
}

// gamma <xi, z - w> <= V_z(w) - V_{z+}(w) + gamma^2 |xi|_*^2 / 2 at 20 fresh w per step.
double md_worst_residual(const Geometry& g, const PiecewiseQuadraticStream& stream, std::mt19937_64& rng) {
  const int T = stream.horizon();
  const auto theta = WeightSchedule::uniform(T);
  StepParams p;
  p.omega = g.setup.set_width();
  p.G = stream.lipschitz_bound(g.setup);
  EngineOptions quiet;
  quiet.check_inequality = false;
  MirrorDescent md(g.setup, StepSchedule::make(StepKind::kConstantNonsmooth, p, theta), quiet);
  const double gamma = std::sqrt(2.0 * *p.omega / (theta.sup_squared() * *p.G * *p.G * T));
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= T; ++t) {
    const Vector z = md.current();
    const Vector xi = theta(t) * stream.subgradient(t, z);
    md.advance(xi);
    const Vector& next = md.current();
    const double quad = 0.5 * gamma * gamma * std::pow(g.dual(xi), 2);
    for (const Vector& w : fresh_comparators(g.setup, rng, 20)) {
      worst = std::max(worst, gamma * xi.dot(z - w) - (g.V(z, w) - g.V(next, w) + quad));
    }
  }
  return worst;
}

// gamma <xi, z - w> <= V_v(w) - V_{v+}(w) + (gamma^2 |xi - eta|_*^2 - |z - v|^2) / 2.
struct MpCheck {
  double residual = -std::numeric_limits<double>::infinity();
  double cancellation = -std::numeric_limits<double>::infinity();
};

MpCheck mp_worst_residual(const Geometry& g, const PiecewiseQuadraticStream& stream, std::mt19937_64& rng) {
  const int T = stream.horizon();
  const auto theta = WeightSchedule::uniform(T);
  StepParams p;
  p.L = stream.smoothness();
  EngineOptions quiet;
  quiet.check_inequality = false;
  MirrorProx mp(g.setup, StepSchedule::make(StepKind::kConstantSmooth, p, theta), quiet);
  const double gamma = 1.0 / (*p.L * theta.sup());
  MpCheck out;
  for (int t = 1; t <= T; ++t) {
    const Vector v = mp.leader();
    const Vector eta = theta(t) * stream.subgradient(t, v);
    const Vector z = mp.propose(eta);
    const Vector xi = theta(t) * stream.subgradient(t, z);
    mp.advance(xi);
    const Vector& next = mp.leader();
    const double cancel = gamma * gamma * std::pow(g.dual(xi - eta), 2) - std::pow(g.primal(z - v), 2);
    out.cancellation = std::max(out.cancellation, cancel);
    for (const Vector& w : fresh_comparators(g.setup, rng, 20)) {
      out.residual = std::max(out.residual, gamma * xi.dot(z - w) - (g.V(v, w) - g.V(next, w) + 0.5 * cancel));
    }
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criteria

Result md_step_inequality() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst = -1.0;
  for (const auto& g : {simplex_geometry(10), ball_geometry(10)}) {
    for (int run = 0; run < 20; ++run) {
      const auto stream = streams::max_affine(rng, 200, 10, 5);
      worst = std::max(worst, md_worst_residual(g, stream, rng));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 10.0, "max residual " + sci(worst) + ", " + sci(secs) + " s"};
}

Result mp_step_inequality() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(102);
  double worst = -1.0;
  for (const auto& g : {simplex_geometry(10), ball_geometry(10)}) {
    for (int run = 0; run < 20; ++run) {
      const auto stream = streams::quadratic(rng, 200, g.setup, 1.0);
      worst = std::max(worst, mp_worst_residual(g, stream, rng).residual);
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 10.0, "max residual " + sci(worst) + ", " + sci(secs) + " s"};
}

Result nonsmooth_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = ProximalSetup::entropy_simplex(10);
  constexpr int kSeeds = 10;
  bool within = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> mean;
  for (int T : {64, 256, 1024}) {
    double acc = 0.0;
    for (int seed = 0; seed < kSeeds; ++seed) {
      std::mt19937_64 rng(static_cast<unsigned>(300 + seed));
      EngineOptions quiet;
      quiet.check_inequality = false;
      const auto run = run_oco(Regime::kNonsmooth, s, streams::max_affine(rng, T, 10, 5), quiet);
      const double bound = std::sqrt(2.0 * s.set_width() * run.theta.sup_squared() * std::pow(*run.params.G, 2) * T);
      within = within && run.report.realized_upper <= bound + 1e-6;
      worst_slack = std::min(worst_slack, bound - run.report.realized_upper);
      acc += run.report.realized;
    }
    mean.push_back(acc / kSeeds);
  }
  const double r1 = mean[1] / mean[0];
  const double r2 = mean[2] / mean[1];
  const double secs = seconds_since(t0);
  return {within && r1 <= 0.75 && r2 <= 0.75 && secs < 30.0,
          "min slack " + sci(worst_slack) + ", ratios " + sci(r1) + " " + sci(r2) + ", " + sci(secs) + " s"};
}

Result strongly_convex_bound() {
  const auto ball = ProximalSetup::euclidean_ball(5, 1.0);
  constexpr int kSeeds = 10;
  bool within = true;
  bool weights_ok = true;
  std::vector<double> mean;
  for (int T : {100, 200, 400}) {
    double acc = 0.0;
    for (int seed = 0; seed < kSeeds; ++seed) {
      std::mt19937_64 rng(static_cast<unsigned>(400 + seed));
      EngineOptions quiet;
      quiet.check_inequality = false;
      const auto run = run_oco(Regime::kStronglyConvex, ball, streams::quadratic(rng, T, ball, 1.0), quiet);
      for (int t = 1; t <= T; ++t) {
        const double th = 2.0 * t / (static_cast<double>(T) * (T + 1));
        const double ga = 2.0 / (*run.params.alpha * (t + 1));
        weights_ok = weights_ok && std::abs(run.theta(t) - th) <= 1e-15 &&
                     std::abs(run.trace.steps[static_cast<size_t>(t - 1)].gamma - ga) <= 1e-15;
      }
      const double bound = 2.0 * std::pow(*run.params.G, 2) / (*run.params.alpha * (T + 1));
      within = within && run.report.realized_upper <= bound + 1e-6;
      acc += run.report.realized;
    }
    mean.push_back(acc / kSeeds);
  }
  const double r1 = mean[1] / mean[0];
  const double r2 = mean[2] / mean[1];
  return {within && weights_ok && r1 <= 0.75 && r2 <= 0.75, "ratios " + sci(r1) + " " + sci(r2)};
}

Result smooth_bound_and_cancellation() {
  std::mt19937_64 rng(105);
  bool within = true;
  double cancel = -1.0;
  for (const auto& g : {simplex_geometry(10), ball_geometry(5)}) {
    for (int run = 0; run < 10; ++run) {
      const auto stream = streams::quadratic(rng, 200, g.setup, 1.0);
      const auto r = run_oco(Regime::kSmooth, g.setup, stream);
      within = within && r.report.realized_upper <= g.setup.set_width() * stream.smoothness() * r.theta.sup() + 1e-6;
      cancel = std::max({cancel, r.trace.max_cancellation(), mp_worst_residual(g, stream, rng).cancellation});
    }
  }
  for (int run = 0; run < 10; ++run) {
    const auto games = streams::bilinear(rng, 200, 4, 3, 0.3);
    const auto product = balanced_product(ProximalSetup::entropy_simplex(4), ProximalSetup::entropy_simplex(3));
    const auto r = run_online_saddle(Regime::kSmooth, product, games);
    const double L = games.smoothness(product);
    within = within && r.report.realized <= product.set_width() * L * r.theta.sup() + 1e-6;
    cancel = std::max(cancel, r.trace.max_cancellation());
  }
  return {within && cancel <= 1e-8, "max cancellation " + sci(cancel)};
}

Result sp_gap_decomposition() {
  std::mt19937_64 rng(106);
  double worst = 0.0;
  for (int run = 0; run < 20; ++run) {
    const Index m = 2 + run % 4;
    const Index n = 2 + (run / 4) % 3;
    const auto games = streams::bilinear(rng, 150, m, n, 0.3);
    const auto product = balanced_product(ProximalSetup::entropy_simplex(m), ProximalSetup::entropy_simplex(n));
    const auto r = run_online_saddle(run % 2 ? Regime::kSmooth : Regime::kNonsmooth, product, games);
    // Both regrets recomputed from the iterates with vertex comparators.
    double lhs_y = -std::numeric_limits<double>::infinity();
    double lhs_x = std::numeric_limits<double>::infinity();
    Vector gx = Vector::Zero(m), gy = Vector::Zero(n);
    double played = 0.0;
    for (int t = 1; t <= games.horizon(); ++t) {
      const auto& A = games.game(t).A;
      const auto& x = r.xs[static_cast<size_t>(t - 1)];
      const auto& y = r.ys[static_cast<size_t>(t - 1)];
      const double w = r.theta(t);
      gy += w * (A.transpose() * x);
      gx += w * (A * y);
      played += w * x.dot(A * y);
    }
    lhs_y = gy.maxCoeff();
    lhs_x = gx.minCoeff();
    const double gap = lhs_y - lhs_x;
    const double x_regret = played - lhs_x;
    const double y_regret = lhs_y - played;
    worst = std::max({worst, std::abs(r.report.realized - (*r.report.x_regret + *r.report.y_regret)),
                      std::abs(gap - r.report.realized), std::abs(x_regret - *r.report.x_regret),
                      std::abs(y_regret - *r.report.y_regret)});
  }
  return {worst <= 1e-10, "max deviation " + sci(worst)};
}

Result robust_verdicts() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(107);
  int wrong = 0, total = 0;
  double worst_excess = -1.0;
  for (bool feasible : {true, false}) {
    for (int k = 0; k < 50; ++k) {
      PlantOptions po;
      po.m = 3;
      po.n = 5;
      po.feasible = feasible;
      po.eps = 0.1;
      const auto planted = plant_instance(rng, po);
      for (Scheme s : {Scheme::kStrongStrong, Scheme::kStrongUSmoothX, Scheme::kSmoothUStrongX}) {
        FeasibilityConfig fc;
        fc.eps = po.eps;
        fc.tau = 0.5;
        fc.scheme = s;
        fc.allow_doubling = false;
        const auto r = run_scheme(planted.instance, fc);
        const auto want = feasible ? ocokit::Outcome::kFeasible : ocokit::Outcome::kInfeasible;
        wrong += r.verdict.outcome != want;
        ++total;
        const auto& c = r.verdict.certificates;
        worst_excess = std::max({worst_excess, c.eps_circ_upper - r.bounds.circ, c.eps_bullet_upper - r.bounds.bullet});
      }
    }
  }
  const double secs = seconds_since(t0);
  return {wrong == 0 && worst_excess <= 1e-6 && secs < 120.0,
          std::to_string(total - wrong) + "/" + std::to_string(total) + " correct, max certificate excess " +
              sci(worst_excess) + ", " + sci(secs) + " s"};
}

double certificate_ratio(Scheme scheme, int T) {
  double acc = 0.0;
  constexpr int kSeeds = 10;
  for (int seed = 0; seed < kSeeds; ++seed) {
    std::mt19937_64 rng(static_cast<unsigned>(800 + seed));
    PlantOptions po;
    po.feasible = seed % 2 == 0;
    const auto planted = plant_instance(rng, po);
    FeasibilityConfig fc;
    fc.scheme = scheme;
    const auto a = run_scheme_once(planted.instance, fc, T);
    const auto b = run_scheme_once(planted.instance, fc, 2 * T);
    const auto& ca = a.verdict.certificates;
    const auto& cb = b.verdict.certificates;
    acc += (cb.eps_circ + cb.eps_bullet) / (ca.eps_circ + ca.eps_bullet);
  }
  return acc / kSeeds;
}

Result strong_strong_rate() {
  const double ratio = certificate_ratio(Scheme::kStrongStrong, 256);
  const double baseline = certificate_ratio(Scheme::kBaselineNonsmooth, 256);
  return {ratio >= 0.4 && ratio <= 0.6, "ratio " + sci(ratio) + " (baseline-nonsmooth " + sci(baseline) + ")"};
}

Result jeo_decomposition() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(109);
  const OfflineOracle oracle;
  bool ok = true;
  double min_slack = std::numeric_limits<double>::infinity();
  double worst_regret = -std::numeric_limits<double>::infinity();
  double worst_decay = -std::numeric_limits<double>::infinity();
  const Index n = 4;
  for (int T : {100, 400, 1600}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Vector u_star = ref::gaussian(rng, n, 0.2);
      const Vector u0 = u_star + ref::uniform(rng, n, -0.5, 0.5);
      // kappa = 19 gives beta = 0.9.
      const Matrix H = Vector::LinSpaced(n, 1.0, 19.0).asDiagonal();
      const JeoObjective f = JeoObjective::tracking(1.0, n);
      const JeoInstance probe(ProximalSetup::euclidean_ball(n, 1.0), f, JeoConstants{1.0, {}, {}, {}, {}}, u_star);
      const JeoInstance inst(probe.setup(), f, probe.derived_constants(u_star, (u0 - u_star).norm()), u_star);
      auto stream = EstimatorStream::from_g(EstimationObjective::quadratic(H, u_star), u0);
      const JeoReport r = run_jeo(inst, stream, Regime::kStronglyConvex, T, {oracle, true});
      const auto& decay = *stream.decay();
      ok = ok && std::abs(decay.beta - 0.9) <= 1e-12;
      const double G = inst.constants().G_X;
      const double q_bound = 2.0 * G * G / (*inst.constants().alpha_X * (T + 1));
      const double decay_bound = decay_constant(WeightKind::kIncreasingLinear, decay) / (static_cast<double>(T) * T);
      min_slack = std::min(min_slack, *r.decomposition_slack);
      worst_regret = std::max(worst_regret, r.regret - q_bound);
      worst_decay = std::max(worst_decay, *r.decay_sum - decay_bound);
      ok = ok && *r.decomposition_slack >= -2.0 * oracle.accuracy && r.regret <= q_bound + 1e-6 && *r.decay_sum <= decay_bound;
    }
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 60.0, "min decomposition slack " + sci(min_slack) + ", regret - bound " + sci(worst_regret) +
                                 ", decay sum - C''/T^2 " + sci(worst_decay) + ", " + sci(secs) + " s"};
}

Result prox_matches_reference() {
  std::mt19937_64 rng(110);
  double worst = 0.0;
  double widest = 0.0;
  const auto simplex = ProximalSetup::entropy_simplex(10);
  for (int k = 0; k < 200; ++k) {
    const Vector c = ref::random_simplex_interior(rng, 10);
    const Vector xi = ref::gaussian(rng, 10, 3.0);
    const auto r = ref::entropy_prox(c, xi);
    worst = std::max(worst, (simplex.prox(c, xi) - r.point).cwiseAbs().maxCoeff());
    widest = std::max(widest, r.width());
  }
  for (int k = 0; k < 200; ++k) {
    const Vector a = ref::gaussian(rng, 6);
    const double R = 0.1 + 2.0 * ref::uniform(rng, 1, 0.0, 1.0)[0];
    const auto ball = ProximalSetup::euclidean_ball(a, R);
    const Vector c = ball.sample(rng);
    const Vector xi = ref::gaussian(rng, 6, 2.0);
    const auto r = ref::ball_prox(a, R, c, xi);
    worst = std::max(worst, (ball.prox(c, xi) - r.point).cwiseAbs().maxCoeff());
    widest = std::max(widest, r.width());
  }
  return {worst <= 1e-8 && widest <= 1e-12, "max |prox - reference| " + sci(worst) + ", bracket " + sci(widest)};
}

Result verify_is_deterministic() {
  const auto a = cli::run_verify(42);
  const auto b = cli::run_verify(42);
  return {a.trace_hash == b.trace_hash && a.ok(), "hashes " + a.trace_hash + " " + b.trace_hash};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"1 md-step-inequality", md_step_inequality},
      {"2 mp-step-inequality", mp_step_inequality},
      {"3 nonsmooth-bound-and-rate", nonsmooth_bound},
      {"4 strongly-convex-bound-and-rate", strongly_convex_bound},
      {"5 smooth-bound-and-cancellation", smooth_bound_and_cancellation},
      {"6 sp-gap-decomposition", sp_gap_decomposition},
      {"7 robust-verdicts", robust_verdicts},
      {"8 strong-strong-rate", strong_strong_rate},
      {"9 jeo-decomposition", jeo_decomposition},
      {"10 prox-reference", prox_matches_reference},
      {"11 verify-determinism", verify_is_deterministic},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Result o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s  %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
