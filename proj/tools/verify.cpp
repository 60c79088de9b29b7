#include "cli.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace ocokit::cli {

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

std::vector<Vector> sample_points(const ProximalSetup& s, std::mt19937_64& rng, int k) {
  std::vector<Vector> pts;
  for (int i = 0; i < k; ++i) pts.push_back(s.sample(rng));
  return pts;
}

// First-order optimality of p = Prox_c(xi): <xi + grad w(p) - grad w(c), w - p> >= 0.
double prox_violation(const ProximalSetup& s, const Vector& c, const Vector& xi, std::mt19937_64& rng) {
  const Vector p = s.prox(c, xi);
  const Vector g = xi + s.dgf_gradient(p) - s.dgf_gradient(c);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) worst = std::min(worst, g.dot(s.sample(rng) - p));
  return -worst;
}

}  // namespace

VerifyResult run_verify(std::uint64_t seed) {
  VerifyResult out;
  Fnv1a h;
  std::mt19937_64 rng(seed);
  auto add = [&](std::string name, bool pass, std::string detail) {
    out.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  const ProximalSetup simplex = ProximalSetup::entropy_simplex(10);
  const ProximalSetup ball = ProximalSetup::euclidean_ball(5, 1.0);

  // Per-step inequality and the non-smooth bound on the simplex.
  {
    EngineOptions o;
    o.comparators = sample_points(simplex, rng, 10);
    const auto stream = streams::max_affine(rng, 128, 10, 5);
    const OcoRun r = run_oco(Regime::kNonsmooth, simplex, stream, o);
    hash_trace(h, r.trace);
    add("md-step-inequality", r.trace.max_residual() <= 1e-8, "max residual " + sci(r.trace.max_residual()));
    add("nonsmooth-bound", r.report.realized_upper <= r.report.bound + 1e-6,
        "regret " + sci(r.report.realized_upper) + " <= " + sci(r.report.bound));
  }
  // Strongly convex bound on the ball.
  {
    EngineOptions o;
    o.comparators = sample_points(ball, rng, 10);
    const auto stream = streams::strongly_convex_max(rng, 128, ball, 1.0, 3, 1.0);
    const OcoRun r = run_oco(Regime::kStronglyConvex, ball, stream, o);
    hash_trace(h, r.trace);
    add("strongly-convex-bound", r.report.realized_upper <= r.report.bound + 1e-6 && r.trace.max_residual() <= 1e-8,
        "regret " + sci(r.report.realized_upper) + " <= " + sci(r.report.bound));
  }
  // Mirror prox on smooth losses.
  {
    EngineOptions o;
    o.comparators = sample_points(ball, rng, 10);
    const auto stream = streams::quadratic(rng, 128, ball, 1.0);
    const OcoRun r = run_oco(Regime::kSmooth, ball, stream, o);
    hash_trace(h, r.trace);
    add("mp-step-inequality", r.trace.max_residual() <= 1e-8 && r.trace.max_cancellation() <= 1e-8,
        "max residual " + sci(r.trace.max_residual()) + ", cancellation " + sci(r.trace.max_cancellation()));
    add("smooth-bound", r.report.realized_upper <= r.report.bound + 1e-6,
        "regret " + sci(r.report.realized_upper) + " <= " + sci(r.report.bound));
  }
  // Online saddle point gap and its decomposition.
  {
    const auto games = streams::bilinear(rng, 128, 4, 3, 0.2);
    const auto product = balanced_product(ProximalSetup::entropy_simplex(4), ProximalSetup::entropy_simplex(3));
    const SaddleRun r = run_online_saddle(Regime::kSmooth, product, games);
    hash_trace(h, r.trace);
    const double split = std::abs(r.report.realized - (*r.report.x_regret + *r.report.y_regret));
    add("sp-gap-split", split <= 1e-10, "|gap - (x + y regret)| " + sci(split));
    add("sp-gap-bound", r.report.realized <= r.report.bound + 1e-6,
        "gap " + sci(r.report.realized) + " <= " + sci(r.report.bound));
  }
  // Prox optimality for both setups.
  {
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      std::normal_distribution<double> g(0.0, 2.0);
      const Vector xs = Vector::NullaryExpr(10, [&] { return g(rng); });
      const Vector xb = Vector::NullaryExpr(5, [&] { return g(rng); });
      worst = std::max(worst, prox_violation(simplex, simplex.sample(rng), xs, rng));
      worst = std::max(worst, prox_violation(ball, ball.sample(rng), xb, rng));
    }
    h.add(worst);
    add("prox-optimality", worst <= 1e-9, "worst violation " + sci(worst));
  }
  // Planted robust feasibility, one of each kind per scheme.
  {
    int wrong = 0;
    int runs = 0;
    for (bool feasible : {true, false}) {
      PlantOptions po;
      po.feasible = feasible;
      po.eps = 0.2;
      const auto planted = plant_instance(rng, po);
      for (Scheme s : {Scheme::kStrongStrong, Scheme::kStrongUSmoothX, Scheme::kSmoothUStrongX}) {
        FeasibilityConfig fc;
        fc.eps = 0.2;
        fc.scheme = s;
        fc.allow_doubling = false;
        const SchemeRun r = run_scheme(planted.instance, fc);
        for (const auto& x : r.xs) h.add(x);
        const Outcome want = feasible ? Outcome::kFeasible : Outcome::kInfeasible;
        wrong += r.verdict.outcome != want;
        ++runs;
      }
    }
    add("ro-planted-verdicts", wrong == 0, std::to_string(runs - wrong) + "/" + std::to_string(runs) + " correct");
  }
  // JEO decomposition.
  {
    const Index n = 4;
    std::normal_distribution<double> g(0.0, 0.3);
    const Vector u_star = Vector::NullaryExpr(n, [&] { return g(rng); });
    const Vector u0 = u_star + Vector::Constant(n, 0.5);
    const Matrix H = Vector::LinSpaced(n, 1.0, 9.0).asDiagonal();
    const JeoObjective f = JeoObjective::tracking(1.0, n);
    const JeoInstance probe(ProximalSetup::euclidean_ball(n, 1.0), f, JeoConstants{1.0, {}, {}, {}, {}}, u_star);
    const JeoInstance inst(probe.setup(), f, probe.derived_constants(u_star, (u0 - u_star).norm()), u_star);
    auto stream = EstimatorStream::from_g(EstimationObjective::quadratic(H, u_star), u0);
    const JeoReport r = run_jeo(inst, stream, Regime::kStronglyConvex, 200);
    for (const auto& x : r.xs) h.add(x);
    add("jeo-decomposition", *r.decomposition_slack >= -2e-9, "slack " + sci(*r.decomposition_slack));
    add("jeo-regret-bound", r.regret <= r.regret_bound + 1e-6, "regret " + sci(r.regret) + " <= " + sci(r.regret_bound));
  }

  out.trace_hash = h.hex();
  return out;
}

}  // namespace ocokit::cli
