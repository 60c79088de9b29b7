#include "ocokit/regret.hpp"

#include "ocokit/errors.hpp"
#include "ocokit/hash.hpp"

#include <cmath>
#include <limits>

namespace ocokit {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kNonsmooth:
      return "nonsmooth";
    case Regime::kStronglyConvex:
      return "strongly-convex";
    case Regime::kSmooth:
      return "smooth";
  }
  return "?";
}

Regime parse_regime(const std::string& name) {
  if (name == "nonsmooth" || name == "non-smooth") return Regime::kNonsmooth;
  if (name == "strongly-convex") return Regime::kStronglyConvex;
  if (name == "smooth") return Regime::kSmooth;
  throw ConfigError("unknown regime: " + name);
}

RegretReport weighted_regret(const LossOracle& losses, std::span<const Vector> points, const WeightSchedule& theta,
                             const OracleResult& comparator, double bound) {
  if (static_cast<int>(points.size()) != theta.horizon() || theta.horizon() != losses.horizon()) {
    throw InputError("weighted_regret: trace, weights and losses must share the horizon");
  }
  double played = 0.0;
  for (int t = 1; t <= theta.horizon(); ++t) played += theta(t) * losses.value(t, points[static_cast<size_t>(t - 1)]);
  RegretReport r;
  r.realized = played - comparator.value;
  r.realized_upper = played - comparator.bound;
  r.bound = bound;
  r.comparator = comparator.point;
  r.comparator_gap = comparator.gap_bound;
  r.certified = comparator.certified;
  return r;
}

RegretReport weighted_regret(const PiecewiseQuadraticStream& losses, std::span<const Vector> points,
                             const WeightSchedule& theta, const ProximalSetup& setup, double bound,
                             const OfflineOracle& oracle) {
  const OracleResult cmp = minimize_weighted_sum(losses, theta, setup, oracle);
  return weighted_regret(losses, points, theta, cmp, bound);
}

SaddleComparators bilinear_comparators(const BilinearGameStream& games, std::span<const Vector> xs,
                                       std::span<const Vector> ys, const WeightSchedule& theta,
                                       const ProximalSetup& sx, const ProximalSetup& sy) {
  const int T = theta.horizon();
  if (static_cast<int>(xs.size()) != T || static_cast<int>(ys.size()) != T || games.horizon() != T) {
    throw InputError("bilinear_comparators: horizon mismatch");
  }
  // sum theta phi(x, y_t) = <gx, x> + cx, sum theta phi(x_t, y) = <gy, y> + cy.
  Vector gx = Vector::Zero(games.dim_x());
  Vector gy = Vector::Zero(games.dim_y());
  double cx = 0.0;
  double cy = 0.0;
  for (int t = 1; t <= T; ++t) {
    const auto& g = games.game(t);
    const auto& x = xs[static_cast<size_t>(t - 1)];
    const auto& y = ys[static_cast<size_t>(t - 1)];
    gx += theta(t) * (g.A * y + g.b);
    cx += theta(t) * g.c.dot(y);
    gy += theta(t) * (g.A.transpose() * x + g.c);
    cy += theta(t) * g.b.dot(x);
  }
  SaddleComparators c;
  c.best_x = sx.linear_minimizer(gx);
  c.x_value = gx.dot(c.best_x) + cx;
  c.best_y = sy.linear_minimizer(-gy);
  c.y_value = gy.dot(c.best_y) + cy;
  return c;
}

RegretReport online_sp_gap(const SaddleOracle& games, std::span<const Vector> xs, std::span<const Vector> ys,
                           const WeightSchedule& theta, const SaddleComparators& comparators, double bound) {
  const int T = theta.horizon();
  if (static_cast<int>(xs.size()) != T || static_cast<int>(ys.size()) != T || games.horizon() != T) {
    throw InputError("online_sp_gap: horizon mismatch");
  }
  double played = 0.0;
  for (int t = 1; t <= T; ++t) {
    played += theta(t) * games.value(t, xs[static_cast<size_t>(t - 1)], ys[static_cast<size_t>(t - 1)]);
  }
  RegretReport r;
  r.realized = comparators.y_value - comparators.x_value;
  r.realized_upper = r.realized + comparators.x_gap + comparators.y_gap;
  r.x_regret = played - comparators.x_value;
  r.y_regret = comparators.y_value - played;
  r.bound = bound;
  r.comparator = ProximalSetup::concat(comparators.best_x, comparators.best_y);
  r.comparator_gap = comparators.x_gap + comparators.y_gap;
  r.certified = true;
  return r;
}

double theoretical_bound(Regime regime, const StepParams& p, const WeightSchedule& theta) {
  auto need = [](const std::optional<double>& v, const char* name) {
    if (!v) throw ConfigError(std::string("theoretical_bound: missing parameter ") + name);
    return *v;
  };
  const double T = theta.horizon();
  switch (regime) {
    case Regime::kNonsmooth: {
      const double G = need(p.G, "G");
      return std::sqrt(2.0 * need(p.omega, "omega") * theta.sup_squared() * G * G * T);
    }
    case Regime::kStronglyConvex: {
      const double G = need(p.G, "G");
      return 2.0 * G * G / (need(p.alpha, "alpha") * (T + 1.0));
    }
    case Regime::kSmooth:
      return need(p.omega, "omega") * need(p.L, "L") * theta.sup();
  }
  return 0.0;
}

std::pair<std::vector<Vector>, std::vector<Vector>> split_points(std::span<const Vector> zs, Index dim_x) {
  std::vector<Vector> xs;
  std::vector<Vector> ys;
  xs.reserve(zs.size());
  ys.reserve(zs.size());
  for (const auto& z : zs) {
    xs.emplace_back(z.head(dim_x));
    ys.emplace_back(z.tail(z.size() - dim_x));
  }
  return {std::move(xs), std::move(ys)};
}

nlohmann::json to_json(const RegretReport& r) {
  nlohmann::json j;
  j["realized"] = r.realized;
  j["bound"] = r.bound;
  j["slack"] = r.slack();
  j["comparator_hash"] = hash_vector(r.comparator);
  j["comparator_gap"] = r.comparator_gap;
  j["certified"] = r.certified;
  if (r.x_regret) j["x_regret"] = *r.x_regret;
  if (r.y_regret) j["y_regret"] = *r.y_regret;
  return j;
}

OcoRun run_oco(Regime regime, const ProximalSetup& setup, const PiecewiseQuadraticStream& stream, EngineOptions opts,
               const OfflineOracle& oracle) {
  if (stream.dim() != setup.dim()) throw InputError("run_oco: stream and domain dimensions differ");
  const int T = stream.horizon();
  OcoRun run;
  run.params.omega = setup.set_width();
  run.params.G = stream.lipschitz_bound(setup);
  switch (regime) {
    case Regime::kNonsmooth: {
      run.theta = WeightSchedule::uniform(T);
      const auto steps = StepSchedule::make(StepKind::kConstantNonsmooth, run.params, run.theta);
      run.trace = mirror_descent(setup, steps, [&](int t, const Vector& x) -> Vector {
        return run.theta(t) * stream.subgradient(t, x);
      }, std::move(opts));
      break;
    }
    case Regime::kStronglyConvex: {
      if (setup.generator() != Generator::kEuclidean) {
        throw ConfigError("the strongly-convex regime needs a Euclidean setup (strong convexity relative to omega)");
      }
      const double alpha = stream.strong_convexity();
      if (!(alpha > 0.0)) throw ConfigError("the strongly-convex regime needs rho > 0 on every term");
      run.params.alpha = alpha;
      run.theta = WeightSchedule::increasing_linear(T);
      const auto steps = StepSchedule::make(StepKind::kInverseLinear, run.params, run.theta);
      run.trace = mirror_descent(setup, steps, [&](int t, const Vector& x) -> Vector {
        return stream.subgradient(t, x);
      }, std::move(opts));
      break;
    }
    case Regime::kSmooth: {
      if (!stream.smooth()) throw ConfigError("the smooth regime needs terms with a single affine piece");
      const double L = stream.smoothness();
      if (!(L > 0.0)) throw ConfigError("the smooth regime needs rho > 0 on some term");
      run.params.L = L;
      run.theta = WeightSchedule::uniform(T);
      const auto steps = StepSchedule::make(StepKind::kConstantSmooth, run.params, run.theta);
      const Feed feed = [&](int t, const Vector& x) -> Vector { return run.theta(t) * stream.subgradient(t, x); };
      run.trace = mirror_prox(setup, steps, feed, feed, std::move(opts));
      break;
    }
  }
  run.report = weighted_regret(stream, run.trace.points, run.theta, setup,
                               theoretical_bound(regime, run.params, run.theta), oracle);
  return run;
}

ProximalSetup balanced_product(const ProximalSetup& sx, const ProximalSetup& sy) {
  const double wx = sx.set_width();
  const double wy = sy.set_width();
  if (!(wx > 0.0) || !(wy > 0.0)) throw ConfigError("balanced_product: both blocks need positive set width");
  return ProximalSetup::product(sx, sy, 0.5 / wx, 0.5 / wy);
}

SaddleRun run_online_saddle(Regime regime, const ProximalSetup& product, const BilinearGameStream& games,
                            EngineOptions opts) {
  if (product.kind() != DomainKind::kProduct) throw ConfigError("run_online_saddle: need a product setup");
  const Index nx = games.dim_x();
  if (product.block(0).dim() != nx || product.block(1).dim() != games.dim_y()) {
    throw InputError("run_online_saddle: game and setup dimensions differ");
  }
  const int T = games.horizon();
  SaddleRun run;
  run.theta = WeightSchedule::uniform(T);
  StepParams p;
  p.omega = product.set_width();
  const Feed feed = [&](int t, const Vector& z) -> Vector {
    return run.theta(t) * games.op(t, product.head(z), product.tail(z));
  };
  double bound = 0.0;
  switch (regime) {
    case Regime::kSmooth: {
      p.L = games.smoothness(product);
      run.trace = mirror_prox(product, StepSchedule::make(StepKind::kConstantSmooth, p, run.theta), feed, feed,
                              std::move(opts));
      break;
    }
    case Regime::kNonsmooth: {
      p.G = games.operator_bound(product);
      run.trace = mirror_descent(product, StepSchedule::make(StepKind::kConstantNonsmooth, p, run.theta), feed,
                                 std::move(opts));
      break;
    }
    case Regime::kStronglyConvex:
      throw ConfigError("bilinear games are not strongly convex-concave");
  }
  bound = theoretical_bound(regime, p, run.theta);
  std::tie(run.xs, run.ys) = split_points(run.trace.points, nx);
  const auto cmp = bilinear_comparators(games, run.xs, run.ys, run.theta, product.block(0), product.block(1));
  run.report = online_sp_gap(games, run.xs, run.ys, run.theta, cmp, bound);
  return run;
}

}  // namespace ocokit
