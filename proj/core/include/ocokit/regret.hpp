#pragma once

#include "ocokit/engine.hpp"
#include "ocokit/functions.hpp"
#include "ocokit/offline.hpp"
#include "ocokit/schedule.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>

namespace ocokit {

enum class Regime { kNonsmooth, kStronglyConvex, kSmooth };

std::string to_string(Regime regime);
Regime parse_regime(const std::string& name);

struct RegretReport {
  /// Weighted regret (or online SP gap) against the oracle's comparator.
  double realized = 0.0;
  /// realized + comparator gap: a certified upper bound on the true value.
  double realized_upper = 0.0;
  double bound = 0.0;
  Vector comparator;
  double comparator_gap = 0.0;
  bool certified = false;
  std::optional<double> x_regret;
  std::optional<double> y_regret;

  /// bound - realized_upper.
  double slack() const { return bound - realized_upper; }
};

/// Weighted regret sum_t theta_t f_t(x_t) - inf_x sum_t theta_t f_t(x) given
/// a precomputed comparator.
RegretReport weighted_regret(const LossOracle& losses, std::span<const Vector> points, const WeightSchedule& theta,
                             const OracleResult& comparator, double bound);

/// Same, solving for the comparator with the offline oracle.
RegretReport weighted_regret(const PiecewiseQuadraticStream& losses, std::span<const Vector> points,
                             const WeightSchedule& theta, const ProximalSetup& setup, double bound,
                             const OfflineOracle& oracle = {});

/// Comparators for the online SP gap: the best fixed x against {y_t} and the
/// best fixed y against {x_t}, each with its certified value.
struct SaddleComparators {
  Vector best_x;
  double x_value = 0.0;  // inf_x sum theta_t phi_t(x, y_t)
  double x_gap = 0.0;
  Vector best_y;
  double y_value = 0.0;  // sup_y sum theta_t phi_t(x_t, y)
  double y_gap = 0.0;
};

/// Exact comparators for a bilinear stream (both are linear optimizations).
SaddleComparators bilinear_comparators(const BilinearGameStream& games, std::span<const Vector> xs,
                                       std::span<const Vector> ys, const WeightSchedule& theta,
                                       const ProximalSetup& sx, const ProximalSetup& sy);

/// Weighted online SP gap sup_y sum theta phi(x_t, y) - inf_x sum theta phi(x, y_t)
/// with its decomposition into the x-player and y-player regrets.
RegretReport online_sp_gap(const SaddleOracle& games, std::span<const Vector> xs, std::span<const Vector> ys,
                           const WeightSchedule& theta, const SaddleComparators& comparators, double bound);

/// The regret bounds:
///   non-smooth:       sqrt(2 Omega sup theta^2 G^2 T)
///   strongly convex:  2 G^2 / (alpha (T+1))
///   smooth:           Omega L sup theta
double theoretical_bound(Regime regime, const StepParams& params, const WeightSchedule& theta);

/// Splits stacked [x; y] points of a product run.
std::pair<std::vector<Vector>, std::vector<Vector>> split_points(std::span<const Vector> zs, Index dim_x);

nlohmann::json to_json(const RegretReport& report);

/// A full online run against a piecewise quadratic stream:
///   non-smooth:      MD, uniform weights, constant step, xi = theta grad f
///   strongly convex: MD, increasing weights, gamma_t = 2/(alpha(t+1)), xi = grad f
///   smooth:          MP, uniform weights, gamma = 1/(L sup theta),
///                    eta = theta grad f(v_t), xi = theta grad f(z_t)
/// G, alpha and L default to the stream's own bounds.
struct OcoRun {
  RunTrace trace;
  WeightSchedule theta = WeightSchedule::uniform(1);
  StepParams params;
  RegretReport report;
};
OcoRun run_oco(Regime regime, const ProximalSetup& setup, const PiecewiseQuadraticStream& stream,
               EngineOptions opts = {}, const OfflineOracle& oracle = {});

/// X x Y with beta_x = 1/(2 Omega_X), beta_y = 1/(2 Omega_Y), so the set
/// width is 1.
ProximalSetup balanced_product(const ProximalSetup& sx, const ProximalSetup& sy);

/// Online saddle point run on the product setup: MP (smooth) or MD
/// (non-smooth) with uniform weights; the report holds the online SP gap and
/// its x/y regret split.
struct SaddleRun {
  RunTrace trace;
  WeightSchedule theta = WeightSchedule::uniform(1);
  std::vector<Vector> xs;
  std::vector<Vector> ys;
  RegretReport report;
};
SaddleRun run_online_saddle(Regime regime, const ProximalSetup& product, const BilinearGameStream& games,
                            EngineOptions opts = {});

}  // namespace ocokit
