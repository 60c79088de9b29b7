#pragma once

#include "ocokit/functions.hpp"
#include "ocokit/prox.hpp"
#include "ocokit/schedule.hpp"

#include <span>
#include <string>
#include <vector>

namespace ocokit {

enum class OracleMethod { kClosedForm, kInteriorPoint, kMirrorProx };

/// Settings for the reference solvers.
struct OfflineOracle {
  double accuracy = 1e-9;
  int max_iterations = 200;
};

struct OracleResult {
  Vector point;
  double value = 0.0;      // objective at point
  double bound = 0.0;      // certified bound on the optimum (lower for min, upper for max)
  double gap_bound = 0.0;  // |value - bound|
  bool certified = false;    // gap_bound <= accuracy
  OracleMethod method = OracleMethod::kClosedForm;
  int iterations = 0;
  /// Per term, a distribution over its affine pieces whose aggregated
  /// linearization produced the bound.
  std::vector<Vector> multipliers;
};

/// min_{x in X} sum_t w_t f_t(x) for piecewise quadratic f_t and nonnegative
/// weights w_t. X may be a simplex, ball, box or a product of those.
///
/// Terms with a single affine piece are solved in closed form (projection or
/// linear minimization). Otherwise a primal-dual interior point method runs on
/// the epigraph form, and the answer is certified by evaluating the Lagrange
/// dual function exactly at the normalized multipliers.
OracleResult minimize_weighted_sum(std::span<const PiecewiseQuadratic> terms, std::span<const double> weights,
                                   const ProximalSetup& setup, const OfflineOracle& oracle = {});

OracleResult minimize_weighted_sum(const PiecewiseQuadraticStream& stream, const WeightSchedule& theta,
                                   const ProximalSetup& setup, const OfflineOracle& oracle = {});

/// max_{u in U} -sum_t w_t f_t(u), the concave family given by its negation.
/// The optimum lies in [value, bound].
OracleResult maximize_concave(std::span<const PiecewiseQuadratic> negated_terms, std::span<const double> weights,
                              const ProximalSetup& setup, const OfflineOracle& oracle = {});

struct SaddleResult {
  Vector x;
  Vector y;
  double value = 0.0;  // phi(x, y)
  double gap = 0.0;    // max_y' phi(x, y') - min_x' phi(x', y), computed exactly
  bool certified = false;
  OracleMethod method = OracleMethod::kInteriorPoint;
};

/// Saddle point of a bilinear game. Exact (up to the interior point
/// certificate) when either side is a simplex or a box; otherwise averaged
/// mirror prox iterates with the exact gap reported.
SaddleResult solve_saddle(const BilinearGame& game, const ProximalSetup& sx, const ProximalSetup& sy,
                          const OfflineOracle& oracle = {});

/// Exact duality gap max_y' phi(x, y') - min_x' phi(x', y) of a bilinear game.
double saddle_gap(const BilinearGame& game, const ProximalSetup& sx, const ProximalSetup& sy, const Vector& x,
                  const Vector& y);

std::string to_string(OracleMethod method);

}  // namespace ocokit
