#pragma once

#include "ocokit/functions.hpp"
#include "ocokit/offline.hpp"
#include "ocokit/prox.hpp"
#include "ocokit/regret.hpp"
#include "ocokit/schedule.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace ocokit {

/// f(x, u) = rho/2 |x - (P u + q)|^2 + max_j (<a_j, x> + <d_j, u> + e_j).
/// With no pieces the max term is absent. For fixed u this is a
/// PiecewiseQuadratic in x.
struct JeoObjective {
  double rho = 0.0;
  Matrix P;       // n x dim_u
  Vector q;       // n
  Matrix slopes;  // k x n   (a_j)
  Matrix data;    // k x dim_u  (d_j)
  Vector offsets; // k       (e_j)

  Index dim_x() const { return P.rows(); }
  Index dim_u() const { return P.cols(); }
  Index pieces() const { return slopes.rows(); }
  bool smooth() const { return pieces() <= 1; }

  double value(const Vector& x, const Vector& u) const;
  Vector grad_x(const Vector& x, const Vector& u) const;
  PiecewiseQuadratic section(const Vector& u) const;

  /// rho/2 |x - target|^2.
  static JeoObjective tracking(double rho, Index dim);
  /// alpha/2 |x|^2 + max_j (<a_j, x> + <d_j, u> + e_j).
  static JeoObjective max_affine(double alpha, Matrix slopes, Matrix data, Vector offsets);
  /// |x - u|_1 written as the max over sign vectors (dim <= 10).
  static JeoObjective l1_distance(Index dim);
};

struct JeoConstants {
  double G_X = 0.0;
  std::optional<double> alpha_X;
  std::optional<double> L_X;
  std::optional<double> G_U;  // |f(x,u) - f(x,u')| <= G_U |u - u'|
  std::optional<double> L_U;  // |grad_x f(x,u) - grad_x f(x,u')|_* <= L_U |u - u'|
};

class JeoInstance {
 public:
  JeoInstance(ProximalSetup setup, JeoObjective f, JeoConstants constants, std::optional<Vector> u_star = {});

  const ProximalSetup& setup() const { return setup_; }
  const JeoObjective& objective() const { return f_; }
  const JeoConstants& constants() const { return constants_; }
  const std::optional<Vector>& u_star() const { return u_star_; }
  /// D >= |x - x'| over the decision set.
  double diameter() const { return setup_.diameter(); }

  /// Valid constants when every estimate lies in the ball B(u_center, u_radius).
  JeoConstants derived_constants(const Vector& u_center, double u_radius) const;

  /// Spot-checks G_X, G_U and L_U on sampled pairs; throws ConfigError.
  void validate_constants(std::mt19937_64& rng, const Vector& u_center, double u_radius, int samples = 200) const;

 private:
  ProximalSetup setup_;
  JeoObjective f_;
  JeoConstants constants_;
  std::optional<Vector> u_star_;
};

/// |u_t - u*| <= C beta^t.
struct LinearDecay {
  double C = 0.0;
  double beta = 0.0;
};

/// g(u) for the estimation problem: gradient plus its strong convexity and
/// smoothness moduli.
struct EstimationObjective {
  std::function<Vector(const Vector&)> gradient;
  double mu = 1.0;
  double L = 1.0;

  /// 1/2 (u - u*)' H (u - u*) with H symmetric positive definite.
  static EstimationObjective quadratic(Matrix H, Vector u_star);
};

/// u_1, u_2, ... revealed one per optimization step.
class EstimatorStream {
 public:
  /// Gradient descent u_{t+1} = u_t - 2/(mu+L) grad g(u_t) from u_0. The
  /// declared decay uses beta = (kappa-1)/(kappa+1) and C = |grad g(u_0)| / mu.
  static EstimatorStream from_g(EstimationObjective g, Vector u0);
  /// A fixed list of estimates, optionally with a declared decay.
  static EstimatorStream from_values(std::vector<Vector> values, std::optional<LinearDecay> decay = {});
  static EstimatorStream constant(Vector u);

  /// Next estimate. Throws InputError when a finite stream is exhausted and
  /// OracleError when a gradient step fails to contract.
  Vector next();
  int produced() const { return produced_; }
  const std::optional<LinearDecay>& decay() const { return decay_; }

 private:
  EstimatorStream() = default;
  std::optional<EstimationObjective> g_;
  Vector u_;
  Vector last_step_;
  std::vector<Vector> values_;
  bool constant_ = false;
  std::optional<LinearDecay> decay_;
  int produced_ = 0;
};

/// sum_t theta_t d_t.
double weighted_decay_sum(const WeightSchedule& theta, const std::vector<double>& distances);
/// Closed form of sum_t theta_t C beta^t for uniform or increasing weights.
double decay_sum_closed_form(WeightKind kind, const LinearDecay& decay, int T);
/// C' with sum <= C'/T (uniform) or C'' with sum <= C''/T^2 (increasing).
double decay_constant(WeightKind kind, const LinearDecay& decay);

struct JeoStep {
  int t = 0;
  double u_dist = 0.0;          // |u_t - u*|, NaN without u*
  double gap_partial = 0.0;     // |f(xbar_t, u_t) - min f(., u*)|, NaN without u*
  double regret_partial = 0.0;  // weighted regret of the first t steps (normalized weights)
};

struct JeoReport {
  Regime regime = Regime::kStronglyConvex;
  int horizon = 0;
  Vector x_bar;
  double value_at_estimate = 0.0;  // f(xbar, u_T)
  /// max_x sum theta [q_t(x_t) - q_t(x)], exact.
  double regret = 0.0;
  double regret_bound = 0.0;

  // Decomposition terms; present only when u* is known.
  std::optional<double> optimum;           // min f(., u*) (oracle value)
  std::optional<double> optimum_lower;     // certified lower bound
  std::optional<double> gap;               // |f(xbar, u_T) - min f(., u*)|
  std::optional<double> optimality_gap;    // f(xbar, u*) - min f(., u*)
  std::optional<double> data_penalty;      // D sum theta |grad f(x_t,u_t) - grad f(x_t,u*)|_*
  std::optional<double> eval_penalty;      // |f(xbar, u_T) - f(xbar, u*)|
  std::optional<double> data_penalty_bound;
  std::optional<double> eval_penalty_bound;
  std::optional<double> decay_sum;         // sum theta |u_t - u*|
  /// regret + data_penalty - optimality_gap, with the certified optimum.
  std::optional<double> decomposition_slack;

  std::vector<Vector> xs;
  std::vector<Vector> us;
  std::vector<JeoStep> trace;
  WeightSchedule theta = WeightSchedule::uniform(1);
};

struct JeoOptions {
  OfflineOracle oracle{};
  bool record_trace = true;
};

/// One estimator step per optimization step. Regimes:
///   nonsmooth: MD, uniform weights, constant step, xi = theta grad f(x_t, u_t)
///   smooth: MP, uniform weights, gamma = 1/(L sup theta); u_t is revealed
///           before eta is evaluated at v_t
///   strongly-convex: MD, increasing weights, gamma_t = 2/(alpha(t+1)),
///           xi = grad f(x_t, u_t)
JeoReport run_jeo(const JeoInstance& inst, EstimatorStream& stream, Regime regime, int T, const JeoOptions& opts = {});

/// Fills the u*-dependent terms of a report from its iterates.
void gap_decomposition(const JeoInstance& inst, JeoReport& report, const OfflineOracle& oracle = {});

/// Fixed-estimate baseline: consume K estimates, then solve min f(., u_K).
struct BaselineResult {
  Vector x;
  double gap = 0.0;  // f(x, u*) - min f(., u*)
  double u_dist = 0.0;
};
BaselineResult sequential_baseline(const JeoInstance& inst, EstimatorStream& stream, int K,
                                   const OfflineOracle& oracle = {});

nlohmann::json to_json(const JeoReport& report);

}  // namespace ocokit
