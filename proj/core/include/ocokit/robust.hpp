#pragma once

#include "ocokit/offline.hpp"
#include "ocokit/prox.hpp"
#include "ocokit/schedule.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ocokit {

/// One robust constraint of the shipped family
///   f(x, u) = <u, A x> + alpha_x/2 |x|^2 - alpha_u/2 |u - c|^2 + b
///             + max_j (slopes_j . x + offsets_j)      (optional)
/// which is convex in x and concave in u. An ellipsoidal uncertainty set
/// {c + E w : |w| <= 1} is expressed by folding E into A and using a ball.
struct RobustConstraint {
  Matrix A;  // dim_u x n
  Vector c;  // reference point of the uncertainty set
  double b = 0.0;
  Matrix slopes;  // k x n, k = 0 disables the max-affine part
  Vector offsets;
};

/// Structure constants as declared by the instance (never estimated).
struct RobustConstants {
  double G_X = 0.0;
  double G_U = 0.0;
  std::optional<double> alpha_X;
  std::optional<double> alpha_U;
  std::optional<double> L_X;
  std::optional<double> L_U;
};

class RobustInstance {
 public:
  RobustInstance(ProximalSetup x_setup, std::vector<ProximalSetup> u_setups, std::vector<RobustConstraint> cons,
                 double alpha_x, double alpha_u, RobustConstants constants);

  Index m() const { return static_cast<Index>(cons_.size()); }
  Index n() const { return x_setup_.dim(); }
  const ProximalSetup& x_setup() const { return x_setup_; }
  const ProximalSetup& u_setup(Index i) const { return u_setups_.at(static_cast<size_t>(i)); }
  const RobustConstraint& constraint(Index i) const { return cons_.at(static_cast<size_t>(i)); }
  double alpha_x() const { return alpha_x_; }
  double alpha_u() const { return alpha_u_; }
  const RobustConstants& constants() const { return constants_; }
  bool smooth_in_x() const;

  double value(Index i, const Vector& x, const Vector& u) const;
  Vector grad_x(Index i, const Vector& x, const Vector& u) const;
  Vector grad_u(Index i, const Vector& x, const Vector& u) const;

  /// Omega_U: the largest set width over the uncertainty sets.
  double omega_u() const;

  /// Valid structure constants for this family (operator-norm bounds).
  RobustConstants derived_constants() const;

  /// Spot-checks the declared constants on sampled points; throws ConfigError
  /// on a violation.
  void validate_constants(std::mt19937_64& rng, int samples = 200) const;

 private:
  ProximalSetup x_setup_;
  std::vector<ProximalSetup> u_setups_;
  std::vector<RobustConstraint> cons_;
  double alpha_x_;
  double alpha_u_;
  RobustConstants constants_;
};

enum class Scheme { kStrongStrong, kStrongUSmoothX, kSmoothUStrongX, kBaselineNonsmooth };
enum class UpdateRule { kMirrorDescent, kMirrorProx };

std::string to_string(Scheme scheme);
/// Accepts the four scheme names; "smoothU-smoothX" is rejected with a
/// ConfigError since both players would need to see the other's current move.
Scheme parse_scheme(const std::string& name);
/// u-side and x-side update rules to scheme. Mirror prox on both sides is
/// rejected.
Scheme scheme_from_rules(UpdateRule u_rule, UpdateRule x_rule, bool strongly_convex = true);

struct FeasibilityConfig {
  double eps = 0.1;
  double tau = 0.5;
  int horizon = 0;  // 0: smallest T for which both bounds fit their budgets
  Scheme scheme = Scheme::kStrongStrong;
  bool allow_doubling = true;
  long max_total_iterations = 1L << 20;
  OfflineOracle oracle{};
};

void validate(const FeasibilityConfig& config);

struct Certificates {
  /// max_i u-regret, reported with the comparator value and with its
  /// certified upper bound.
  double eps_circ = 0.0;
  double eps_circ_upper = 0.0;
  std::vector<double> u_regret;  // per constraint (upper)
  /// x-player certificate: the h-form, or the y-form for the smooth-x scheme.
  double eps_bullet = 0.0;
  double eps_bullet_upper = 0.0;
  bool y_form = false;
  /// max_i sum_t theta_t f^i(x_t, u_t^i).
  double max_term = 0.0;
  bool certified = true;
};

enum class Outcome { kFeasible, kInfeasible, kInconclusive };
std::string to_string(Outcome outcome);

struct Verdict {
  Outcome outcome = Outcome::kInconclusive;
  Certificates certificates;
  Vector x_bar;  // sum theta_t x_t
};

/// The case analysis: feasible when eps_circ <= tau eps and the max term is at
/// most (1 - tau) eps; infeasible when eps_bullet <= (1 - tau) eps and the max
/// term exceeds (1 - tau) eps. Uses the certified upper certificate values.
Outcome decide(const FeasibilityConfig& config, const Certificates& cert);

/// Index of the largest f^i(x, u^i), lowest index on ties.
Index argmax_constraint(const RobustInstance& inst, const Vector& x, const std::vector<Vector>& u);

/// max_i { sup_u sum theta f^i(x_t, u) - sum theta f^i(x_t, u_t^i) }.
/// us[t][i] is u_t^i. Returns (value, certified upper bound, per-constraint upper).
struct EpsCirc {
  double value = 0.0;
  double upper = 0.0;
  std::vector<double> per_constraint;
  bool certified = true;
};
EpsCirc eps_circ(const RobustInstance& inst, const std::vector<Vector>& xs,
                 const std::vector<std::vector<Vector>>& us, const WeightSchedule& theta,
                 const OfflineOracle& oracle = {});

/// sum theta h_t(x_t) - inf_x sum theta h_t(x), h_t(x) = max_i f^i(x, u_t^i).
OracleResult eps_bullet_comparator(const RobustInstance& inst, const std::vector<std::vector<Vector>>& us,
                                   const WeightSchedule& theta, const OfflineOracle& oracle = {});
struct EpsBullet {
  double value = 0.0;
  double upper = 0.0;
  bool certified = true;
};
EpsBullet eps_bullet(const RobustInstance& inst, const std::vector<Vector>& xs,
                     const std::vector<std::vector<Vector>>& us, const WeightSchedule& theta,
                     const OfflineOracle& oracle = {});

/// max_y sum theta phi_t(x_t, y) - inf_x sum theta phi_t(x, y_t) with
/// phi_t(x, y) = sum_i y_i f^i(x, u_t^i).
EpsBullet eps_bullet_y(const RobustInstance& inst, const std::vector<Vector>& xs,
                       const std::vector<std::vector<Vector>>& us, const std::vector<Vector>& ys,
                       const WeightSchedule& theta, const OfflineOracle& oracle = {});

/// max_i sum_t theta_t f^i(x_t, u_t^i).
double max_weighted_term(const RobustInstance& inst, const std::vector<Vector>& xs,
                         const std::vector<std::vector<Vector>>& us, const WeightSchedule& theta);

/// Product setup on X x Delta_m with omega = beta_x omega_x + beta_y entropy,
/// chosen so that the set width is 1 and phi(x, y) = sum_i y_i f^i(x, u^i) is
/// smooth with modulus L_X Omega_X + 2 G_X sqrt(Omega_X log m).
struct HybridSetup {
  ProximalSetup setup;
  double L = 0.0;
};
HybridSetup hybrid_setup(const ProximalSetup& x_setup, Index m, double L_X, double G_X);

/// Theoretical certificate bounds of the scheme at horizon T.
struct SchemeBounds {
  double circ = 0.0;      // on eps_circ (max over constraints)
  double bullet = 0.0;    // on eps_bullet (h-form or y-form)
};
SchemeBounds scheme_bounds(const RobustInstance& inst, Scheme scheme, int T);

/// Smallest T with bounds.circ <= tau eps and bounds.bullet <= (1 - tau) eps.
int horizon_from_bounds(const RobustInstance& inst, const FeasibilityConfig& config);

/// Who may read what. A decision of `reader` at step t may read the other
/// channel up to index t - lag and its own channel up to t - 1.
enum class Channel { kX, kU };
class InformationLedger {
 public:
  InformationLedger(int x_reads_u_lag, int u_reads_x_lag);
  static InformationLedger for_scheme(Scheme scheme);

  void publish(Channel channel, int t);
  /// Throws InformationFlowError when the read violates the contract or the
  /// data has not been produced yet.
  void read(Channel reader, int step, Channel source, int index) const;
  long reads() const { return reads_; }

 private:
  int x_reads_u_lag_;
  int u_reads_x_lag_;
  int published_[2] = {0, 0};
  mutable long reads_ = 0;
};

struct SchemeRun {
  Verdict verdict;
  FeasibilityConfig config;
  int horizon = 0;
  std::vector<int> attempted_horizons;
  long total_iterations = 0;
  SchemeBounds bounds;
  WeightSchedule theta = WeightSchedule::uniform(1);
  std::vector<Vector> xs;
  std::vector<std::vector<Vector>> us;
  std::vector<Vector> ys;  // smooth-x scheme only
};

/// Runs the combined scheme at a fixed horizon (no doubling).
SchemeRun run_scheme_once(const RobustInstance& inst, const FeasibilityConfig& config, int T);

/// Runs the scheme at config.horizon (or the bound-derived horizon) and, if
/// the verdict is inconclusive and doubling is allowed, doubles T until a
/// verdict is reached or the iteration cap would be exceeded.
SchemeRun run_scheme(const RobustInstance& inst, const FeasibilityConfig& config);

struct PlantOptions {
  Index m = 3;
  Index n = 5;
  Index dim_u = 5;
  double radius_x = 1.0;
  double radius_u = 0.5;
  double alpha_x = 1.0;
  double alpha_u = 1.0;
  double coupling = 0.5;  // scale of the entries of A_i
  bool feasible = true;
  double eps = 0.1;
  bool box_x = false;
};

/// Random instance whose robust optimum min_x max_i sup_u f^i(x, u) is known:
/// every constraint is active at x = 0 with 0 in the convex hull of their
/// gradients, so the optimum is the common offset b. Feasible instances use
/// b < 0; infeasible ones use b > eps.
struct PlantedInstance {
  RobustInstance instance;
  double optimum;
};
PlantedInstance plant_instance(std::mt19937_64& rng, const PlantOptions& opts);

}  // namespace ocokit
