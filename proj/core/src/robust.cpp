#include "ocokit/robust.hpp"

#include "ocokit/engine.hpp"
#include "ocokit/errors.hpp"
#include "ocokit/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ocokit {

namespace {

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

double max_piece(const RobustConstraint& c, const Vector& x) {
  if (c.slopes.rows() == 0) return 0.0;
  return (c.slopes * x + c.offsets).maxCoeff();
}

Index active_piece(const RobustConstraint& c, const Vector& x) {
  Index j = 0;
  (c.slopes * x + c.offsets).maxCoeff(&j);
  return j;
}

// f^i(., u) as a function of x: alpha_x/2 |x|^2 + max_j (row_j . x + off_j).
void append_x_section(const RobustInstance& inst, Index i, const Vector& u, Matrix& rows, Vector& offs,
                      Index& at) {
  const auto& c = inst.constraint(i);
  const Vector lin = c.A.transpose() * u;
  const double base = c.b - 0.5 * inst.alpha_u() * (u - c.c).squaredNorm();
  if (c.slopes.rows() == 0) {
    rows.row(at) = lin.transpose();
    offs[at++] = base;
    return;
  }
  for (Index j = 0; j < c.slopes.rows(); ++j) {
    rows.row(at) = (lin + c.slopes.row(j).transpose()).transpose();
    offs[at++] = base + c.offsets[j];
  }
}

Index pieces_of(const RobustConstraint& c) { return std::max<Index>(1, c.slopes.rows()); }

PiecewiseQuadratic x_section(const RobustInstance& inst, Index i, const Vector& u) {
  PiecewiseQuadratic q;
  q.rho = inst.alpha_x();
  q.anchor = Vector::Zero(inst.n());
  q.slopes.resize(pieces_of(inst.constraint(i)), inst.n());
  q.offsets.resize(q.slopes.rows());
  Index at = 0;
  append_x_section(inst, i, u, q.slopes, q.offsets, at);
  return q;
}

// h(x) = max_i f^i(x, u^i).
PiecewiseQuadratic h_section(const RobustInstance& inst, const std::vector<Vector>& u) {
  Index k = 0;
  for (Index i = 0; i < inst.m(); ++i) k += pieces_of(inst.constraint(i));
  PiecewiseQuadratic q;
  q.rho = inst.alpha_x();
  q.anchor = Vector::Zero(inst.n());
  q.slopes.resize(k, inst.n());
  q.offsets.resize(k);
  Index at = 0;
  for (Index i = 0; i < inst.m(); ++i) append_x_section(inst, i, u[static_cast<size_t>(i)], q.slopes, q.offsets, at);
  return q;
}

void check_trace(const RobustInstance& inst, const std::vector<Vector>& xs,
                 const std::vector<std::vector<Vector>>& us, const WeightSchedule& theta) {
  const auto T = static_cast<size_t>(theta.horizon());
  if (xs.size() != T || us.size() != T) throw InputError("robust certificate: trace length differs from the horizon");
  for (const auto& ut : us) {
    if (static_cast<Index>(ut.size()) != inst.m()) throw InputError("robust certificate: need one u per constraint");
  }
}

double need(const std::optional<double>& v, const char* name, Scheme scheme) {
  if (!v) throw ConfigError("scheme " + to_string(scheme) + " needs the structure constant " + name);
  if (!(*v > 0.0) || !std::isfinite(*v)) {
    throw ConfigError(std::string("structure constant ") + name + " must be positive and finite");
  }
  return *v;
}

}  // namespace

// ---------------------------------------------------------------- instance

RobustInstance::RobustInstance(ProximalSetup x_setup, std::vector<ProximalSetup> u_setups,
                               std::vector<RobustConstraint> cons, double alpha_x, double alpha_u,
                               RobustConstants constants)
    : x_setup_(std::move(x_setup)),
      u_setups_(std::move(u_setups)),
      cons_(std::move(cons)),
      alpha_x_(alpha_x),
      alpha_u_(alpha_u),
      constants_(constants) {
  if (cons_.empty()) throw ConfigError("robust instance needs at least one constraint");
  if (u_setups_.size() != cons_.size()) throw ConfigError("robust instance: one uncertainty set per constraint");
  if (x_setup_.generator() != Generator::kEuclidean) throw ConfigError("robust instance: X must use the Euclidean setup");
  if (!(alpha_x_ >= 0.0) || !(alpha_u_ >= 0.0)) throw ConfigError("robust instance: curvatures must be nonnegative");
  for (size_t i = 0; i < cons_.size(); ++i) {
    const auto& c = cons_[i];
    const auto& U = u_setups_[i];
    if (U.generator() != Generator::kEuclidean) throw ConfigError("robust instance: U must use the Euclidean setup");
    if (c.A.rows() != U.dim() || c.A.cols() != x_setup_.dim()) {
      throw ConfigError("robust instance: constraint " + std::to_string(i) + " has A of the wrong shape");
    }
    if (c.c.size() != U.dim()) throw ConfigError("robust instance: constraint " + std::to_string(i) + " has c of the wrong size");
    if (c.slopes.rows() > 0 && (c.slopes.cols() != x_setup_.dim() || c.offsets.size() != c.slopes.rows())) {
      throw ConfigError("robust instance: constraint " + std::to_string(i) + " has malformed pieces");
    }
  }
  if (!(constants_.G_X > 0.0) || !(constants_.G_U > 0.0)) throw ConfigError("robust instance: G_X and G_U must be positive");
}

bool RobustInstance::smooth_in_x() const {
  return std::all_of(cons_.begin(), cons_.end(), [](const RobustConstraint& c) { return c.slopes.rows() <= 1; });
}

double RobustInstance::value(Index i, const Vector& x, const Vector& u) const {
  const auto& c = constraint(i);
  return u.dot(c.A * x) + 0.5 * alpha_x_ * x.squaredNorm() - 0.5 * alpha_u_ * (u - c.c).squaredNorm() + c.b +
         max_piece(c, x);
}

Vector RobustInstance::grad_x(Index i, const Vector& x, const Vector& u) const {
  const auto& c = constraint(i);
  Vector g = c.A.transpose() * u + alpha_x_ * x;
  if (c.slopes.rows() > 0) g += c.slopes.row(active_piece(c, x)).transpose();
  return g;
}

Vector RobustInstance::grad_u(Index i, const Vector& x, const Vector& u) const {
  const auto& c = constraint(i);
  return c.A * x - alpha_u_ * (u - c.c);
}

double RobustInstance::omega_u() const {
  double w = 0.0;
  for (const auto& U : u_setups_) w = std::max(w, U.set_width());
  return w;
}

RobustConstants RobustInstance::derived_constants() const {
  const double rx = x_setup_.max_euclidean_distance(Vector::Zero(n()));
  RobustConstants k;
  for (Index i = 0; i < m(); ++i) {
    const auto& c = constraint(i);
    const auto& U = u_setup(i);
    const double a = spectral_norm(c.A);
    const double s = c.slopes.rows() > 0 ? c.slopes.rowwise().norm().maxCoeff() : 0.0;
    k.G_X = std::max(k.G_X, a * U.max_euclidean_distance(Vector::Zero(U.dim())) + alpha_x_ * rx + s);
    k.G_U = std::max(k.G_U, a * rx + alpha_u_ * U.max_euclidean_distance(c.c));
  }
  if (alpha_x_ > 0.0) k.alpha_X = alpha_x_;
  if (alpha_u_ > 0.0) k.alpha_U = alpha_u_;
  if (smooth_in_x()) k.L_X = alpha_x_;
  if (alpha_u_ > 0.0) k.L_U = alpha_u_;
  return k;
}

void RobustInstance::validate_constants(std::mt19937_64& rng, int samples) const {
  const auto& k = constants_;
  auto fail = [](const std::string& what) { throw ConfigError("declared constant is violated: " + what); };
  if (k.alpha_X && *k.alpha_X > alpha_x_ * (1 + 1e-12)) fail("alpha_X exceeds the curvature in x");
  if (k.alpha_U && *k.alpha_U > alpha_u_ * (1 + 1e-12)) fail("alpha_U exceeds the curvature in u");
  if (k.L_X && (!smooth_in_x() || *k.L_X < alpha_x_ * (1 - 1e-12))) fail("L_X is not a smoothness modulus in x");
  if (k.L_U && *k.L_U < alpha_u_ * (1 - 1e-12)) fail("L_U is below the curvature in u");

  // Gradients peak on the boundary, so push half of the samples outward.
  std::bernoulli_distribution edge(0.5);
  auto draw = [&](const ProximalSetup& s) {
    Vector z = s.sample(rng);
    if (edge(rng) && s.kind() == DomainKind::kBall && (z - s.center()).norm() > 0) {
      z = s.center() + s.radius() * (z - s.center()).normalized();
    }
    return z;
  };
  const double tol = 1e-9;
  for (int r = 0; r < samples; ++r) {
    const Vector x = draw(x_setup_);
    for (Index i = 0; i < m(); ++i) {
      const Vector u = draw(u_setup(i));
      if (grad_x(i, x, u).norm() > k.G_X * (1 + tol) + tol) fail("G_X (constraint " + std::to_string(i) + ")");
      if (grad_u(i, x, u).norm() > k.G_U * (1 + tol) + tol) fail("G_U (constraint " + std::to_string(i) + ")");
    }
  }
}

// ---------------------------------------------------------------- schemes

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kStrongStrong:
      return "strong-strong";
    case Scheme::kStrongUSmoothX:
      return "strongU-smoothX";
    case Scheme::kSmoothUStrongX:
      return "smoothU-strongX";
    case Scheme::kBaselineNonsmooth:
      return "baseline-nonsmooth";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "strong-strong") return Scheme::kStrongStrong;
  if (name == "strongU-smoothX") return Scheme::kStrongUSmoothX;
  if (name == "smoothU-strongX") return Scheme::kSmoothUStrongX;
  if (name == "baseline-nonsmooth" || name == "baseline") return Scheme::kBaselineNonsmooth;
  if (name == "smoothU-smoothX") {
    throw ConfigError("smoothU-smoothX: mirror prox on both sides needs each player to see the other's current move");
  }
  throw ConfigError("unknown scheme: " + name);
}

Scheme scheme_from_rules(UpdateRule u_rule, UpdateRule x_rule, bool strongly_convex) {
  const bool u_mp = u_rule == UpdateRule::kMirrorProx;
  const bool x_mp = x_rule == UpdateRule::kMirrorProx;
  if (u_mp && x_mp) {
    throw ConfigError("mirror prox on both sides needs each player to see the other's current move");
  }
  if (u_mp) return Scheme::kSmoothUStrongX;
  if (x_mp) return Scheme::kStrongUSmoothX;
  return strongly_convex ? Scheme::kStrongStrong : Scheme::kBaselineNonsmooth;
}

void validate(const FeasibilityConfig& c) {
  if (!(c.eps > 0.0) || !std::isfinite(c.eps)) throw ConfigError("eps must be positive");
  if (!(c.tau > 0.0 && c.tau < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (c.horizon < 0) throw ConfigError("horizon must be nonnegative");
  if (c.max_total_iterations < 1) throw ConfigError("max_total_iterations must be positive");
}

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kFeasible:
      return "feasible";
    case Outcome::kInfeasible:
      return "infeasible";
    case Outcome::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

Outcome decide(const FeasibilityConfig& config, const Certificates& cert) {
  const double budget_circ = config.tau * config.eps;
  const double budget_bullet = (1.0 - config.tau) * config.eps;
  if (cert.eps_circ_upper <= budget_circ && cert.max_term <= budget_bullet) return Outcome::kFeasible;
  if (cert.eps_bullet_upper <= budget_bullet && cert.max_term > budget_bullet) return Outcome::kInfeasible;
  return Outcome::kInconclusive;
}

Index argmax_constraint(const RobustInstance& inst, const Vector& x, const std::vector<Vector>& u) {
  Index best = 0;
  double v = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < inst.m(); ++i) {
    const double fi = inst.value(i, x, u[static_cast<size_t>(i)]);
    if (fi > v) {
      v = fi;
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------- certificates

EpsCirc eps_circ(const RobustInstance& inst, const std::vector<Vector>& xs, const std::vector<std::vector<Vector>>& us,
                 const WeightSchedule& theta, const OfflineOracle& oracle) {
  check_trace(inst, xs, us, theta);
  const int T = theta.horizon();
  Vector x_bar = Vector::Zero(inst.n());
  double rest = 0.0;  // sum theta (alpha_x/2 |x_t|^2 + max part), shared by all constraints
  for (int t = 1; t <= T; ++t) {
    const auto& x = xs[static_cast<size_t>(t - 1)];
    x_bar += theta(t) * x;
    rest += theta(t) * 0.5 * inst.alpha_x() * x.squaredNorm();
  }
  EpsCirc out;
  out.value = -std::numeric_limits<double>::infinity();
  out.upper = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < inst.m(); ++i) {
    const auto& c = inst.constraint(i);
    double played = 0.0;
    double pieces = 0.0;
    for (int t = 1; t <= T; ++t) {
      const auto& x = xs[static_cast<size_t>(t - 1)];
      played += theta(t) * inst.value(i, x, us[static_cast<size_t>(t - 1)][static_cast<size_t>(i)]);
      pieces += theta(t) * max_piece(c, x);
    }
    // -sum theta f^i(x_t, u) = alpha_u/2 |u - c|^2 - <A x_bar, u> - (b + rest + pieces).
    PiecewiseQuadratic neg;
    neg.rho = inst.alpha_u();
    neg.anchor = c.c;
    neg.slopes = -(c.A * x_bar).transpose();
    neg.offsets = Vector::Constant(1, -(c.b + rest + pieces));
    const double w = 1.0;
    const OracleResult sup = maximize_concave(std::span<const PiecewiseQuadratic>(&neg, 1),
                                              std::span<const double>(&w, 1), inst.u_setup(i), oracle);
    out.value = std::max(out.value, sup.value - played);
    out.upper = std::max(out.upper, sup.bound - played);
    out.per_constraint.push_back(sup.bound - played);
    out.certified = out.certified && sup.certified;
  }
  return out;
}

OracleResult eps_bullet_comparator(const RobustInstance& inst, const std::vector<std::vector<Vector>>& us,
                                   const WeightSchedule& theta, const OfflineOracle& oracle) {
  std::vector<PiecewiseQuadratic> terms;
  terms.reserve(us.size());
  for (const auto& ut : us) terms.push_back(h_section(inst, ut));
  return minimize_weighted_sum(terms, theta.values(), inst.x_setup(), oracle);
}

EpsBullet eps_bullet(const RobustInstance& inst, const std::vector<Vector>& xs,
                     const std::vector<std::vector<Vector>>& us, const WeightSchedule& theta,
                     const OfflineOracle& oracle) {
  check_trace(inst, xs, us, theta);
  double played = 0.0;
  for (int t = 1; t <= theta.horizon(); ++t) {
    const auto& x = xs[static_cast<size_t>(t - 1)];
    const auto& ut = us[static_cast<size_t>(t - 1)];
    const Index i = argmax_constraint(inst, x, ut);
    played += theta(t) * inst.value(i, x, ut[static_cast<size_t>(i)]);
  }
  const OracleResult cmp = eps_bullet_comparator(inst, us, theta, oracle);
  return {played - cmp.value, played - cmp.bound, cmp.certified};
}

EpsBullet eps_bullet_y(const RobustInstance& inst, const std::vector<Vector>& xs,
                       const std::vector<std::vector<Vector>>& us, const std::vector<Vector>& ys,
                       const WeightSchedule& theta, const OfflineOracle& oracle) {
  check_trace(inst, xs, us, theta);
  if (ys.size() != xs.size()) throw InputError("eps_bullet_y: one y per step is required");
  std::vector<PiecewiseQuadratic> terms;
  std::vector<double> weights;
  for (int t = 1; t <= theta.horizon(); ++t) {
    const auto& y = ys[static_cast<size_t>(t - 1)];
    if (y.size() != inst.m()) throw InputError("eps_bullet_y: y must have one entry per constraint");
    for (Index i = 0; i < inst.m(); ++i) {
      terms.push_back(x_section(inst, i, us[static_cast<size_t>(t - 1)][static_cast<size_t>(i)]));
      weights.push_back(theta(t) * std::max(0.0, y[i]));
    }
  }
  const OracleResult inf = minimize_weighted_sum(terms, weights, inst.x_setup(), oracle);
  const double sup = max_weighted_term(inst, xs, us, theta);
  return {sup - inf.value, sup - inf.bound, inf.certified};
}

double max_weighted_term(const RobustInstance& inst, const std::vector<Vector>& xs,
                         const std::vector<std::vector<Vector>>& us, const WeightSchedule& theta) {
  check_trace(inst, xs, us, theta);
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < inst.m(); ++i) {
    double s = 0.0;
    for (int t = 1; t <= theta.horizon(); ++t) {
      s += theta(t) * inst.value(i, xs[static_cast<size_t>(t - 1)], us[static_cast<size_t>(t - 1)][static_cast<size_t>(i)]);
    }
    best = std::max(best, s);
  }
  return best;
}

// ---------------------------------------------------------------- bounds

HybridSetup hybrid_setup(const ProximalSetup& x_setup, Index m, double L_X, double G_X) {
  if (m < 2) throw ConfigError("the smooth x-side scheme needs at least two constraints");
  if (!(G_X > 0.0) || !(L_X >= 0.0)) throw ConfigError("hybrid setup: need G_X > 0 and L_X >= 0");
  const double omega_x = x_setup.set_width();
  const double log_m = std::log(static_cast<double>(m));
  if (!(omega_x > 0.0)) throw ConfigError("hybrid setup: X must have positive set width");
  const double a = L_X * omega_x;
  const double b = 2.0 * G_X * std::sqrt(omega_x * log_m);
  // Split the unit width so that Young's inequality on the cross term is tight.
  const double share_y = b / (2.0 * (a + b));
  HybridSetup h{ProximalSetup::product(x_setup, ProximalSetup::entropy_simplex(m), (1.0 - share_y) / omega_x,
                                       share_y / log_m),
                a + b};
  return h;
}

SchemeBounds scheme_bounds(const RobustInstance& inst, Scheme scheme, int T) {
  if (T < 1) throw ConfigError("horizon must be positive");
  const auto& k = inst.constants();
  const double Tp1 = T + 1.0;
  const double sup_inc = 2.0 / Tp1;  // sup theta of the increasing weights
  SchemeBounds b;
  switch (scheme) {
    case Scheme::kStrongStrong:
      b.circ = 2.0 * k.G_U * k.G_U / (need(k.alpha_U, "alpha_U", scheme) * Tp1);
      b.bullet = 2.0 * k.G_X * k.G_X / (need(k.alpha_X, "alpha_X", scheme) * Tp1);
      break;
    case Scheme::kStrongUSmoothX: {
      b.circ = 2.0 * k.G_U * k.G_U / (need(k.alpha_U, "alpha_U", scheme) * Tp1);
      if (!k.L_X) need(k.L_X, "L_X", scheme);
      b.bullet = hybrid_setup(inst.x_setup(), inst.m(), *k.L_X, k.G_X).L * sup_inc;
      break;
    }
    case Scheme::kSmoothUStrongX:
      b.circ = inst.omega_u() * need(k.L_U, "L_U", scheme) * sup_inc;
      b.bullet = 2.0 * k.G_X * k.G_X / (need(k.alpha_X, "alpha_X", scheme) * Tp1);
      break;
    case Scheme::kBaselineNonsmooth:
      // Uniform weights: sqrt(2 Omega G^2 / T).
      b.circ = std::sqrt(2.0 * inst.omega_u() * k.G_U * k.G_U / T);
      b.bullet = std::sqrt(2.0 * inst.x_setup().set_width() * k.G_X * k.G_X / T);
      break;
  }
  return b;
}

int horizon_from_bounds(const RobustInstance& inst, const FeasibilityConfig& config) {
  validate(config);
  auto fits = [&](int T) {
    const auto b = scheme_bounds(inst, config.scheme, T);
    return b.circ <= config.tau * config.eps && b.bullet <= (1.0 - config.tau) * config.eps;
  };
  constexpr int kCap = 1 << 30;
  int hi = 1;
  while (!fits(hi)) {
    if (hi >= kCap / 2) throw ConfigError("no horizon below 2^30 meets the requested accuracy");
    hi *= 2;
  }
  int lo = hi / 2;  // fits(lo) is false unless lo == 0
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (fits(mid) ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------- information flow

InformationLedger::InformationLedger(int x_reads_u_lag, int u_reads_x_lag)
    : x_reads_u_lag_(x_reads_u_lag), u_reads_x_lag_(u_reads_x_lag) {
  if (x_reads_u_lag < 0 || u_reads_x_lag < 0) throw ConfigError("information lags must be nonnegative");
  if (x_reads_u_lag == 0 && u_reads_x_lag == 0) {
    throw ConfigError("both players cannot see each other's current move");
  }
}

InformationLedger InformationLedger::for_scheme(Scheme scheme) {
  switch (scheme) {
    case Scheme::kStrongUSmoothX:
      return {0, 1};
    case Scheme::kSmoothUStrongX:
      return {1, 0};
    default:
      return {1, 1};
  }
}

void InformationLedger::publish(Channel channel, int t) {
  int& last = published_[channel == Channel::kX ? 0 : 1];
  if (t != last + 1) throw InformationFlowError("decisions must be published in order");
  last = t;
}

void InformationLedger::read(Channel reader, int step, Channel source, int index) const {
  ++reads_;
  auto name = [](Channel c) { return c == Channel::kX ? std::string("x") : std::string("u"); };
  const int lag = reader == source ? 1 : (reader == Channel::kX ? x_reads_u_lag_ : u_reads_x_lag_);
  if (index > step - lag) {
    throw InformationFlowError("the " + name(reader) + "-decision at step " + std::to_string(step) + " may not read " +
                               name(source) + "_" + std::to_string(index));
  }
  if (index > published_[source == Channel::kX ? 0 : 1]) {
    throw InformationFlowError(name(source) + "_" + std::to_string(index) + " has not been produced yet");
  }
}

// ---------------------------------------------------------------- runs

namespace {

Vector stack_values(const RobustInstance& inst, const Vector& x, const std::vector<Vector>& u) {
  Vector v(inst.m());
  for (Index i = 0; i < inst.m(); ++i) v[i] = inst.value(i, x, u[static_cast<size_t>(i)]);
  return v;
}

// F_t(x, y) = [sum_i y_i grad_x f^i(x, u^i); -(f^i(x, u^i))_i].
Vector hybrid_operator(const RobustInstance& inst, const Vector& x, const Vector& y, const std::vector<Vector>& u) {
  Vector gx = Vector::Zero(inst.n());
  for (Index i = 0; i < inst.m(); ++i) gx += y[i] * inst.grad_x(i, x, u[static_cast<size_t>(i)]);
  return ProximalSetup::concat(gx, -stack_values(inst, x, u));
}

}  // namespace

SchemeRun run_scheme_once(const RobustInstance& inst, const FeasibilityConfig& config, int T) {
  validate(config);
  if (T < 1) throw ConfigError("horizon must be positive");
  const Scheme scheme = config.scheme;
  const auto& k = inst.constants();
  const auto m = static_cast<size_t>(inst.m());

  SchemeRun run;
  run.config = config;
  run.horizon = T;
  run.bounds = scheme_bounds(inst, scheme, T);
  run.theta = scheme == Scheme::kBaselineNonsmooth ? WeightSchedule::uniform(T) : WeightSchedule::increasing_linear(T);
  const WeightSchedule& theta = run.theta;
  EngineOptions quiet;
  quiet.check_inequality = false;

  // u side: one engine per constraint.
  const bool u_prox = scheme == Scheme::kSmoothUStrongX;
  std::vector<MirrorDescent> u_md;
  std::vector<MirrorProx> u_mp;
  for (size_t i = 0; i < m; ++i) {
    const auto& U = inst.u_setup(static_cast<Index>(i));
    StepParams p;
    StepKind kind = StepKind::kInverseLinear;
    if (u_prox) {
      kind = StepKind::kConstantSmooth;
      p.L = need(k.L_U, "L_U", scheme);
    } else if (scheme == Scheme::kBaselineNonsmooth) {
      kind = StepKind::kConstantNonsmooth;
      p.omega = U.set_width();
      p.G = k.G_U;
    } else {
      p.alpha = need(k.alpha_U, "alpha_U", scheme);
    }
    auto steps = StepSchedule::make(kind, p, theta);
    if (u_prox) {
      u_mp.emplace_back(U, steps, quiet);
    } else {
      u_md.emplace_back(U, steps, quiet);
    }
  }

  // x side.
  const bool x_prox = scheme == Scheme::kStrongUSmoothX;
  std::optional<MirrorDescent> x_md;
  std::optional<MirrorProx> x_mp;
  if (x_prox) {
    if (!inst.smooth_in_x()) throw ConfigError("strongU-smoothX needs constraints that are smooth in x");
    const auto hybrid = hybrid_setup(inst.x_setup(), inst.m(), need(k.L_X, "L_X", scheme), k.G_X);
    StepParams p;
    p.L = hybrid.L;
    x_mp.emplace(hybrid.setup, StepSchedule::make(StepKind::kConstantSmooth, p, theta), quiet);
  } else {
    StepParams p;
    StepKind kind = StepKind::kInverseLinear;
    if (scheme == Scheme::kBaselineNonsmooth) {
      kind = StepKind::kConstantNonsmooth;
      p.omega = inst.x_setup().set_width();
      p.G = k.G_X;
    } else {
      p.alpha = need(k.alpha_X, "alpha_X", scheme);
    }
    x_md.emplace(inst.x_setup(), StepSchedule::make(kind, p, theta), quiet);
  }

  InformationLedger ledger = InformationLedger::for_scheme(scheme);
  const bool weighted_x = scheme == Scheme::kBaselineNonsmooth;
  const bool weighted_u = scheme == Scheme::kBaselineNonsmooth;
  run.xs.reserve(static_cast<size_t>(T));
  run.us.reserve(static_cast<size_t>(T));

  for (int t = 1; t <= T; ++t) {
    const double th = theta(t);
    std::vector<Vector> ut(m);
    Vector xt;

    auto u_from_past = [&]() {
      for (size_t i = 0; i < m; ++i) ut[i] = u_md[i].current();
      ledger.publish(Channel::kU, t);
    };

    switch (scheme) {
      case Scheme::kStrongStrong:
      case Scheme::kBaselineNonsmooth:
        xt = x_md->current();
        ledger.publish(Channel::kX, t);
        u_from_past();
        break;
      case Scheme::kStrongUSmoothX: {
        u_from_past();
        ledger.read(Channel::kX, t, Channel::kU, t);
        const Vector& v = x_mp->leader();
        const Index n = inst.n();
        const Vector eta = th * hybrid_operator(inst, v.head(n), v.tail(inst.m()), ut);
        const Vector& z = x_mp->propose(eta);
        xt = z.head(n);
        run.ys.emplace_back(z.tail(inst.m()));
        ledger.publish(Channel::kX, t);
        x_mp->advance(th * hybrid_operator(inst, xt, run.ys.back(), ut));
        break;
      }
      case Scheme::kSmoothUStrongX:
        xt = x_md->current();
        ledger.publish(Channel::kX, t);
        ledger.read(Channel::kU, t, Channel::kX, t);
        for (size_t i = 0; i < m; ++i) {
          const auto ii = static_cast<Index>(i);
          auto& eng = u_mp[i];
          eng.propose(-th * inst.grad_u(ii, xt, eng.leader()));
          ut[i] = eng.current();
          eng.advance(-th * inst.grad_u(ii, xt, ut[i]));
        }
        ledger.publish(Channel::kU, t);
        break;
    }

    // Updates that produce step t+1 from step t.
    if (x_md) {
      ledger.read(Channel::kX, t + 1, Channel::kX, t);
      ledger.read(Channel::kX, t + 1, Channel::kU, t);
      const Index i = argmax_constraint(inst, xt, ut);
      const Vector g = inst.grad_x(i, xt, ut[static_cast<size_t>(i)]);
      x_md->advance(weighted_x ? Vector(th * g) : g);
    }
    if (!u_prox) {
      ledger.read(Channel::kU, t + 1, Channel::kX, t);
      ledger.read(Channel::kU, t + 1, Channel::kU, t);
      for (size_t i = 0; i < m; ++i) {
        const Vector g = -inst.grad_u(static_cast<Index>(i), xt, ut[i]);
        u_md[i].advance(weighted_u ? Vector(th * g) : g);
      }
    }
    run.xs.push_back(std::move(xt));
    run.us.push_back(std::move(ut));
  }

  Certificates cert;
  const EpsCirc circ = eps_circ(inst, run.xs, run.us, theta, config.oracle);
  cert.eps_circ = circ.value;
  cert.eps_circ_upper = circ.upper;
  cert.u_regret = circ.per_constraint;
  const EpsBullet bullet = x_prox ? eps_bullet_y(inst, run.xs, run.us, run.ys, theta, config.oracle)
                                  : eps_bullet(inst, run.xs, run.us, theta, config.oracle);
  cert.eps_bullet = bullet.value;
  cert.eps_bullet_upper = bullet.upper;
  cert.y_form = x_prox;
  cert.max_term = max_weighted_term(inst, run.xs, run.us, theta);
  cert.certified = circ.certified && bullet.certified;

  run.verdict.certificates = cert;
  run.verdict.outcome = decide(config, cert);
  run.verdict.x_bar = Vector::Zero(inst.n());
  for (int t = 1; t <= T; ++t) run.verdict.x_bar += theta(t) * run.xs[static_cast<size_t>(t - 1)];
  run.total_iterations = T;
  run.attempted_horizons = {T};
  return run;
}

SchemeRun run_scheme(const RobustInstance& inst, const FeasibilityConfig& config) {
  validate(config);
  int T = config.horizon > 0 ? config.horizon : horizon_from_bounds(inst, config);
  long total = 0;
  std::vector<int> attempted;
  while (true) {
    if (total + T > config.max_total_iterations && !attempted.empty()) break;
    SchemeRun run = run_scheme_once(inst, config, T);
    total += T;
    attempted.push_back(T);
    run.total_iterations = total;
    run.attempted_horizons = attempted;
    const bool stop = run.verdict.outcome != Outcome::kInconclusive || !config.allow_doubling ||
                      total + 2L * T > config.max_total_iterations || T > std::numeric_limits<int>::max() / 2;
    if (stop) return run;
    T *= 2;
  }
  throw OracleError("run_scheme: iteration cap reached before the first run");
}

// ---------------------------------------------------------------- planted instances

PlantedInstance plant_instance(std::mt19937_64& rng, const PlantOptions& o) {
  if (o.m < 2 || o.n < 1 || o.dim_u < 1) throw ConfigError("plant_instance: need m >= 2 and positive dimensions");
  if (!(o.alpha_u > 0.0)) throw ConfigError("plant_instance: alpha_u must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const ProximalSetup X = o.box_x ? ProximalSetup::euclidean_box(Vector::Constant(o.n, -o.radius_x),
                                                                 Vector::Constant(o.n, o.radius_x))
                                  : ProximalSetup::euclidean_ball(o.n, o.radius_x);
  std::vector<ProximalSetup> Us;
  std::vector<RobustConstraint> cons(static_cast<size_t>(o.m));
  Vector w(o.m);
  for (Index i = 0; i < o.m; ++i) {
    auto& c = cons[static_cast<size_t>(i)];
    c.c = Vector::NullaryExpr(o.dim_u, [&] { return gauss(rng); });
    c.c /= c.c.norm();
    c.A = Matrix::NullaryExpr(o.dim_u, o.n, [&] { return o.coupling * gauss(rng); });
    w[i] = 0.2 + unif(rng);
  }
  w /= w.sum();
  // Make sum_i w_i A_i' c_i = 0 by correcting the last A along c.
  Vector g = Vector::Zero(o.n);
  for (Index i = 0; i + 1 < o.m; ++i) g += w[i] * cons[static_cast<size_t>(i)].A.transpose() * cons[static_cast<size_t>(i)].c;
  auto& last = cons.back();
  const Vector target = -g / w[o.m - 1];
  last.A += last.c * (target - last.A.transpose() * last.c).transpose() / last.c.squaredNorm();

  const double b = o.feasible ? -o.eps * (0.1 + 0.9 * unif(rng)) : o.eps * (1.1 + 0.9 * unif(rng));
  for (auto& c : cons) {
    c.b = b;
    Us.push_back(ProximalSetup::euclidean_ball(c.c, o.radius_u));
  }
  RobustInstance probe(X, Us, cons, o.alpha_x, o.alpha_u, RobustConstants{1.0, 1.0, {}, {}, {}, {}});
  return {RobustInstance(X, Us, cons, o.alpha_x, o.alpha_u, probe.derived_constants()), b};
}

}  // namespace ocokit
