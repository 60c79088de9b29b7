#include "ocokit/jeo.hpp"

#include "ocokit/engine.hpp"
#include "ocokit/errors.hpp"
#include "ocokit/hash.hpp"

#include <cmath>
#include <limits>

namespace ocokit {

namespace {

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------- objective

double JeoObjective::value(const Vector& x, const Vector& u) const {
  double v = 0.5 * rho * (x - P * u - q).squaredNorm();
  if (pieces() > 0) v += (slopes * x + data * u + offsets).maxCoeff();
  return v;
}

Vector JeoObjective::grad_x(const Vector& x, const Vector& u) const {
  Vector g = rho * (x - P * u - q);
  if (pieces() > 0) {
    Index j = 0;
    (slopes * x + data * u + offsets).maxCoeff(&j);
    g += slopes.row(j).transpose();
  }
  return g;
}

PiecewiseQuadratic JeoObjective::section(const Vector& u) const {
  PiecewiseQuadratic s;
  s.rho = rho;
  s.anchor = P * u + q;
  if (pieces() > 0) {
    s.slopes = slopes;
    s.offsets = data * u + offsets;
  } else {
    s.slopes = Matrix::Zero(1, dim_x());
    s.offsets = Vector::Zero(1);
  }
  return s;
}

JeoObjective JeoObjective::tracking(double rho, Index dim) {
  JeoObjective f;
  f.rho = rho;
  f.P = Matrix::Identity(dim, dim);
  f.q = Vector::Zero(dim);
  f.slopes.resize(0, dim);
  f.data.resize(0, dim);
  return f;
}

JeoObjective JeoObjective::max_affine(double alpha, Matrix slopes, Matrix data, Vector offsets) {
  if (slopes.rows() != data.rows() || slopes.rows() != offsets.size() || slopes.rows() == 0) {
    throw ConfigError("max_affine objective: slopes, data and offsets must have the same positive row count");
  }
  JeoObjective f;
  f.rho = alpha;
  f.P = Matrix::Zero(slopes.cols(), data.cols());
  f.q = Vector::Zero(slopes.cols());
  f.slopes = std::move(slopes);
  f.data = std::move(data);
  f.offsets = std::move(offsets);
  return f;
}

JeoObjective JeoObjective::l1_distance(Index dim) {
  if (dim < 1 || dim > 10) throw ConfigError("l1_distance objective supports 1 <= dim <= 10");
  const Index k = Index{1} << dim;
  Matrix s(k, dim);
  for (Index r = 0; r < k; ++r) {
    for (Index i = 0; i < dim; ++i) s(r, i) = ((r >> i) & 1) ? 1.0 : -1.0;
  }
  JeoObjective f;
  f.P = Matrix::Zero(dim, dim);
  f.q = Vector::Zero(dim);
  f.slopes = s;
  f.data = -s;
  f.offsets = Vector::Zero(k);
  return f;
}

// ---------------------------------------------------------------- instance

JeoInstance::JeoInstance(ProximalSetup setup, JeoObjective f, JeoConstants constants, std::optional<Vector> u_star)
    : setup_(std::move(setup)), f_(std::move(f)), constants_(constants), u_star_(std::move(u_star)) {
  if (setup_.generator() != Generator::kEuclidean) throw ConfigError("JEO: the decision set must use the Euclidean setup");
  if (f_.dim_x() != setup_.dim() || f_.q.size() != setup_.dim()) throw ConfigError("JEO: objective and decision set dimensions differ");
  if (f_.pieces() > 0 && (f_.slopes.cols() != f_.dim_x() || f_.data.cols() != f_.dim_u() || f_.offsets.size() != f_.pieces())) {
    throw ConfigError("JEO: malformed affine pieces");
  }
  if (!(f_.rho >= 0.0)) throw ConfigError("JEO: rho must be nonnegative");
  if (!(constants_.G_X > 0.0)) throw ConfigError("JEO: G_X must be positive");
  if (u_star_ && u_star_->size() != f_.dim_u()) throw ConfigError("JEO: u* has the wrong dimension");
}

JeoConstants JeoInstance::derived_constants(const Vector& u_center, double u_radius) const {
  const double p = spectral_norm(f_.P);
  // Largest |x - P u - q| over x in X and u in the ball.
  const double reach = setup_.max_euclidean_distance(f_.P * u_center + f_.q) + p * u_radius;
  const double a = f_.pieces() > 0 ? f_.slopes.rowwise().norm().maxCoeff() : 0.0;
  const double d = f_.pieces() > 0 ? f_.data.rowwise().norm().maxCoeff() : 0.0;
  JeoConstants k;
  k.G_X = f_.rho * reach + a;
  if (f_.rho > 0.0) k.alpha_X = f_.rho;
  if (f_.smooth() && f_.rho > 0.0) k.L_X = f_.rho;
  k.G_U = f_.rho * p * reach + d;
  if (f_.smooth()) k.L_U = f_.rho * p;
  return k;
}

void JeoInstance::validate_constants(std::mt19937_64& rng, const Vector& u_center, double u_radius, int samples) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw_u = [&] {
    Vector dir = Vector::NullaryExpr(f_.dim_u(), [&] { return gauss(rng); });
    const double nrm = dir.norm();
    return Vector(nrm > 0 ? Vector(u_center + u_radius * unif(rng) * dir / nrm) : u_center);
  };
  const double tol = 1e-9;
  auto fail = [](const std::string& what) { throw ConfigError("declared JEO constant is violated: " + what); };
  for (int r = 0; r < samples; ++r) {
    const Vector x = setup_.sample(rng);
    const Vector u = draw_u();
    const Vector v = draw_u();
    if (f_.grad_x(x, u).norm() > constants_.G_X * (1 + tol) + tol) fail("G_X");
    const double du = (u - v).norm();
    if (constants_.G_U && std::abs(f_.value(x, u) - f_.value(x, v)) > *constants_.G_U * du * (1 + tol) + tol) fail("G_U");
    if (constants_.L_U && (f_.grad_x(x, u) - f_.grad_x(x, v)).norm() > *constants_.L_U * du * (1 + tol) + tol) fail("L_U");
  }
}

// ---------------------------------------------------------------- estimator

EstimationObjective EstimationObjective::quadratic(Matrix H, Vector u_star) {
  if (H.rows() != H.cols() || H.rows() != u_star.size()) throw ConfigError("quadratic estimation: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw ConfigError("quadratic estimation: H must be positive definite");
  EstimationObjective g;
  g.gradient = [H = std::move(H), u_star = std::move(u_star)](const Vector& u) -> Vector { return H * (u - u_star); };
  g.mu = lo;
  g.L = hi;
  return g;
}

EstimatorStream EstimatorStream::from_g(EstimationObjective g, Vector u0) {
  if (!g.gradient) throw ConfigError("estimator: missing gradient");
  if (!(g.mu > 0.0) || !(g.L >= g.mu)) throw ConfigError("estimator: need 0 < mu <= L");
  require_finite(u0, "estimator start");
  EstimatorStream s;
  const double kappa = g.L / g.mu;
  const Vector g0 = g.gradient(u0);
  require_finite(g0, "estimator gradient");
  s.decay_ = LinearDecay{g0.norm() / g.mu, (kappa - 1.0) / (kappa + 1.0)};
  s.g_ = std::move(g);
  s.u_ = std::move(u0);
  return s;
}

EstimatorStream EstimatorStream::from_values(std::vector<Vector> values, std::optional<LinearDecay> decay) {
  if (values.empty()) throw InputError("estimator: empty stream");
  for (const auto& v : values) require_finite(v, "estimator value");
  EstimatorStream s;
  s.values_ = std::move(values);
  s.decay_ = decay;
  return s;
}

EstimatorStream EstimatorStream::constant(Vector u) {
  EstimatorStream s;
  s.u_ = std::move(u);
  s.constant_ = true;
  s.decay_ = LinearDecay{0.0, 0.0};
  return s;
}

Vector EstimatorStream::next() {
  if (constant_) {
    ++produced_;
    return u_;
  }
  if (!g_) {
    if (produced_ >= static_cast<int>(values_.size())) {
      throw InputError("estimator stream exhausted after " + std::to_string(produced_) + " values");
    }
    return values_[static_cast<size_t>(produced_++)];
  }
  const double step = 2.0 / (g_->mu + g_->L);
  const Vector grad = g_->gradient(u_);
  require_finite(grad, "estimator gradient");
  Vector delta = -step * grad;
  // Consecutive gradient steps contract by beta on a strongly convex smooth g.
  if (last_step_.size() > 0 && delta.norm() > (decay_->beta * (1 + 1e-9)) * last_step_.norm() + 1e-14) {
    throw OracleError("estimator step " + std::to_string(produced_ + 1) + " did not contract; check mu and L");
  }
  u_ += delta;
  last_step_ = std::move(delta);
  ++produced_;
  return u_;
}

// ---------------------------------------------------------------- decay sums

double weighted_decay_sum(const WeightSchedule& theta, const std::vector<double>& distances) {
  if (static_cast<int>(distances.size()) != theta.horizon()) throw InputError("weighted_decay_sum: length mismatch");
  double s = 0.0;
  for (int t = 1; t <= theta.horizon(); ++t) {
    const double d = distances[static_cast<size_t>(t - 1)];
    if (!(d >= 0.0)) throw InputError("weighted_decay_sum: distances must be nonnegative");
    s += theta(t) * d;
  }
  return s;
}

double decay_sum_closed_form(WeightKind kind, const LinearDecay& d, int T) {
  if (T < 1) throw ConfigError("horizon must be positive");
  const double b = d.beta;
  const double n = T;
  if (b == 1.0) throw ConfigError("decay rate must be below 1");
  switch (kind) {
    case WeightKind::kUniform:
      return d.C * b * (1.0 - std::pow(b, n)) / ((1.0 - b) * n);
    case WeightKind::kIncreasingLinear: {
      const double s = b * (1.0 - (n + 1.0) * std::pow(b, n) + n * std::pow(b, n + 1.0)) / ((1.0 - b) * (1.0 - b));
      return d.C * 2.0 * s / (n * (n + 1.0));
    }
    case WeightKind::kCustom:
      break;
  }
  throw ConfigError("no closed form for custom weights");
}

double decay_constant(WeightKind kind, const LinearDecay& d) {
  if (!(d.beta >= 0.0 && d.beta < 1.0)) throw ConfigError("decay rate must lie in [0, 1)");
  switch (kind) {
    case WeightKind::kUniform:
      return d.C * d.beta / (1.0 - d.beta);
    case WeightKind::kIncreasingLinear:
      return 2.0 * d.C * d.beta / ((1.0 - d.beta) * (1.0 - d.beta));
    case WeightKind::kCustom:
      break;
  }
  throw ConfigError("no decay constant for custom weights");
}

// ---------------------------------------------------------------- runs

namespace {

// Running state for max_x sum_s theta_s [q_s(x_s) - q_s(x)] with
// q_s(x) = <g_s, x> + alpha V_{x_s}(x).
class QRegret {
 public:
  QRegret(const ProximalSetup& setup, double alpha) : setup_(setup), alpha_(alpha), w_(Vector::Zero(setup.dim())) {}

  void add(double theta, const Vector& x, const Vector& g) {
    played_ += theta * g.dot(x);
    w_ += theta * g;
    if (alpha_ > 0.0) {
      const Vector dg = setup_.dgf_gradient(x);
      w_ -= alpha_ * theta * dg;
      c_ -= alpha_ * theta * (setup_.dgf(x) - dg.dot(x));
    }
    mass_ += theta;
  }

  double value() const {
    if (alpha_ > 0.0) {
      const Vector x = setup_.mirror_argmin(w_, alpha_ * mass_);
      return played_ - (w_.dot(x) + alpha_ * mass_ * setup_.dgf(x) + c_);
    }
    return played_ - w_.dot(setup_.linear_minimizer(w_));
  }

  double mass() const { return mass_; }

 private:
  const ProximalSetup& setup_;
  double alpha_;
  Vector w_;
  double c_ = 0.0;
  double played_ = 0.0;
  double mass_ = 0.0;
};

StepSchedule jeo_steps(const JeoInstance& inst, Regime regime, const WeightSchedule& theta) {
  const auto& k = inst.constants();
  StepParams p;
  switch (regime) {
    case Regime::kNonsmooth:
      p.omega = inst.setup().set_width();
      p.G = k.G_X;
      return StepSchedule::make(StepKind::kConstantNonsmooth, p, theta);
    case Regime::kStronglyConvex:
      if (!k.alpha_X) throw ConfigError("the strongly-convex regime needs alpha_X");
      p.alpha = k.alpha_X;
      return StepSchedule::make(StepKind::kInverseLinear, p, theta);
    case Regime::kSmooth:
      if (!k.L_X) throw ConfigError("the smooth regime needs L_X");
      if (!inst.objective().smooth()) throw ConfigError("the smooth regime needs an objective that is smooth in x");
      p.L = k.L_X;
      return StepSchedule::make(StepKind::kConstantSmooth, p, theta);
  }
  throw ConfigError("unknown regime");
}

}  // namespace

JeoReport run_jeo(const JeoInstance& inst, EstimatorStream& stream, Regime regime, int T, const JeoOptions& opts) {
  if (T < 1) throw ConfigError("horizon must be positive");
  const auto& f = inst.objective();
  const auto& X = inst.setup();
  JeoReport r;
  r.regime = regime;
  r.horizon = T;
  r.theta = regime == Regime::kStronglyConvex ? WeightSchedule::increasing_linear(T) : WeightSchedule::uniform(T);
  const WeightSchedule& theta = r.theta;
  const StepSchedule steps = jeo_steps(inst, regime, theta);
  const double alpha = regime == Regime::kStronglyConvex ? *inst.constants().alpha_X : 0.0;

  std::optional<double> opt;
  if (opts.record_trace && inst.u_star()) {
    const auto sec = f.section(*inst.u_star());
    const double w = 1.0;
    opt = minimize_weighted_sum(std::span<const PiecewiseQuadratic>(&sec, 1), std::span<const double>(&w, 1), X,
                                opts.oracle)
              .value;
  }

  EngineOptions quiet;
  quiet.check_inequality = false;
  std::optional<MirrorDescent> md;
  std::optional<MirrorProx> mp;
  if (regime == Regime::kSmooth) {
    mp.emplace(X, steps, quiet);
  } else {
    md.emplace(X, steps, quiet);
  }

  QRegret q(X, alpha);
  Vector partial = Vector::Zero(X.dim());
  r.xs.reserve(static_cast<size_t>(T));
  r.us.reserve(static_cast<size_t>(T));
  for (int t = 1; t <= T; ++t) {
    const double th = theta(t);
    Vector x;
    Vector u;
    if (mp) {
      u = stream.next();
      mp->propose(th * f.grad_x(mp->leader(), u));
      x = mp->current();
    } else {
      x = md->current();
      u = stream.next();
    }
    if (u.size() != f.dim_u()) throw InputError("estimator produced a vector of the wrong dimension at step " + std::to_string(t));
    const Vector g = f.grad_x(x, u);
    require_finite(g, "objective gradient");
    if (mp) {
      mp->advance(th * g);
    } else {
      md->advance(regime == Regime::kStronglyConvex ? g : Vector(th * g));
    }
    q.add(th, x, g);
    partial += th * x;
    if (opts.record_trace) {
      JeoStep s;
      s.t = t;
      s.regret_partial = q.value() / q.mass();
      if (inst.u_star()) {
        s.u_dist = (u - *inst.u_star()).norm();
        s.gap_partial = std::abs(f.value(partial / q.mass(), u) - *opt);
      } else {
        s.u_dist = kNaN;
        s.gap_partial = kNaN;
      }
      r.trace.push_back(s);
    }
    r.xs.push_back(std::move(x));
    r.us.push_back(std::move(u));
  }

  r.x_bar = partial;
  r.value_at_estimate = f.value(r.x_bar, r.us.back());
  r.regret = q.value();
  StepParams p;
  p.omega = X.set_width();
  p.G = inst.constants().G_X;
  p.alpha = inst.constants().alpha_X;
  p.L = inst.constants().L_X;
  r.regret_bound = theoretical_bound(regime, p, theta);
  if (inst.u_star()) gap_decomposition(inst, r, opts.oracle);
  return r;
}

void gap_decomposition(const JeoInstance& inst, JeoReport& r, const OfflineOracle& oracle) {
  if (!inst.u_star()) throw ConfigError("gap decomposition needs u*");
  const auto& f = inst.objective();
  const Vector& us = *inst.u_star();
  const auto sec = f.section(us);
  const double w = 1.0;
  const OracleResult best = minimize_weighted_sum(std::span<const PiecewiseQuadratic>(&sec, 1),
                                                  std::span<const double>(&w, 1), inst.setup(), oracle);
  const double D = inst.diameter();
  double data = 0.0;
  std::vector<double> dist;
  dist.reserve(r.xs.size());
  for (int t = 1; t <= r.horizon; ++t) {
    const auto& x = r.xs[static_cast<size_t>(t - 1)];
    const auto& u = r.us[static_cast<size_t>(t - 1)];
    data += r.theta(t) * inst.setup().dual_norm(f.grad_x(x, u) - f.grad_x(x, us));
    dist.push_back((u - us).norm());
  }
  r.optimum = best.value;
  r.optimum_lower = best.bound;
  r.data_penalty = D * data;
  r.eval_penalty = std::abs(r.value_at_estimate - f.value(r.x_bar, us));
  r.gap = std::abs(r.value_at_estimate - best.value);
  r.optimality_gap = f.value(r.x_bar, us) - best.value;
  r.decay_sum = weighted_decay_sum(r.theta, dist);
  r.decomposition_slack = r.regret + *r.data_penalty - (f.value(r.x_bar, us) - best.bound);
  const auto& k = inst.constants();
  if (k.L_U) r.data_penalty_bound = D * *k.L_U * *r.decay_sum;
  if (k.G_U) r.eval_penalty_bound = *k.G_U * dist.back();
}

BaselineResult sequential_baseline(const JeoInstance& inst, EstimatorStream& stream, int K, const OfflineOracle& oracle) {
  if (!inst.u_star()) throw ConfigError("the sequential baseline is a test-time comparison and needs u*");
  if (K < 1) throw ConfigError("the baseline needs at least one estimate");
  Vector u;
  for (int i = 0; i < K; ++i) u = stream.next();
  const auto& f = inst.objective();
  const double w = 1.0;
  const auto fixed = f.section(u);
  const auto truth = f.section(*inst.u_star());
  const OracleResult a = minimize_weighted_sum(std::span<const PiecewiseQuadratic>(&fixed, 1),
                                               std::span<const double>(&w, 1), inst.setup(), oracle);
  const OracleResult b = minimize_weighted_sum(std::span<const PiecewiseQuadratic>(&truth, 1),
                                               std::span<const double>(&w, 1), inst.setup(), oracle);
  return {a.point, f.value(a.point, *inst.u_star()) - b.value, (u - *inst.u_star()).norm()};
}

nlohmann::json to_json(const JeoReport& r) {
  nlohmann::json j;
  j["regime"] = to_string(r.regime);
  j["horizon"] = r.horizon;
  j["x_bar_hash"] = hash_vector(r.x_bar);
  j["value_at_estimate"] = r.value_at_estimate;
  j["regret"] = r.regret;
  j["regret_bound"] = r.regret_bound;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("optimum", r.optimum);
  put("gap", r.gap);
  put("optimality_gap", r.optimality_gap);
  put("data_penalty", r.data_penalty);
  put("eval_penalty", r.eval_penalty);
  put("data_penalty_bound", r.data_penalty_bound);
  put("eval_penalty_bound", r.eval_penalty_bound);
  put("decay_sum", r.decay_sum);
  put("decomposition_slack", r.decomposition_slack);
  return j;
}

}  // namespace ocokit
