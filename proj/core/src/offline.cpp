#include "ocokit/offline.hpp"

#include "ocokit/engine.hpp"
#include "ocokit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ocokit {

namespace {

// Objective in the aggregated form
//   F(x) = rho/2 |x|^2 + q.x + c0 + sum_{t in multi} w_t max_j (a_tj.x + b_tj),
// where single-piece terms have been folded into (rho, q, c0).
struct Aggregate {
  Index n = 0;
  double rho = 0.0;
  Vector q;
  double c0 = 0.0;
  std::vector<size_t> multi;  // indices of multi-piece terms with positive weight
};

Aggregate aggregate(std::span<const PiecewiseQuadratic> terms, std::span<const double> weights, Index n) {
  Aggregate g;
  g.n = n;
  g.q = Vector::Zero(n);
  for (size_t t = 0; t < terms.size(); ++t) {
    const auto& f = terms[t];
    const double w = weights[t];
    if (w == 0.0) continue;
    if (f.rho != 0.0) {
      g.rho += w * f.rho;
      g.q -= w * f.rho * f.anchor;
      g.c0 += 0.5 * w * f.rho * f.anchor.squaredNorm();
    }
    if (f.pieces() == 1) {
      g.q += w * f.slopes.row(0).transpose();
      g.c0 += w * f.offsets[0];
    } else {
      g.multi.push_back(t);
    }
  }
  return g;
}

double objective(std::span<const PiecewiseQuadratic> terms, std::span<const double> weights, const Vector& x) {
  double v = 0.0;
  for (size_t t = 0; t < terms.size(); ++t) {
    if (weights[t] != 0.0) v += weights[t] * terms[t].value(x);
  }
  return v;
}

// min over X of rho/2 |x|^2 + w.x, returned as (argmin, value).
std::pair<Vector, double> inner_min(const ProximalSetup& setup, double rho, const Vector& w) {
  Vector x = rho > 0.0 ? setup.project(-w / rho) : setup.linear_minimizer(w);
  return {x, 0.5 * rho * x.squaredNorm() + w.dot(x)};
}

// Lagrange dual value at per-term piece distributions mu (multi-piece terms
// only, in the order of agg.multi). Valid lower bound for any distributions.
std::pair<double, Vector> dual_bound(std::span<const PiecewiseQuadratic> terms, std::span<const double> weights,
                                     const ProximalSetup& setup, const Aggregate& agg,
                                     const std::vector<Vector>& mu) {
  Vector w = agg.q;
  double c = agg.c0;
  for (size_t m = 0; m < agg.multi.size(); ++m) {
    const auto& f = terms[agg.multi[m]];
    const double wt = weights[agg.multi[m]];
    w += wt * (f.slopes.transpose() * mu[m]);
    c += wt * f.offsets.dot(mu[m]);
  }
  auto [x, v] = inner_min(setup, agg.rho, w);
  return {c + v, x};
}

void validate(std::span<const PiecewiseQuadratic> terms, std::span<const double> weights,
              const ProximalSetup& setup) {
  if (terms.size() != weights.size()) throw InputError("offline oracle: terms/weights length mismatch");
  if (terms.empty()) throw InputError("offline oracle: no terms");
  for (size_t t = 0; t < terms.size(); ++t) {
    const auto& f = terms[t];
    if (f.dim() != setup.dim() || f.anchor.size() != setup.dim() || f.offsets.size() != f.pieces() ||
        f.pieces() < 1) {
      throw InputError("offline oracle: term dimension does not match the domain");
    }
    if (!(weights[t] >= 0.0) || !std::isfinite(weights[t])) {
      throw InputError("offline oracle: weights must be nonnegative and finite");
    }
    if (!(f.rho >= 0.0)) throw InputError("offline oracle: rho must be nonnegative");
  }
}

// ---------------------------------------------------------------------------
// Domain constraints h_k(x) <= 0 in the form the interior point method needs.

struct CoordBound {
  Index i;
  double sign;   // h = sign * x_i - bound
  double bound;
};

struct BallConstraint {
  Index offset;
  Index dim;
  Vector center;
  double radius;
};

struct SumConstraint {
  Index offset;
  Index dim;
};

struct DomainConstraints {
  std::vector<CoordBound> bounds;
  std::vector<BallConstraint> balls;
  std::vector<SumConstraint> sums;  // sum_{block} x = 1
};

void collect(const ProximalSetup& s, Index offset, DomainConstraints& dc) {
  switch (s.kind()) {
    case DomainKind::kProduct:
      collect(s.block(0), offset, dc);
      collect(s.block(1), offset + s.block(0).dim(), dc);
      return;
    case DomainKind::kSimplex:
      for (Index i = 0; i < s.dim(); ++i) dc.bounds.push_back({offset + i, -1.0, 0.0});
      dc.sums.push_back({offset, s.dim()});
      return;
    case DomainKind::kBall:
      dc.balls.push_back({offset, s.dim(), s.center(), s.radius()});
      return;
    case DomainKind::kBox:
      for (Index i = 0; i < s.dim(); ++i) {
        dc.bounds.push_back({offset + i, 1.0, s.upper()[i]});
        dc.bounds.push_back({offset + i, -1.0, -s.lower()[i]});
      }
      return;
  }
}

// Primal-dual interior point method (Mehrotra predictor-corrector) for
//   min rho/2 |x|^2 + q.x + sum_t w_t s_t
//   s.t. a_tj.x + b_tj - s_t <= 0, x in X.
// The s_t blocks are eliminated so each Newton step solves an n x n system.
class InteriorPoint {
 public:
  InteriorPoint(std::span<const PiecewiseQuadratic> terms, std::span<const double> weights,
                const ProximalSetup& setup, const Aggregate& agg)
      : terms_(terms), weights_(weights), setup_(setup), agg_(agg), n_(agg.n) {
    collect(setup, 0, dc_);
    P_ = agg.multi.size();
    K_ = dc_.bounds.size() + dc_.balls.size();
    E_ = dc_.sums.size();
    init();
  }

  // Multiplier distributions for the dual bound.
  std::vector<Vector> distributions() const {
    std::vector<Vector> mu(P_);
    for (size_t m = 0; m < P_; ++m) {
      const double s = lam_[m].sum();
      mu[m] = s > 0.0 ? Vector(lam_[m] / s) : Vector::Constant(lam_[m].size(), 1.0 / lam_[m].size());
    }
    return mu;
  }

  const Vector& x() const { return x_; }

  double complementarity() const { return mu_; }

  // One predictor-corrector step. Returns false when no progress is possible.
  bool step() {
    residuals();
    const double mu = mu_;
    // Predictor.
    Direction aff = solve(-1.0, 0.0, nullptr);
    const double a_aff = step_length(aff, 1.0);
    const double mu_aff = trial_mu(aff, a_aff);
    const double sigma = std::pow(std::clamp(mu_aff / std::max(mu, 1e-300), 0.0, 1.0), 3);
    // Corrector.
    Direction d = solve(-1.0, sigma * mu, &aff);
    const double alpha = step_length(d, 0.995);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) return false;
    apply(d, alpha);
    residuals();
    return std::isfinite(mu_);
  }

 private:
  struct Direction {
    Vector dx;
    Vector ds;
    std::vector<Vector> dw, dl;  // per multi term
    Vector dwd, dld;             // domain
  };

  double piece(size_t m, Index j, const Vector& x) const {
    const auto& f = terms_[agg_.multi[m]];
    return f.slopes.row(j).dot(x) + f.offsets[j];
  }

  double h(size_t k, const Vector& x) const {
    if (k < dc_.bounds.size()) {
      const auto& b = dc_.bounds[k];
      return b.sign * x[b.i] - b.bound;
    }
    const auto& ball = dc_.balls[k - dc_.bounds.size()];
    return 0.5 * (x.segment(ball.offset, ball.dim) - ball.center).squaredNorm() - 0.5 * ball.radius * ball.radius;
  }

  void init() {
    x_ = setup_.omega_center();
    s_.resize(static_cast<Index>(P_));
    ws_.resize(P_);
    lam_.resize(P_);
    double total = 0.0;
    size_t count = 0;
    for (size_t m = 0; m < P_; ++m) {
      const auto& f = terms_[agg_.multi[m]];
      const Index k = f.pieces();
      const Vector l = f.slopes * x_ + f.offsets;
      s_[static_cast<Index>(m)] = l.maxCoeff() + 1.0;
      ws_[m] = (s_[static_cast<Index>(m)] - l.array()).matrix();
      lam_[m] = Vector::Constant(k, weights_[agg_.multi[m]] / static_cast<double>(k));
      total += lam_[m].dot(ws_[m]);
      count += static_cast<size_t>(k);
    }
    const double mu0 = total / static_cast<double>(count);
    wd_.resize(static_cast<Index>(K_));
    ld_.resize(static_cast<Index>(K_));
    for (size_t k = 0; k < K_; ++k) {
      wd_[static_cast<Index>(k)] = -h(k, x_);
      ld_[static_cast<Index>(k)] = mu0 / wd_[static_cast<Index>(k)];
    }
    nu_ = Vector::Zero(static_cast<Index>(E_));
    residuals();
  }

  void residuals() {
    rx_ = agg_.rho * x_ + agg_.q;
    rs_.resize(static_cast<Index>(P_));
    rg_.resize(P_);
    double comp = 0.0;
    size_t count = 0;
    for (size_t m = 0; m < P_; ++m) {
      const auto& f = terms_[agg_.multi[m]];
      rx_ += f.slopes.transpose() * lam_[m];
      rs_[static_cast<Index>(m)] = weights_[agg_.multi[m]] - lam_[m].sum();
      rg_[m] = (f.slopes * x_ + f.offsets).array() - s_[static_cast<Index>(m)] + ws_[m].array();
      comp += lam_[m].dot(ws_[m]);
      count += static_cast<size_t>(f.pieces());
    }
    rh_.resize(static_cast<Index>(K_));
    for (size_t k = 0; k < K_; ++k) {
      const auto kk = static_cast<Index>(k);
      rh_[kk] = h(k, x_) + wd_[kk];
      comp += ld_[kk] * wd_[kk];
      ++count;
      if (k < dc_.bounds.size()) {
        const auto& b = dc_.bounds[k];
        rx_[b.i] += ld_[kk] * b.sign;
      } else {
        const auto& ball = dc_.balls[k - dc_.bounds.size()];
        rx_.segment(ball.offset, ball.dim) += ld_[kk] * (x_.segment(ball.offset, ball.dim) - ball.center);
      }
    }
    re_.resize(static_cast<Index>(E_));
    for (size_t e = 0; e < E_; ++e) {
      const auto& sc = dc_.sums[e];
      rx_.segment(sc.offset, sc.dim).array() += nu_[static_cast<Index>(e)];
      re_[static_cast<Index>(e)] = x_.segment(sc.offset, sc.dim).sum() - 1.0;
    }
    mu_ = comp / static_cast<double>(count);
  }

  // Complementarity right-hand side: target - lam*w (- dl_aff*dw_aff).
  // `scale` multiplies lam*w (always -1 here), `target` is sigma*mu.
  Direction solve(double scale, double target, const Direction* aff) {
    const Index n = n_;
    Matrix H = Matrix::Zero(n, n);
    H.diagonal().array() += agg_.rho;
    Vector rhs = -rx_;
    std::vector<Vector> rho_t(P_), D_t(P_);
    Vector sig(static_cast<Index>(P_)), S(static_cast<Index>(P_));
    std::vector<Vector> p_t(P_);

    for (size_t m = 0; m < P_; ++m) {
      const auto& A = terms_[agg_.multi[m]].slopes;
      Vector rc = scale * lam_[m].cwiseProduct(ws_[m]);
      rc.array() += target;
      if (aff) rc -= aff->dl[m].cwiseProduct(aff->dw[m]);
      const Vector D = lam_[m].cwiseQuotient(ws_[m]);
      const Vector rr = rc.cwiseQuotient(ws_[m]) + D.cwiseProduct(rg_[m]);
      const double Sm = D.sum();
      const Vector p = A.transpose() * D;
      const double sg = (rr.sum() - rs_[static_cast<Index>(m)]) / Sm;
      H.noalias() += A.transpose() * D.asDiagonal() * A;
      H.noalias() -= (p * p.transpose()) / Sm;
      rhs.noalias() -= A.transpose() * (rr - D * sg);
      rho_t[m] = rr;
      D_t[m] = D;
      sig[static_cast<Index>(m)] = sg;
      S[static_cast<Index>(m)] = Sm;
      p_t[m] = p;
    }
    Vector rho_d(static_cast<Index>(K_)), D_d(static_cast<Index>(K_));
    for (size_t k = 0; k < K_; ++k) {
      const auto kk = static_cast<Index>(k);
      double rc = scale * ld_[kk] * wd_[kk] + target;
      if (aff) rc -= aff->dld[kk] * aff->dwd[kk];
      const double D = ld_[kk] / wd_[kk];
      const double rr = rc / wd_[kk] + D * rh_[kk];
      rho_d[kk] = rr;
      D_d[kk] = D;
      if (k < dc_.bounds.size()) {
        const auto& b = dc_.bounds[k];
        H(b.i, b.i) += D;
        rhs[b.i] -= b.sign * rr;
      } else {
        const auto& ball = dc_.balls[k - dc_.bounds.size()];
        const Vector g = x_.segment(ball.offset, ball.dim) - ball.center;
        H.block(ball.offset, ball.offset, ball.dim, ball.dim).diagonal().array() += ld_[kk];
        H.block(ball.offset, ball.offset, ball.dim, ball.dim).noalias() += D * g * g.transpose();
        rhs.segment(ball.offset, ball.dim) -= rr * g;
      }
    }

    const auto ne = static_cast<Index>(E_);
    Matrix KKT = Matrix::Zero(n + ne, n + ne);
    KKT.topLeftCorner(n, n) = H;
    KKT.topLeftCorner(n, n).diagonal().array() += 1e-14 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
    Vector r(n + ne);
    r.head(n) = rhs;
    for (size_t e = 0; e < E_; ++e) {
      const auto& sc = dc_.sums[e];
      const auto ee = static_cast<Index>(e);
      KKT.block(n + ee, sc.offset, 1, sc.dim).setOnes();
      KKT.block(sc.offset, n + ee, sc.dim, 1).setOnes();
      r[n + ee] = -re_[ee];
    }
    const Vector sol = KKT.fullPivLu().solve(r);

    Direction d;
    d.dx = sol.head(n);
    dnu_ = sol.tail(ne);
    d.ds.resize(static_cast<Index>(P_));
    d.dw.resize(P_);
    d.dl.resize(P_);
    for (size_t m = 0; m < P_; ++m) {
      const auto& A = terms_[agg_.multi[m]].slopes;
      const Vector Adx = A * d.dx;
      const double ds = sig[static_cast<Index>(m)] + p_t[m].dot(d.dx) / S[static_cast<Index>(m)];
      d.ds[static_cast<Index>(m)] = ds;
      d.dl[m] = rho_t[m] + D_t[m].cwiseProduct((Adx.array() - ds).matrix());
      d.dw[m] = (-rg_[m] - Adx).array() + ds;
    }
    d.dwd.resize(static_cast<Index>(K_));
    d.dld.resize(static_cast<Index>(K_));
    for (size_t k = 0; k < K_; ++k) {
      const auto kk = static_cast<Index>(k);
      double gdx = 0.0;
      if (k < dc_.bounds.size()) {
        const auto& b = dc_.bounds[k];
        gdx = b.sign * d.dx[b.i];
      } else {
        const auto& ball = dc_.balls[k - dc_.bounds.size()];
        gdx = (x_.segment(ball.offset, ball.dim) - ball.center).dot(d.dx.segment(ball.offset, ball.dim));
      }
      d.dwd[kk] = -rh_[kk] - gdx;
      d.dld[kk] = rho_d[kk] + D_d[kk] * gdx;
    }
    return d;
  }

  static double max_step(const Vector& v, const Vector& dv, double a) {
    for (Index i = 0; i < v.size(); ++i) {
      if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    }
    return a;
  }

  double step_length(const Direction& d, double frac) const {
    double a = 1.0 / frac;
    for (size_t m = 0; m < P_; ++m) {
      a = max_step(ws_[m], d.dw[m], a);
      a = max_step(lam_[m], d.dl[m], a);
    }
    a = max_step(wd_, d.dwd, a);
    a = max_step(ld_, d.dld, a);
    return std::min(1.0, frac * a);
  }

  double trial_mu(const Direction& d, double a) const {
    double comp = 0.0;
    size_t count = 0;
    for (size_t m = 0; m < P_; ++m) {
      comp += (lam_[m] + a * d.dl[m]).dot(ws_[m] + a * d.dw[m]);
      count += static_cast<size_t>(lam_[m].size());
    }
    comp += (ld_ + a * d.dld).dot(wd_ + a * d.dwd);
    count += K_;
    return comp / static_cast<double>(count);
  }

  void apply(const Direction& d, double a) {
    x_ += a * d.dx;
    s_ += a * d.ds;
    for (size_t m = 0; m < P_; ++m) {
      ws_[m] += a * d.dw[m];
      lam_[m] += a * d.dl[m];
    }
    wd_ += a * d.dwd;
    ld_ += a * d.dld;
    nu_ += a * dnu_;
  }

  std::span<const PiecewiseQuadratic> terms_;
  std::span<const double> weights_;
  const ProximalSetup& setup_;
  const Aggregate& agg_;
  Index n_;
  DomainConstraints dc_;
  size_t P_ = 0, K_ = 0, E_ = 0;

  Vector x_, s_;
  std::vector<Vector> ws_, lam_;
  Vector wd_, ld_, nu_, dnu_;

  Vector rx_, rs_, rh_, re_;
  std::vector<Vector> rg_;
  double mu_ = 0.0;
};

}  // namespace

OracleResult minimize_weighted_sum(std::span<const PiecewiseQuadratic> terms, std::span<const double> weights,
                                   const ProximalSetup& setup, const OfflineOracle& oracle) {
  validate(terms, weights, setup);
  const Aggregate agg = aggregate(terms, weights, setup.dim());

  OracleResult res;
  res.multipliers.resize(terms.size());
  for (size_t t = 0; t < terms.size(); ++t) {
    res.multipliers[t] = Vector::Constant(terms[t].pieces(), 1.0 / static_cast<double>(terms[t].pieces()));
  }

  if (agg.multi.empty()) {
    auto [lb, x] = dual_bound(terms, weights, setup, agg, {});
    res.point = x;
    res.value = objective(terms, weights, x);
    res.bound = lb;
    res.gap_bound = std::max(0.0, res.value - lb);
    res.certified = res.gap_bound <= oracle.accuracy;
    res.method = OracleMethod::kClosedForm;
    return res;
  }

  res.method = OracleMethod::kInteriorPoint;
  InteriorPoint ipm(terms, weights, setup, agg);
  double best_gap = std::numeric_limits<double>::infinity();
  auto certify = [&](int iter) {
    const auto mu = ipm.distributions();
    auto [lb, xd] = dual_bound(terms, weights, setup, agg, mu);
    const Vector xp = setup.project(ipm.x());
    const double vp = objective(terms, weights, xp);
    const double vd = objective(terms, weights, xd);
    const bool use_dual = vd < vp;
    const double ub = use_dual ? vd : vp;
    const double gap = std::max(0.0, ub - lb);
    if (gap < best_gap) {
      best_gap = gap;
      res.point = use_dual ? xd : xp;
      res.value = ub;
      res.bound = lb;
      res.gap_bound = gap;
      res.iterations = iter;
      for (size_t m = 0; m < agg.multi.size(); ++m) res.multipliers[agg.multi[m]] = mu[m];
    }
  };
  certify(0);
  for (int it = 1; it <= oracle.max_iterations && best_gap > oracle.accuracy; ++it) {
    if (!ipm.step()) break;
    certify(it);
    if (ipm.complementarity() < 1e-300) break;
  }
  res.certified = res.gap_bound <= oracle.accuracy;
  return res;
}

OracleResult minimize_weighted_sum(const PiecewiseQuadraticStream& stream, const WeightSchedule& theta,
                                   const ProximalSetup& setup, const OfflineOracle& oracle) {
  if (theta.horizon() != stream.horizon()) throw InputError("offline oracle: weights/stream length mismatch");
  return minimize_weighted_sum(std::span<const PiecewiseQuadratic>(stream.terms()),
                               std::span<const double>(theta.values()), setup, oracle);
}

OracleResult maximize_concave(std::span<const PiecewiseQuadratic> negated_terms, std::span<const double> weights,
                              const ProximalSetup& setup, const OfflineOracle& oracle) {
  OracleResult r = minimize_weighted_sum(negated_terms, weights, setup, oracle);
  r.value = -r.value;
  r.bound = -r.bound;
  return r;
}

double saddle_gap(const BilinearGame& game, const ProximalSetup& sx, const ProximalSetup& sy, const Vector& x,
                  const Vector& y) {
  // max over y' of <A'x + c, y'> and min over x' of <A y + b, x'>.
  const Vector gy = game.A.transpose() * x + game.c;
  const Vector gx = game.A * y + game.b;
  const Vector ybest = sy.linear_minimizer(-gy);
  const Vector xbest = sx.linear_minimizer(gx);
  return (gy.dot(ybest) + game.b.dot(x)) - (gx.dot(xbest) + game.c.dot(y));
}

namespace {

// Y is a simplex or a box: min_x b.x + sigma_Y(A'x + c) as a piecewise linear
// program, with y recovered from the multipliers.
SaddleResult saddle_polyhedral_y(const BilinearGame& g, const ProximalSetup& sx, const ProximalSetup& sy,
                                 const OfflineOracle& oracle) {
  const Index m = g.A.rows();
  const Index n = g.A.cols();
  std::vector<PiecewiseQuadratic> terms;
  std::vector<double> weights;
  if (sy.kind() == DomainKind::kSimplex) {
    PiecewiseQuadratic f;
    f.anchor = Vector::Zero(m);
    f.slopes = (g.A.colwise() + g.b).transpose();
    f.offsets = g.c;
    terms.push_back(std::move(f));
    weights.push_back(1.0);
  } else {
    terms.push_back(PiecewiseQuadratic::linear(g.b));
    weights.push_back(1.0);
    for (Index j = 0; j < n; ++j) {
      PiecewiseQuadratic f;
      f.anchor = Vector::Zero(m);
      f.slopes.resize(2, m);
      f.slopes.row(0) = sy.lower()[j] * g.A.col(j).transpose();
      f.slopes.row(1) = sy.upper()[j] * g.A.col(j).transpose();
      f.offsets.resize(2);
      f.offsets << sy.lower()[j] * g.c[j], sy.upper()[j] * g.c[j];
      terms.push_back(std::move(f));
      weights.push_back(1.0);
    }
  }
  const OracleResult r = minimize_weighted_sum(terms, weights, sx, oracle);
  SaddleResult out;
  out.method = r.method;
  out.x = r.point;
  if (sy.kind() == DomainKind::kSimplex) {
    out.y = r.multipliers[0];
  } else {
    out.y.resize(n);
    for (Index j = 0; j < n; ++j) {
      const Vector& mu = r.multipliers[static_cast<size_t>(j + 1)];
      out.y[j] = mu[0] * sy.lower()[j] + mu[1] * sy.upper()[j];
    }
  }
  out.value = g.value(out.x, out.y);
  out.gap = saddle_gap(g, sx, sy, out.x, out.y);
  out.certified = out.gap <= oracle.accuracy;
  return out;
}

bool polyhedral(const ProximalSetup& s) { return s.kind() == DomainKind::kSimplex || s.kind() == DomainKind::kBox; }

}  // namespace

SaddleResult solve_saddle(const BilinearGame& game, const ProximalSetup& sx, const ProximalSetup& sy,
                          const OfflineOracle& oracle) {
  if (game.A.rows() != sx.dim() || game.A.cols() != sy.dim()) throw InputError("solve_saddle: dimension mismatch");
  if (polyhedral(sy)) return saddle_polyhedral_y(game, sx, sy, oracle);
  if (polyhedral(sx)) {
    BilinearGame swapped{-game.A.transpose(), -game.c, -game.b};
    SaddleResult r = saddle_polyhedral_y(swapped, sy, sx, oracle);
    SaddleResult out;
    out.x = r.y;
    out.y = r.x;
    out.value = game.value(out.x, out.y);
    out.gap = saddle_gap(game, sx, sy, out.x, out.y);
    out.certified = out.gap <= oracle.accuracy;
    out.method = r.method;
    return out;
  }
  // Neither side polyhedral: averaged mirror prox on the product.
  const ProximalSetup prod = ProximalSetup::product(sx, sy, 1.0 / std::max(sx.set_width(), 1e-12),
                                                    1.0 / std::max(sy.set_width(), 1e-12));
  const BilinearGameStream one({game});
  const double L = one.smoothness(prod);
  const int T = std::max(1000, oracle.max_iterations * 100);
  const auto theta = WeightSchedule::uniform(T);
  StepParams params;
  params.L = L > 0.0 ? L : 1.0;
  const auto steps = StepSchedule::make(StepKind::kConstantSmooth, params, theta);
  const Index m = sx.dim();
  auto F = [&](int t, const Vector& z) -> Vector { return theta(t) * game.op(z.head(m), z.tail(z.size() - m)); };
  EngineOptions opts;
  opts.check_inequality = false;
  const RunTrace tr = mirror_prox(prod, steps, F, F, opts);
  const Vector zbar = tr.average(theta.values());
  SaddleResult out;
  out.method = OracleMethod::kMirrorProx;
  out.x = zbar.head(m);
  out.y = zbar.tail(zbar.size() - m);
  out.value = game.value(out.x, out.y);
  out.gap = saddle_gap(game, sx, sy, out.x, out.y);
  out.certified = out.gap <= oracle.accuracy;
  return out;
}

std::string to_string(OracleMethod method) {
  switch (method) {
    case OracleMethod::kClosedForm:
      return "closed-form";
    case OracleMethod::kInteriorPoint:
      return "interior-point";
    case OracleMethod::kMirrorProx:
      return "mirror-prox";
  }
  return "?";
}

}  // namespace ocokit
