#include "ocokit/functions.hpp"

#include "ocokit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ocokit {

PiecewiseQuadratic PiecewiseQuadratic::linear(const Vector& c, double offset) {
  PiecewiseQuadratic f;
  f.anchor = Vector::Zero(c.size());
  f.slopes = c.transpose();
  f.offsets = Vector::Constant(1, offset);
  return f;
}

PiecewiseQuadratic PiecewiseQuadratic::quadratic(double rho, const Vector& anchor) {
  PiecewiseQuadratic f;
  f.rho = rho;
  f.anchor = anchor;
  f.slopes = Matrix::Zero(1, anchor.size());
  f.offsets = Vector::Zero(1);
  return f;
}

Index PiecewiseQuadratic::active(const Vector& x) const {
  Index best = 0;
  double v = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < pieces(); ++j) {
    const double lj = slopes.row(j).dot(x) + offsets[j];
    if (lj > v) {
      v = lj;
      best = j;
    }
  }
  return best;
}

double PiecewiseQuadratic::value(const Vector& x) const {
  const Index j = active(x);
  return 0.5 * rho * (x - anchor).squaredNorm() + slopes.row(j).dot(x) + offsets[j];
}

Vector PiecewiseQuadratic::subgradient(const Vector& x) const {
  const Index j = active(x);
  return rho * (x - anchor) + slopes.row(j).transpose();
}

double PiecewiseQuadratic::lipschitz_bound(const ProximalSetup& setup) const {
  double slope = 0.0;
  for (Index j = 0; j < pieces(); ++j) slope = std::max(slope, setup.dual_norm(slopes.row(j).transpose()));
  if (rho == 0.0) return slope;
  double quad = 0.0;
  if (setup.generator() == Generator::kEntropy) {
    // |x - a|_inf over the simplex is attained at a vertex.
    for (Index i = 0; i < anchor.size(); ++i) {
      quad = std::max({quad, std::abs(anchor[i]), std::abs(1.0 - anchor[i])});
    }
  } else if (setup.kind() == DomainKind::kProduct) {
    throw InputError("lipschitz_bound: product setups are not supported for loss streams");
  } else {
    quad = setup.max_euclidean_distance(anchor);
  }
  return rho * quad + slope;
}

PiecewiseQuadraticStream::PiecewiseQuadraticStream(std::vector<PiecewiseQuadratic> terms)
    : terms_(std::move(terms)) {
  if (terms_.empty()) throw InputError("loss stream: no terms");
  dim_ = terms_.front().dim();
  for (const auto& f : terms_) {
    if (f.dim() != dim_ || f.anchor.size() != dim_ || f.offsets.size() != f.pieces() || f.pieces() < 1) {
      throw InputError("loss stream: inconsistent term dimensions");
    }
    if (!(f.rho >= 0.0)) throw InputError("loss stream: rho must be nonnegative");
  }
}

double PiecewiseQuadraticStream::value(int t, const Vector& x) const { return term(t).value(x); }

Vector PiecewiseQuadraticStream::subgradient(int t, const Vector& x) const { return term(t).subgradient(x); }

double PiecewiseQuadraticStream::lipschitz_bound(const ProximalSetup& setup) const {
  double g = 0.0;
  for (const auto& f : terms_) g = std::max(g, f.lipschitz_bound(setup));
  return g;
}

double PiecewiseQuadraticStream::strong_convexity() const {
  double a = std::numeric_limits<double>::infinity();
  for (const auto& f : terms_) a = std::min(a, f.rho);
  return a;
}

double PiecewiseQuadraticStream::smoothness() const {
  double l = 0.0;
  for (const auto& f : terms_) l = std::max(l, f.rho);
  return l;
}

bool PiecewiseQuadraticStream::smooth() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& f) { return f.pieces() == 1; });
}

BilinearGame BilinearGame::matrix(Matrix A) {
  BilinearGame g;
  g.b = Vector::Zero(A.rows());
  g.c = Vector::Zero(A.cols());
  g.A = std::move(A);
  return g;
}

double BilinearGame::value(const Vector& x, const Vector& y) const { return x.dot(A * y) + b.dot(x) + c.dot(y); }

Vector BilinearGame::op(const Vector& x, const Vector& y) const {
  Vector F(A.rows() + A.cols());
  F << A * y + b, -(A.transpose() * x + c);
  return F;
}

BilinearGameStream::BilinearGameStream(std::vector<BilinearGame> games) : games_(std::move(games)) {
  if (games_.empty()) throw InputError("game stream: no games");
  for (const auto& g : games_) {
    if (g.A.rows() != games_.front().A.rows() || g.A.cols() != games_.front().A.cols() ||
        g.b.size() != g.A.rows() || g.c.size() != g.A.cols()) {
      throw InputError("game stream: inconsistent dimensions");
    }
  }
}

double BilinearGameStream::value(int t, const Vector& x, const Vector& y) const { return game(t).value(x, y); }

Vector BilinearGameStream::op(int t, const Vector& x, const Vector& y) const { return game(t).op(x, y); }

namespace {

// Operator norm of A from (R^n, |.|_Y) to (R^m, |.|_{X,*}).
double coupling_norm(const Matrix& A, const ProximalSetup& sx, const ProximalSetup& sy) {
  const bool x_l1 = sx.generator() == Generator::kEntropy;
  const bool y_l1 = sy.generator() == Generator::kEntropy;
  if (x_l1 && y_l1) return A.cwiseAbs().maxCoeff();
  if (x_l1) return A.rowwise().norm().maxCoeff();
  if (y_l1) return A.colwise().norm().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

double max_norm(const ProximalSetup& s) {
  if (s.generator() == Generator::kEntropy) return 1.0;
  return s.max_euclidean_distance(Vector::Zero(s.dim()));
}

}  // namespace

double BilinearGameStream::smoothness(const ProximalSetup& product) const {
  const auto& sx = product.block(0);
  const auto& sy = product.block(1);
  double s = 0.0;
  for (const auto& g : games_) s = std::max(s, coupling_norm(g.A, sx, sy));
  return s / std::sqrt(product.beta(0) * product.beta(1));
}

double BilinearGameStream::operator_bound(const ProximalSetup& product) const {
  const auto& sx = product.block(0);
  const auto& sy = product.block(1);
  double bound = 0.0;
  for (const auto& g : games_) {
    const double s = coupling_norm(g.A, sx, sy);
    const double gx = s * max_norm(sy) + sx.dual_norm(g.b);
    const double gy = s * max_norm(sx) + sy.dual_norm(g.c);
    bound = std::max(bound, std::sqrt(gx * gx / product.beta(0) + gy * gy / product.beta(1)));
  }
  return bound;
}

namespace streams {

namespace {

Matrix uniform_matrix(std::mt19937_64& rng, Index r, Index c, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix M(r, c);
  for (Index j = 0; j < c; ++j) {
    for (Index i = 0; i < r; ++i) M(i, j) = u(rng);
  }
  return M;
}

Vector uniform_vector(std::mt19937_64& rng, Index n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

PiecewiseQuadraticStream max_affine(std::mt19937_64& rng, int horizon, Index dim, Index pieces, double scale) {
  std::vector<PiecewiseQuadratic> terms;
  terms.reserve(static_cast<size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    PiecewiseQuadratic f;
    f.anchor = Vector::Zero(dim);
    f.slopes = uniform_matrix(rng, pieces, dim, scale);
    f.offsets = uniform_vector(rng, pieces, scale);
    terms.push_back(std::move(f));
  }
  return PiecewiseQuadraticStream(std::move(terms));
}

PiecewiseQuadraticStream quadratic(std::mt19937_64& rng, int horizon, const ProximalSetup& setup, double rho) {
  std::vector<PiecewiseQuadratic> terms;
  terms.reserve(static_cast<size_t>(horizon));
  for (int t = 0; t < horizon; ++t) terms.push_back(PiecewiseQuadratic::quadratic(rho, setup.sample(rng)));
  return PiecewiseQuadraticStream(std::move(terms));
}

PiecewiseQuadraticStream strongly_convex_max(std::mt19937_64& rng, int horizon, const ProximalSetup& setup,
                                             double rho, Index pieces, double scale) {
  std::vector<PiecewiseQuadratic> terms;
  terms.reserve(static_cast<size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    PiecewiseQuadratic f;
    f.rho = rho;
    f.anchor = setup.sample(rng);
    f.slopes = uniform_matrix(rng, pieces, setup.dim(), scale);
    f.offsets = uniform_vector(rng, pieces, scale);
    terms.push_back(std::move(f));
  }
  return PiecewiseQuadraticStream(std::move(terms));
}

BilinearGameStream bilinear(std::mt19937_64& rng, int horizon, Index m, Index n, double noise) {
  const Matrix base = uniform_matrix(rng, m, n, 1.0);
  std::vector<BilinearGame> games;
  games.reserve(static_cast<size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    games.push_back(BilinearGame::matrix(base + uniform_matrix(rng, m, n, noise)));
  }
  return BilinearGameStream(std::move(games));
}

}  // namespace streams

}  // namespace ocokit
