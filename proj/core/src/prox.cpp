#include "ocokit/prox.hpp"

#include "ocokit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ocokit {

struct ProximalSetup::State {
  DomainKind kind = DomainKind::kSimplex;
  Generator generator = Generator::kEuclidean;
  Index dim = 0;
  // Ball: center + radius. Box: lower/upper; anchor is the d.g.f. minimizer.
  Vector center;
  double radius = 0.0;
  Vector lower;
  Vector upper;
  std::vector<ProximalSetup> blocks;
  double beta[2] = {1.0, 1.0};
};

namespace {

void require_dim(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw InputError(std::string(what) + ": expected dimension " + std::to_string(n) + ", got " +
                     std::to_string(v.size()));
  }
}

double entropy_dgf(const Vector& z) {
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    if (z[i] > 0.0) s += z[i] * std::log(z[i]);
  }
  return s;
}

}  // namespace

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InputError(std::string(what) + ": non-finite entry");
}

Vector softmax(const Vector& s) {
  const double mx = s.maxCoeff();
  Vector e = (s.array() - mx).exp().matrix();
  e /= e.sum();
  const double tiny = std::numeric_limits<double>::min();
  for (Index i = 0; i < e.size(); ++i) e[i] = std::max(e[i], tiny);
  return e;
}

Vector project_simplex(const Vector& y) {
  const Index n = y.size();
  std::vector<double> u(y.data(), y.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  for (Index k = 0; k < n; ++k) {
    cum += u[static_cast<size_t>(k)];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[static_cast<size_t>(k)] - t > 0.0) tau = t;
  }
  return (y.array() - tau).max(0.0).matrix();
}

ProximalSetup::ProximalSetup(std::shared_ptr<const State> state) : state_(std::move(state)) {}

ProximalSetup ProximalSetup::entropy_simplex(Index n) {
  if (n < 1) throw InputError("entropy_simplex: dimension must be positive");
  auto s = std::make_shared<State>();
  s->kind = DomainKind::kSimplex;
  s->generator = Generator::kEntropy;
  s->dim = n;
  s->center = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return ProximalSetup(std::move(s));
}

ProximalSetup ProximalSetup::euclidean_simplex(Index n) {
  if (n < 1) throw InputError("euclidean_simplex: dimension must be positive");
  auto s = std::make_shared<State>();
  s->kind = DomainKind::kSimplex;
  s->generator = Generator::kEuclidean;
  s->dim = n;
  s->center = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return ProximalSetup(std::move(s));
}

ProximalSetup ProximalSetup::euclidean_ball(Index n, double radius) {
  return euclidean_ball(Vector::Zero(n), radius);
}

ProximalSetup ProximalSetup::euclidean_ball(Vector center, double radius) {
  if (center.size() < 1) throw InputError("euclidean_ball: dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("euclidean_ball: radius must be positive");
  require_finite(center, "euclidean_ball center");
  auto s = std::make_shared<State>();
  s->kind = DomainKind::kBall;
  s->generator = Generator::kEuclidean;
  s->dim = center.size();
  s->center = std::move(center);
  s->radius = radius;
  return ProximalSetup(std::move(s));
}

ProximalSetup ProximalSetup::euclidean_box(Vector lower, Vector upper) {
  if (lower.size() < 1 || lower.size() != upper.size()) throw InputError("euclidean_box: bad bounds");
  require_finite(lower, "euclidean_box lower");
  require_finite(upper, "euclidean_box upper");
  if ((upper.array() <= lower.array()).any()) throw InputError("euclidean_box: need lower < upper");
  auto s = std::make_shared<State>();
  s->kind = DomainKind::kBox;
  s->generator = Generator::kEuclidean;
  s->dim = lower.size();
  s->center = 0.5 * (lower + upper);
  s->lower = std::move(lower);
  s->upper = std::move(upper);
  return ProximalSetup(std::move(s));
}

ProximalSetup ProximalSetup::product(const ProximalSetup& x, const ProximalSetup& y, double beta_x,
                                     double beta_y) {
  if (!(beta_x > 0.0) || !(beta_y > 0.0) || !std::isfinite(beta_x) || !std::isfinite(beta_y)) {
    throw ConfigError("product: beta weights must be positive");
  }
  auto s = std::make_shared<State>();
  s->kind = DomainKind::kProduct;
  s->generator = Generator::kComposite;
  s->dim = x.dim() + y.dim();
  s->blocks = {x, y};
  s->beta[0] = beta_x;
  s->beta[1] = beta_y;
  s->center = concat(x.omega_center(), y.omega_center());
  return ProximalSetup(std::move(s));
}

DomainKind ProximalSetup::kind() const { return state_->kind; }
Generator ProximalSetup::generator() const { return state_->generator; }
Index ProximalSetup::dim() const { return state_->dim; }

double ProximalSetup::radius() const { return state_->radius; }
const Vector& ProximalSetup::center() const { return state_->center; }
const Vector& ProximalSetup::lower() const { return state_->lower; }
const Vector& ProximalSetup::upper() const { return state_->upper; }

const ProximalSetup& ProximalSetup::block(int i) const {
  if (state_->kind != DomainKind::kProduct || i < 0 || i > 1) throw InputError("block: not a product setup");
  return state_->blocks[static_cast<size_t>(i)];
}

double ProximalSetup::beta(int i) const {
  if (state_->kind != DomainKind::kProduct || i < 0 || i > 1) throw InputError("beta: not a product setup");
  return state_->beta[i];
}

Vector ProximalSetup::head(const Vector& z) const { return z.head(block(0).dim()); }
Vector ProximalSetup::tail(const Vector& z) const { return z.tail(block(1).dim()); }

Vector ProximalSetup::concat(const Vector& a, const Vector& b) {
  Vector z(a.size() + b.size());
  z << a, b;
  return z;
}

double ProximalSetup::norm(const Vector& z) const {
  require_dim(z, dim(), "norm");
  if (kind() == DomainKind::kProduct) {
    const double a = block(0).norm(head(z));
    const double b = block(1).norm(tail(z));
    return std::sqrt(beta(0) * a * a + beta(1) * b * b);
  }
  if (generator() == Generator::kEntropy) return z.lpNorm<1>();
  return z.norm();
}

double ProximalSetup::dual_norm(const Vector& xi) const {
  require_dim(xi, dim(), "dual_norm");
  if (kind() == DomainKind::kProduct) {
    const double a = block(0).dual_norm(head(xi));
    const double b = block(1).dual_norm(tail(xi));
    return std::sqrt(a * a / beta(0) + b * b / beta(1));
  }
  if (generator() == Generator::kEntropy) return xi.lpNorm<Eigen::Infinity>();
  return xi.norm();
}

double ProximalSetup::dgf(const Vector& z) const {
  require_dim(z, dim(), "dgf");
  if (kind() == DomainKind::kProduct) {
    return beta(0) * block(0).dgf(head(z)) + beta(1) * block(1).dgf(tail(z));
  }
  if (generator() == Generator::kEntropy) return entropy_dgf(z);
  if (kind() == DomainKind::kSimplex) return 0.5 * z.squaredNorm();
  return 0.5 * (z - center()).squaredNorm();
}

Vector ProximalSetup::dgf_gradient(const Vector& z) const {
  require_dim(z, dim(), "dgf_gradient");
  if (kind() == DomainKind::kProduct) {
    return concat(beta(0) * block(0).dgf_gradient(head(z)), beta(1) * block(1).dgf_gradient(tail(z)));
  }
  if (generator() == Generator::kEntropy) {
    return (z.array().max(kEntropyFloor).log() + 1.0).matrix();
  }
  if (kind() == DomainKind::kSimplex) return z;
  return z - center();
}

double ProximalSetup::bregman(const Vector& z, const Vector& target) const {
  require_dim(z, dim(), "bregman");
  require_dim(target, dim(), "bregman");
  if (kind() == DomainKind::kProduct) {
    return beta(0) * block(0).bregman(head(z), head(target)) +
           beta(1) * block(1).bregman(tail(z), tail(target));
  }
  if (generator() == Generator::kEntropy) {
    if ((z.array() <= 0.0).any()) throw DomainError("bregman: entropy prox center has a zero coordinate");
    double v = 0.0;
    for (Index i = 0; i < z.size(); ++i) {
      if (target[i] > 0.0) v += target[i] * (std::log(target[i]) - std::log(z[i]));
      v += z[i] - target[i];
    }
    return std::max(v, 0.0);
  }
  return 0.5 * (target - z).squaredNorm();
}

Vector ProximalSetup::prox(const Vector& center_point, const Vector& xi) const {
  require_dim(center_point, dim(), "prox center");
  require_dim(xi, dim(), "prox input");
  require_finite(xi, "prox input");
  if (kind() == DomainKind::kProduct) {
    return concat(block(0).prox(head(center_point), head(xi) / beta(0)),
                  block(1).prox(tail(center_point), tail(xi) / beta(1)));
  }
  if (generator() == Generator::kEntropy) {
    return softmax((center_point.array().max(kEntropyFloor).log() - xi.array()).matrix());
  }
  return project(center_point - xi);
}

Vector ProximalSetup::mirror_argmin(const Vector& w, double scale) const {
  require_dim(w, dim(), "mirror_argmin");
  require_finite(w, "mirror_argmin");
  if (!(scale > 0.0)) throw InputError("mirror_argmin: scale must be positive");
  if (kind() == DomainKind::kProduct) {
    return concat(block(0).mirror_argmin(head(w), scale * beta(0)),
                  block(1).mirror_argmin(tail(w), scale * beta(1)));
  }
  if (generator() == Generator::kEntropy) return softmax(-w / scale);
  if (kind() == DomainKind::kSimplex) return project_simplex(-w / scale);
  return project(center() - w / scale);
}

Vector ProximalSetup::omega_center() const { return state_->center; }

double ProximalSetup::set_width() const {
  const auto n = static_cast<double>(dim());
  switch (kind()) {
    case DomainKind::kProduct:
      return beta(0) * block(0).set_width() + beta(1) * block(1).set_width();
    case DomainKind::kSimplex:
      return generator() == Generator::kEntropy ? std::log(n) : 0.5 * (1.0 - 1.0 / n);
    case DomainKind::kBall:
      return 0.5 * radius() * radius();
    case DomainKind::kBox:
      return 0.125 * (upper() - lower()).squaredNorm();
  }
  return 0.0;
}

double ProximalSetup::diameter() const {
  switch (kind()) {
    case DomainKind::kProduct: {
      const double a = block(0).diameter();
      const double b = block(1).diameter();
      return std::sqrt(beta(0) * a * a + beta(1) * b * b);
    }
    case DomainKind::kSimplex:
      return dim() < 2 ? 0.0 : (generator() == Generator::kEntropy ? 2.0 : std::sqrt(2.0));
    case DomainKind::kBall:
      return 2.0 * radius();
    case DomainKind::kBox:
      return (upper() - lower()).norm();
  }
  return 0.0;
}

double ProximalSetup::max_euclidean_distance(const Vector& a) const {
  require_dim(a, dim(), "max_euclidean_distance");
  switch (kind()) {
    case DomainKind::kProduct: {
      const double p = block(0).max_euclidean_distance(head(a));
      const double q = block(1).max_euclidean_distance(tail(a));
      return std::sqrt(p * p + q * q);
    }
    case DomainKind::kSimplex: {
      // |a - e_i|^2 = |a|^2 - 2 a_i + 1, maximized at the smallest a_i.
      return std::sqrt(std::max(0.0, a.squaredNorm() - 2.0 * a.minCoeff() + 1.0));
    }
    case DomainKind::kBall:
      return (a - center()).norm() + radius();
    case DomainKind::kBox:
      return (a - lower()).cwiseAbs().cwiseMax((a - upper()).cwiseAbs()).norm();
  }
  return 0.0;
}

bool ProximalSetup::contains(const Vector& z, double tol) const {
  if (z.size() != dim() || !z.allFinite()) return false;
  switch (kind()) {
    case DomainKind::kProduct:
      return block(0).contains(head(z), tol) && block(1).contains(tail(z), tol);
    case DomainKind::kSimplex:
      return z.minCoeff() >= -tol && std::abs(z.sum() - 1.0) <= tol;
    case DomainKind::kBall:
      return (z - center()).norm() <= radius() + tol;
    case DomainKind::kBox:
      return ((z - lower()).array() >= -tol).all() && ((upper() - z).array() >= -tol).all();
  }
  return false;
}

Vector ProximalSetup::project(const Vector& y) const {
  require_dim(y, dim(), "project");
  switch (kind()) {
    case DomainKind::kProduct:
      return concat(block(0).project(head(y)), block(1).project(tail(y)));
    case DomainKind::kSimplex:
      return project_simplex(y);
    case DomainKind::kBall: {
      const Vector d = y - center();
      const double r = d.norm();
      if (r <= radius()) return y;
      return center() + d * (radius() / r);
    }
    case DomainKind::kBox:
      return y.cwiseMax(lower()).cwiseMin(upper());
  }
  return y;
}

Vector ProximalSetup::linear_minimizer(const Vector& g) const {
  require_dim(g, dim(), "linear_minimizer");
  switch (kind()) {
    case DomainKind::kProduct:
      return concat(block(0).linear_minimizer(head(g)), block(1).linear_minimizer(tail(g)));
    case DomainKind::kSimplex: {
      Index i = 0;
      g.minCoeff(&i);
      Vector z = Vector::Zero(dim());
      z[i] = 1.0;
      return z;
    }
    case DomainKind::kBall: {
      const double n = g.norm();
      if (n == 0.0) return center();
      return center() - g * (radius() / n);
    }
    case DomainKind::kBox: {
      Vector z(dim());
      for (Index i = 0; i < dim(); ++i) z[i] = g[i] > 0.0 ? lower()[i] : upper()[i];
      return z;
    }
  }
  return center();
}

Vector ProximalSetup::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (kind()) {
    case DomainKind::kProduct:
      return concat(block(0).sample(rng), block(1).sample(rng));
    case DomainKind::kSimplex: {
      Vector z(dim());
      for (Index i = 0; i < dim(); ++i) z[i] = -std::log(1.0 - unif(rng)) + 1e-12;
      return z / z.sum();
    }
    case DomainKind::kBall: {
      Vector d(dim());
      for (Index i = 0; i < dim(); ++i) d[i] = gauss(rng);
      const double r = radius() * std::pow(unif(rng), 1.0 / static_cast<double>(dim()));
      return center() + d * (r / d.norm());
    }
    case DomainKind::kBox: {
      Vector z(dim());
      for (Index i = 0; i < dim(); ++i) z[i] = lower()[i] + (upper()[i] - lower()[i]) * unif(rng);
      return z;
    }
  }
  return center();
}

}  // namespace ocokit
