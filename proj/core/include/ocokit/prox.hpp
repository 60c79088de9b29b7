#pragma once

#include <Eigen/Dense>

#include <memory>
#include <random>

namespace ocokit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class DomainKind { kSimplex, kBall, kBox, kProduct };

/// Distance-generating function family of a (non-product) setup.
enum class Generator { kEntropy, kEuclidean, kComposite };

/// Coordinates below this are clamped before taking logarithms in the
/// entropy setup.
inline constexpr double kEntropyFloor = 1e-15;

/// A compact convex domain together with its norm, distance-generating
/// function (d.g.f.) omega, Bregman distance, prox-mapping, omega-center
/// and set width.
///
/// Supported setups:
///   - entropy on the simplex: norm l1, dual l-inf, omega(z) = sum z log z,
///     width log(n);
///   - Euclidean d.g.f. 0.5 |z|^2 on a simplex, ball (any center) or box:
///     norm l2, prox is the Euclidean projection of z - xi;
///   - product X x Y with omega = beta_x omega_x + beta_y omega_y. Its norm is
///     |[x;y]|^2 = beta_x |x|_x^2 + beta_y |y|_y^2 and the dual norm is
///     |[a;b]|_*^2 = |a|_{x,*}^2 / beta_x + |b|_{y,*}^2 / beta_y, for which the
///     composite d.g.f. is 1-strongly convex.
///
/// Setups are immutable and cheap to copy (shared state).
class ProximalSetup {
 public:
  static ProximalSetup entropy_simplex(Index n);
  static ProximalSetup euclidean_simplex(Index n);
  static ProximalSetup euclidean_ball(Index n, double radius);
  static ProximalSetup euclidean_ball(Vector center, double radius);
  static ProximalSetup euclidean_box(Vector lower, Vector upper);
  static ProximalSetup product(const ProximalSetup& x, const ProximalSetup& y,
                               double beta_x, double beta_y);

  DomainKind kind() const;
  Generator generator() const;
  Index dim() const;

  double norm(const Vector& z) const;
  double dual_norm(const Vector& xi) const;

  double dgf(const Vector& z) const;
  Vector dgf_gradient(const Vector& z) const;

  /// V_z(target) = omega(target) - omega(z) - <grad omega(z), target - z>.
  /// Throws DomainError when z is not in the interior for the entropy setup.
  double bregman(const Vector& z, const Vector& target) const;

  /// argmin_{z'} <xi, z'> + V_center(z').
  Vector prox(const Vector& center, const Vector& xi) const;

  /// argmin_{z} <w, z> + scale * omega(z), scale > 0.
  Vector mirror_argmin(const Vector& w, double scale) const;

  Vector omega_center() const;
  double set_width() const;

  /// max |z - z'| over the domain, in this setup's norm.
  double diameter() const;

  /// max over z in the domain of the Euclidean distance |z - a|_2.
  double max_euclidean_distance(const Vector& a) const;

  bool contains(const Vector& z, double tol = 1e-9) const;

  /// Euclidean projection onto the domain.
  Vector project(const Vector& y) const;

  /// A minimizer of <g, z> over the domain.
  Vector linear_minimizer(const Vector& g) const;

  /// Random point of the domain; strictly interior for the simplex.
  Vector sample(std::mt19937_64& rng) const;

  // Ball / box parameters.
  double radius() const;
  const Vector& center() const;
  const Vector& lower() const;
  const Vector& upper() const;

  // Product structure.
  const ProximalSetup& block(int i) const;
  double beta(int i) const;
  Vector head(const Vector& z) const;
  Vector tail(const Vector& z) const;
  static Vector concat(const Vector& a, const Vector& b);

 private:
  struct State;
  explicit ProximalSetup(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

/// Euclidean projection onto the probability simplex (sort based).
Vector project_simplex(const Vector& y);

/// Numerically stable normalized exponential of s.
Vector softmax(const Vector& s);

/// Throws InputError unless all entries are finite.
void require_finite(const Vector& v, const char* what);

}  // namespace ocokit
