#pragma once

#include "ocokit/prox.hpp"

#include <random>
#include <vector>

namespace ocokit {

/// First-order access to a stream of convex losses f_1 .. f_T.
class LossOracle {
 public:
  virtual ~LossOracle() = default;
  virtual int horizon() const = 0;
  virtual Index dim() const = 0;
  virtual double value(int t, const Vector& x) const = 0;
  virtual Vector subgradient(int t, const Vector& x) const = 0;
};

/// First-order access to convex-concave phi_1 .. phi_T through the monotone
/// operator F_t(x, y) = [grad_x phi_t; -grad_y phi_t].
class SaddleOracle {
 public:
  virtual ~SaddleOracle() = default;
  virtual int horizon() const = 0;
  virtual Index dim_x() const = 0;
  virtual Index dim_y() const = 0;
  virtual double value(int t, const Vector& x, const Vector& y) const = 0;
  virtual Vector op(int t, const Vector& x, const Vector& y) const = 0;
};

/// f(x) = rho/2 |x - anchor|_2^2 + max_j (slopes_j . x + offsets_j).
/// Ties in the max resolve to the lowest index.
struct PiecewiseQuadratic {
  double rho = 0.0;
  Vector anchor;
  Matrix slopes;  // k x n
  Vector offsets; // k

  static PiecewiseQuadratic linear(const Vector& c, double offset = 0.0);
  static PiecewiseQuadratic quadratic(double rho, const Vector& anchor);

  Index dim() const { return slopes.cols(); }
  Index pieces() const { return slopes.rows(); }
  Index active(const Vector& x) const;
  double value(const Vector& x) const;
  Vector subgradient(const Vector& x) const;
  /// Upper bound on sup_{x in setup} |grad f(x)|_* in the setup's dual norm.
  double lipschitz_bound(const ProximalSetup& setup) const;
};

class PiecewiseQuadraticStream final : public LossOracle {
 public:
  explicit PiecewiseQuadraticStream(std::vector<PiecewiseQuadratic> terms);

  int horizon() const override { return static_cast<int>(terms_.size()); }
  Index dim() const override { return dim_; }
  double value(int t, const Vector& x) const override;
  Vector subgradient(int t, const Vector& x) const override;

  const PiecewiseQuadratic& term(int t) const { return terms_.at(static_cast<size_t>(t - 1)); }
  const std::vector<PiecewiseQuadratic>& terms() const { return terms_; }

  double lipschitz_bound(const ProximalSetup& setup) const;
  /// Smallest rho over the stream (strong convexity w.r.t. 0.5|x|^2).
  double strong_convexity() const;
  /// Largest rho; valid smoothness modulus only when every term has a single
  /// affine piece.
  double smoothness() const;
  bool smooth() const;

 private:
  std::vector<PiecewiseQuadratic> terms_;
  Index dim_;
};

/// phi(x, y) = x' A y + b' x + c' y.
struct BilinearGame {
  Matrix A;
  Vector b;
  Vector c;

  static BilinearGame matrix(Matrix A);
  double value(const Vector& x, const Vector& y) const;
  Vector op(const Vector& x, const Vector& y) const;
};

class BilinearGameStream final : public SaddleOracle {
 public:
  explicit BilinearGameStream(std::vector<BilinearGame> games);

  int horizon() const override { return static_cast<int>(games_.size()); }
  Index dim_x() const override { return games_.front().A.rows(); }
  Index dim_y() const override { return games_.front().A.cols(); }
  double value(int t, const Vector& x, const Vector& y) const override;
  Vector op(int t, const Vector& x, const Vector& y) const override;

  const BilinearGame& game(int t) const { return games_.at(static_cast<size_t>(t - 1)); }
  const std::vector<BilinearGame>& games() const { return games_; }

  /// Lipschitz modulus of F_t on the product setup, using max |A_ij| and the
  /// product norm when both blocks are l1 (entropy) simplices, or the
  /// spectral norm when both are Euclidean.
  double smoothness(const ProximalSetup& product) const;
  /// Dual-norm bound on F_t over the product setup.
  double operator_bound(const ProximalSetup& product) const;

 private:
  std::vector<BilinearGame> games_;
};

namespace streams {

/// Max-of-affine losses with slopes and offsets uniform in [-scale, scale].
PiecewiseQuadraticStream max_affine(std::mt19937_64& rng, int horizon, Index dim, Index pieces,
                                    double scale = 1.0);

/// rho/2 |x - a_t|^2 with a_t sampled in the domain.
PiecewiseQuadraticStream quadratic(std::mt19937_64& rng, int horizon, const ProximalSetup& setup, double rho);

/// rho/2 |x - a_t|^2 + max_j(...) mixes (strongly convex, non-smooth).
PiecewiseQuadraticStream strongly_convex_max(std::mt19937_64& rng, int horizon, const ProximalSetup& setup,
                                             double rho, Index pieces, double scale);

/// A_t = A_0 + noise * E_t with entries of A_0, E_t uniform in [-1, 1].
BilinearGameStream bilinear(std::mt19937_64& rng, int horizon, Index m, Index n, double noise);

}  // namespace streams

}  // namespace ocokit
