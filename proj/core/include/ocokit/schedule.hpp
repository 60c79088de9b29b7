#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ocokit {

enum class WeightKind { kUniform, kIncreasingLinear, kCustom };

/// Convex combination weights theta in the T-simplex. Indexing is 1-based:
/// theta(1) .. theta(T).
class WeightSchedule {
 public:
  static WeightSchedule uniform(int horizon);
  /// theta_t = 2t / (T(T+1)).
  static WeightSchedule increasing_linear(int horizon);
  /// Nonnegative values summing to 1 within 1e-12.
  static WeightSchedule custom(std::vector<double> values);
  static WeightSchedule make(WeightKind kind, int horizon);

  WeightKind kind() const { return kind_; }
  int horizon() const { return static_cast<int>(values_.size()); }
  double operator()(int t) const { return values_.at(static_cast<size_t>(t - 1)); }
  const std::vector<double>& values() const { return values_; }
  double sup() const { return sup_; }
  double sup_squared() const { return sup_ * sup_; }

 private:
  WeightSchedule(WeightKind kind, std::vector<double> values);
  WeightKind kind_;
  std::vector<double> values_;
  double sup_ = 0.0;
};

enum class StepKind { kConstantNonsmooth, kInverseLinear, kConstantSmooth };

/// Structure constants a step rule may need. Missing ones raise ConfigError
/// when the chosen rule requires them.
struct StepParams {
  std::optional<double> omega;  // set width
  std::optional<double> G;      // dual-norm bound on the feeds' gradients
  std::optional<double> alpha;  // strong convexity modulus
  std::optional<double> L;      // smoothness modulus
};

/// Step sizes gamma_1 .. gamma_T for one of three rules:
///   constant-nonsmooth: gamma = sqrt(2 Omega / (sup theta^2 G^2 T))
///   inverse-linear:     gamma_t = 2 / (alpha (t+1))
///   constant-smooth:    gamma = 1 / (L sup theta)
class StepSchedule {
 public:
  static StepSchedule make(StepKind kind, const StepParams& params, const WeightSchedule& theta);

  StepKind kind() const { return kind_; }
  int horizon() const { return static_cast<int>(gammas_.size()); }
  double gamma(int t) const { return gammas_.at(static_cast<size_t>(t - 1)); }
  double theta(int t) const { return theta_(t); }
  const WeightSchedule& weights() const { return theta_; }
  const std::vector<double>& gammas() const { return gammas_; }
  const StepParams& params() const { return params_; }

 private:
  StepSchedule(StepKind kind, StepParams params, WeightSchedule theta, std::vector<double> gammas);
  StepKind kind_;
  StepParams params_;
  WeightSchedule theta_;
  std::vector<double> gammas_;
};

std::string to_string(WeightKind kind);
std::string to_string(StepKind kind);
WeightKind parse_weight_kind(const std::string& name);
StepKind parse_step_kind(const std::string& name);

}  // namespace ocokit
