#include "ocokit/schedule.hpp"

#include "ocokit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ocokit {

WeightSchedule::WeightSchedule(WeightKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  sup_ = *std::max_element(values_.begin(), values_.end());
}

WeightSchedule WeightSchedule::uniform(int horizon) {
  if (horizon < 1) throw ConfigError("weights: horizon must be at least 1");
  return {WeightKind::kUniform, std::vector<double>(static_cast<size_t>(horizon), 1.0 / horizon)};
}

WeightSchedule WeightSchedule::increasing_linear(int horizon) {
  if (horizon < 1) throw ConfigError("weights: horizon must be at least 1");
  const double T = horizon;
  std::vector<double> v(static_cast<size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) v[static_cast<size_t>(t - 1)] = 2.0 * t / (T * (T + 1.0));
  return {WeightKind::kIncreasingLinear, std::move(v)};
}

WeightSchedule WeightSchedule::custom(std::vector<double> values) {
  if (values.empty()) throw ConfigError("weights: empty custom schedule");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("weights: custom values must be nonnegative");
  }
  const double s = std::accumulate(values.begin(), values.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-12) throw ConfigError("weights: custom values must sum to 1");
  return {WeightKind::kCustom, std::move(values)};
}

WeightSchedule WeightSchedule::make(WeightKind kind, int horizon) {
  switch (kind) {
    case WeightKind::kUniform:
      return uniform(horizon);
    case WeightKind::kIncreasingLinear:
      return increasing_linear(horizon);
    case WeightKind::kCustom:
      break;
  }
  throw ConfigError("weights: custom schedules need explicit values");
}

StepSchedule::StepSchedule(StepKind kind, StepParams params, WeightSchedule theta, std::vector<double> gammas)
    : kind_(kind), params_(params), theta_(std::move(theta)), gammas_(std::move(gammas)) {}

namespace {

double need(const std::optional<double>& p, const char* name, StepKind kind) {
  if (!p) throw ConfigError("step schedule '" + to_string(kind) + "' requires parameter " + name);
  if (!(*p > 0.0) || !std::isfinite(*p)) {
    throw ConfigError(std::string("step schedule parameter ") + name + " must be positive and finite");
  }
  return *p;
}

}  // namespace

StepSchedule StepSchedule::make(StepKind kind, const StepParams& params, const WeightSchedule& theta) {
  const int T = theta.horizon();
  std::vector<double> g(static_cast<size_t>(T));
  switch (kind) {
    case StepKind::kConstantNonsmooth: {
      const double omega = need(params.omega, "omega", kind);
      const double G = need(params.G, "G", kind);
      const double gamma = std::sqrt(2.0 * omega / (theta.sup_squared() * G * G * T));
      std::fill(g.begin(), g.end(), gamma);
      break;
    }
    case StepKind::kInverseLinear: {
      const double alpha = need(params.alpha, "alpha", kind);
      for (int t = 1; t <= T; ++t) g[static_cast<size_t>(t - 1)] = 2.0 / (alpha * (t + 1.0));
      break;
    }
    case StepKind::kConstantSmooth: {
      const double L = need(params.L, "L", kind);
      std::fill(g.begin(), g.end(), 1.0 / (L * theta.sup()));
      break;
    }
  }
  return {kind, params, theta, std::move(g)};
}

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::kUniform:
      return "uniform";
    case WeightKind::kIncreasingLinear:
      return "increasing-linear";
    case WeightKind::kCustom:
      return "custom";
  }
  return "?";
}

std::string to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kConstantNonsmooth:
      return "constant-nonsmooth";
    case StepKind::kInverseLinear:
      return "inverse-linear";
    case StepKind::kConstantSmooth:
      return "constant-smooth";
  }
  return "?";
}

WeightKind parse_weight_kind(const std::string& name) {
  if (name == "uniform") return WeightKind::kUniform;
  if (name == "increasing-linear" || name == "increasing") return WeightKind::kIncreasingLinear;
  if (name == "custom") return WeightKind::kCustom;
  throw ConfigError("unknown weight kind: " + name);
}

StepKind parse_step_kind(const std::string& name) {
  if (name == "constant-nonsmooth") return StepKind::kConstantNonsmooth;
  if (name == "inverse-linear") return StepKind::kInverseLinear;
  if (name == "constant-smooth") return StepKind::kConstantSmooth;
  throw ConfigError("unknown step kind: " + name);
}

}  // namespace ocokit
