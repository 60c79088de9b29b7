#pragma once

#include "ocokit/prox.hpp"
#include "ocokit/schedule.hpp"

#include <functional>
#include <vector>

namespace ocokit {

struct StepRecord {
  int t = 0;
  double gamma = 0.0;
  double theta = 0.0;
  double xi_dual_norm = 0.0;
  /// Largest scaled violation of the per-step inequality over the checked
  /// comparators (<= 0 when it holds).
  double step_residual = 0.0;
  /// Mirror prox only: gamma^2 |xi - eta|_*^2 - |z_t - v_t|^2.
  double cancellation = 0.0;
};

struct RunTrace {
  bool mirror_prox = false;
  std::vector<StepRecord> steps;
  std::vector<Vector> points;   // z_1 .. z_T
  std::vector<Vector> leaders;  // v_1 .. v_T (mirror prox)
  Vector final_center;          // z_{T+1} (MD) or v_{T+1} (MP)

  int horizon() const { return static_cast<int>(steps.size()); }
  double max_residual() const;
  double max_cancellation() const;
  /// sum_t theta_t z_t.
  Vector average(const std::vector<double>& theta) const;
};

struct EngineOptions {
  /// Extra points at which the per-step inequality is checked. The
  /// omega-center and the next prox center are always included.
  std::vector<Vector> comparators;
  bool check_inequality = true;
};

/// Mirror descent: z_1 = omega-center, z_{t+1} = Prox_{z_t}(gamma_t xi_t).
/// The caller supplies xi_t after reading z_t; any theta_t factor must already
/// be part of xi_t.
class MirrorDescent {
 public:
  MirrorDescent(ProximalSetup setup, StepSchedule steps, EngineOptions opts = {});

  int t() const { return t_; }
  bool done() const { return t_ > steps_.horizon(); }
  const Vector& current() const { return z_; }
  const ProximalSetup& setup() const { return setup_; }
  void advance(const Vector& xi);
  const RunTrace& trace() const { return trace_; }
  RunTrace release() { return std::move(trace_); }

 private:
  ProximalSetup setup_;
  StepSchedule steps_;
  EngineOptions opts_;
  int t_ = 1;
  Vector z_;
  RunTrace trace_;
};

/// Mirror prox: v_1 = omega-center, z_t = Prox_{v_t}(gamma_t eta_t),
/// v_{t+1} = Prox_{v_t}(gamma_t xi_t). Each step is propose(eta) then
/// advance(xi); eta may only depend on v_t (1-lookahead).
class MirrorProx {
 public:
  MirrorProx(ProximalSetup setup, StepSchedule steps, EngineOptions opts = {});

  int t() const { return t_; }
  bool done() const { return t_ > steps_.horizon(); }
  const Vector& leader() const { return v_; }
  /// Valid after propose() for the current step.
  const Vector& current() const;
  const ProximalSetup& setup() const { return setup_; }
  const Vector& propose(const Vector& eta);
  void advance(const Vector& xi);
  const RunTrace& trace() const { return trace_; }
  RunTrace release() { return std::move(trace_); }

 private:
  ProximalSetup setup_;
  StepSchedule steps_;
  EngineOptions opts_;
  int t_ = 1;
  bool proposed_ = false;
  Vector v_;
  Vector z_;
  Vector eta_;
  RunTrace trace_;
};

using Feed = std::function<Vector(int t, const Vector& point)>;

RunTrace mirror_descent(const ProximalSetup& setup, const StepSchedule& steps, const Feed& feed,
                        EngineOptions opts = {});

RunTrace mirror_prox(const ProximalSetup& setup, const StepSchedule& steps, const Feed& feed_eta,
                     const Feed& feed_xi, EngineOptions opts = {});

}  // namespace ocokit
