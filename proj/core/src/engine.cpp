#include "ocokit/engine.hpp"

#include "ocokit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ocokit {

double RunTrace::max_residual() const {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& s : steps) r = std::max(r, s.step_residual);
  return r;
}

double RunTrace::max_cancellation() const {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& s : steps) r = std::max(r, s.cancellation);
  return r;
}

Vector RunTrace::average(const std::vector<double>& theta) const {
  if (points.empty() || theta.size() != points.size()) throw InputError("average: weights/trace length mismatch");
  Vector a = Vector::Zero(points.front().size());
  for (size_t t = 0; t < points.size(); ++t) a += theta[t] * points[t];
  return a;
}

namespace {

void check_feed(const Vector& v, Index n, int t, const char* what) {
  if (v.size() != n) {
    throw InputError(std::string(what) + " at step " + std::to_string(t) + ": expected dimension " +
                     std::to_string(n) + ", got " + std::to_string(v.size()));
  }
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw InputError(std::string(what) + " at step " + std::to_string(t) + ": non-finite entry " +
                       std::to_string(v[i]) + " at coordinate " + std::to_string(i));
    }
  }
}

// max over comparators of (lhs - rhs) / max(1, |terms|) where
//   lhs = gamma <xi, z_t - z>,
//   rhs = V_prev(z) - V_next(z) + extra.
double step_residual(const ProximalSetup& setup, const std::vector<Vector>& comparators, const Vector& point,
                     const Vector& prev, const Vector& next, const Vector& scaled_xi, double extra) {
  double worst = -std::numeric_limits<double>::infinity();
  auto check = [&](const Vector& z) {
    const double lhs = scaled_xi.dot(point - z);
    const double a = setup.bregman(prev, z);
    const double b = setup.bregman(next, z);
    const double scale = std::max({1.0, std::abs(lhs), a, b, std::abs(extra)});
    worst = std::max(worst, (lhs - (a - b + extra)) / scale);
  };
  for (const auto& z : comparators) check(z);
  check(setup.omega_center());
  check(next);
  return worst;
}

}  // namespace

MirrorDescent::MirrorDescent(ProximalSetup setup, StepSchedule steps, EngineOptions opts)
    : setup_(std::move(setup)), steps_(std::move(steps)), opts_(std::move(opts)) {
  z_ = setup_.omega_center();
  trace_.mirror_prox = false;
  trace_.steps.reserve(static_cast<size_t>(steps_.horizon()));
  trace_.points.reserve(static_cast<size_t>(steps_.horizon()));
  for (const auto& c : opts_.comparators) check_feed(c, setup_.dim(), 0, "comparator");
}

void MirrorDescent::advance(const Vector& xi) {
  if (done()) throw ConfigError("mirror descent: horizon exhausted");
  check_feed(xi, setup_.dim(), t_, "mirror descent feed");
  const double gamma = steps_.gamma(t_);
  const Vector gxi = gamma * xi;
  Vector next = setup_.prox(z_, gxi);

  StepRecord rec;
  rec.t = t_;
  rec.gamma = gamma;
  rec.theta = steps_.theta(t_);
  rec.xi_dual_norm = setup_.dual_norm(xi);
  if (opts_.check_inequality) {
    const double extra = 0.5 * gamma * gamma * rec.xi_dual_norm * rec.xi_dual_norm;
    rec.step_residual = step_residual(setup_, opts_.comparators, z_, z_, next, gxi, extra);
  }
  trace_.steps.push_back(rec);
  trace_.points.push_back(z_);
  z_ = std::move(next);
  ++t_;
  if (done()) trace_.final_center = z_;
}

MirrorProx::MirrorProx(ProximalSetup setup, StepSchedule steps, EngineOptions opts)
    : setup_(std::move(setup)), steps_(std::move(steps)), opts_(std::move(opts)) {
  v_ = setup_.omega_center();
  trace_.mirror_prox = true;
  trace_.steps.reserve(static_cast<size_t>(steps_.horizon()));
  trace_.points.reserve(static_cast<size_t>(steps_.horizon()));
  trace_.leaders.reserve(static_cast<size_t>(steps_.horizon()));
  for (const auto& c : opts_.comparators) check_feed(c, setup_.dim(), 0, "comparator");
}

const Vector& MirrorProx::current() const {
  if (!proposed_) throw ConfigError("mirror prox: current point requested before propose()");
  return z_;
}

const Vector& MirrorProx::propose(const Vector& eta) {
  if (done()) throw ConfigError("mirror prox: horizon exhausted");
  if (proposed_) throw ConfigError("mirror prox: propose() called twice in one step");
  check_feed(eta, setup_.dim(), t_, "mirror prox lookahead feed");
  z_ = setup_.prox(v_, steps_.gamma(t_) * eta);
  eta_ = eta;
  proposed_ = true;
  return z_;
}

void MirrorProx::advance(const Vector& xi) {
  if (!proposed_) throw ConfigError("mirror prox: advance() before propose()");
  check_feed(xi, setup_.dim(), t_, "mirror prox feed");
  const double gamma = steps_.gamma(t_);
  const Vector gxi = gamma * xi;
  Vector next = setup_.prox(v_, gxi);

  StepRecord rec;
  rec.t = t_;
  rec.gamma = gamma;
  rec.theta = steps_.theta(t_);
  rec.xi_dual_norm = setup_.dual_norm(xi);
  const double diff = setup_.dual_norm(xi - eta_);
  const double move = setup_.norm(z_ - v_);
  rec.cancellation = gamma * gamma * diff * diff - move * move;
  if (opts_.check_inequality) {
    rec.step_residual = step_residual(setup_, opts_.comparators, z_, v_, next, gxi, 0.5 * rec.cancellation);
  }
  trace_.steps.push_back(rec);
  trace_.points.push_back(z_);
  trace_.leaders.push_back(v_);
  v_ = std::move(next);
  proposed_ = false;
  ++t_;
  if (done()) trace_.final_center = v_;
}

RunTrace mirror_descent(const ProximalSetup& setup, const StepSchedule& steps, const Feed& feed,
                        EngineOptions opts) {
  MirrorDescent md(setup, steps, std::move(opts));
  while (!md.done()) md.advance(feed(md.t(), md.current()));
  return md.release();
}

RunTrace mirror_prox(const ProximalSetup& setup, const StepSchedule& steps, const Feed& feed_eta,
                     const Feed& feed_xi, EngineOptions opts) {
  MirrorProx mp(setup, steps, std::move(opts));
  while (!mp.done()) {
    const int t = mp.t();
    const Vector& z = mp.propose(feed_eta(t, mp.leader()));
    mp.advance(feed_xi(t, z));
  }
  return mp.release();
}

}  // namespace ocokit
