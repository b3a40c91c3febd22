#include "rydgate/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rydgate/errors.hpp"

namespace rydgate {

namespace {

constexpr int kFiniteCheckInterval = 256;

void require_finite(const StateMatrix& x, double t) {
  if (!x.allFinite()) throw NumericalError("integrator: non-finite state at t = " + std::to_string(t));
}

bool should_store(long step, int store_every) { return store_every > 0 && step % store_every == 0; }

IntegrationStats integrate_rk4(const RhsFunction& rhs, StateMatrix& x, double t_final, double dt,
                               const IntegratorConfig& cfg, const ObserverFunction& observer,
                               const PostStepFunction& post_step) {
  IntegrationStats stats;
  if (t_final == 0.0) return stats;
  const long n = std::max(1L, static_cast<long>(std::ceil(t_final / dt * (1.0 - 1e-12))));
  const double h = t_final / static_cast<double>(n);
  StateMatrix k1(x.rows(), x.cols()), k2(x.rows(), x.cols()), k3(x.rows(), x.cols()), k4(x.rows(), x.cols());
  StateMatrix tmp(x.rows(), x.cols());
  for (long step = 0; step < n; ++step) {
    const double t = h * static_cast<double>(step);
    rhs(t, x, k1);
    tmp = x + (0.5 * h) * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = x + (0.5 * h) * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = x + h * k3;
    rhs(t + h, tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (post_step) post_step(x);
    ++stats.steps;
    const double t_next = (step + 1 == n) ? t_final : h * static_cast<double>(step + 1);
    if ((step + 1) % kFiniteCheckInterval == 0 || step + 1 == n) require_finite(x, t_next);
    if (observer && (should_store(step + 1, cfg.store_every) || step + 1 == n)) observer(t_next, x);
  }
  return stats;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

IntegrationStats integrate_adaptive(const RhsFunction& rhs, StateMatrix& x, double t_final, double dt,
                                    const IntegratorConfig& cfg, const ObserverFunction& observer,
                                    const PostStepFunction& post_step) {
  IntegrationStats stats;
  if (t_final == 0.0) return stats;
  const auto rows = x.rows();
  const auto cols = x.cols();
  StateMatrix k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols), k5(rows, cols),
      k6(rows, cols), k7(rows, cols), tmp(rows, cols), x_new(rows, cols), err(rows, cols);
  double t = 0.0;
  double h = std::min(dt, t_final);
  rhs(t, x, k1);
  long accepted = 0;
  while (t < t_final) {
    bool last = false;
    if (t + h >= t_final * (1.0 - 1e-14)) {
      h = t_final - t;
      last = true;
    }
    tmp = x + h * a21 * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = x + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = x + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, x_new, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x(i, j)), std::abs(x_new(i, j)));
        norm = std::max(norm, std::abs(err(i, j)) / scale);
      }
    }
    if (!std::isfinite(norm)) throw NumericalError("integrator: non-finite error estimate at t = " + std::to_string(t));

    if (norm <= 1.0) {
      t = last ? t_final : t + h;
      x.swap(x_new);
      if (post_step) {
        post_step(x);
        rhs(t, x, k1);
      } else {
        k1.swap(k7);
      }
      ++stats.steps;
      ++accepted;
      if (accepted % kFiniteCheckInterval == 0 || last) require_finite(x, t);
      if (observer && (should_store(accepted, cfg.store_every) || last)) observer(t, x);
      if (last) break;
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      h *= factor;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.25));
      if (h < 1e-15 * t_final) throw NumericalError("integrator: step size underflow at t = " + std::to_string(t));
    }
  }
  return stats;
}

}  // namespace

double auto_step(const HarmonicOperator& h, const IntegratorConfig& cfg, double extra_rate) {
  const double norm = h.norm_bound() + extra_rate;
  const double rate = std::max(h.max_frequency(), norm);
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::pi / (cfg.steps_per_period * rate);
}

void check_fixed_step(const HarmonicOperator& h, double dt, double extra_rate) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrator: step must be positive");
  const double w = h.max_frequency();
  if (w > 0.0 && dt > 2.0 * std::numbers::pi / w / 40.0) {
    throw std::invalid_argument("integrator: step " + std::to_string(dt) +
                                " exceeds (2 pi / w_max) / 40 = " + std::to_string(2.0 * std::numbers::pi / w / 40.0));
  }
  if (dt * (h.norm_bound() + extra_rate) > 2.0) {
    throw std::invalid_argument("integrator: step " + std::to_string(dt) + " violates the RK4 stability bound");
  }
}

IntegrationStats integrate(const RhsFunction& rhs, StateMatrix& state, double t_final, double dt,
                           const IntegratorConfig& cfg, const ObserverFunction& observer,
                           const PostStepFunction& post_step) {
  if (t_final < 0.0) throw std::invalid_argument("integrator: negative final time");
  if (!(dt > 0.0)) throw std::invalid_argument("integrator: step must be positive");
  require_finite(state, 0.0);
  if (observer) observer(0.0, state);
  if (cfg.method == IntegratorMethod::kRk4) return integrate_rk4(rhs, state, t_final, dt, cfg, observer, post_step);
  return integrate_adaptive(rhs, state, t_final, dt, cfg, observer, post_step);
}

}  // namespace rydgate
