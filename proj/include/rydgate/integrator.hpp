#pragma once

#include <functional>

#include "rydgate/harmonic_operator.hpp"
#include "rydgate/quantum_core.hpp"

namespace rydgate {

enum class IntegratorMethod {
  kRk4,       // classic fixed-step fourth order
  kAdaptive,  // Dormand-Prince 5(4) with step control
};

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::kRk4;
  /// Fixed step; 0 picks one automatically from the Hamiltonian.
  double dt = 0.0;
  /// Automatic step resolves the fastest rate with this many points per period.
  double steps_per_period = 50.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Store every k-th step; 0 keeps only the initial and final states.
  int store_every = 0;
};

/// Automatic fixed step: 2 pi / (steps_per_period * w) with w the larger of
/// the fastest drive frequency and the norm bound ||H||, which also caps the
/// fastest phase any populated state can pick up. `extra_rate` adds
/// non-Hermitian (decay) contributions to ||H||.
double auto_step(const HarmonicOperator& h, const IntegratorConfig& cfg, double extra_rate = 0.0);

/// Fixed steps must satisfy dt <= (2 pi / w_max) / 40 for driven Hamiltonians
/// and dt * ||H|| <= 2 (RK4 stability on the imaginary axis). Throws
/// std::invalid_argument otherwise.
void check_fixed_step(const HarmonicOperator& h, double dt, double extra_rate = 0.0);

using StateMatrix = Eigen::MatrixXcd;
using RhsFunction = std::function<void(double t, const StateMatrix& x, StateMatrix& dx)>;
using ObserverFunction = std::function<void(double t, const StateMatrix& x)>;
using PostStepFunction = std::function<void(StateMatrix& x)>;

struct IntegrationStats {
  long steps = 0;
  long rejected = 0;
};

/// Integrates dx/dt = f(t, x) from 0 to t_final in place. The observer sees
/// t = 0, every `store_every`-th step, and t_final. Throws NumericalError on
/// non-finite state.
IntegrationStats integrate(const RhsFunction& rhs, StateMatrix& state, double t_final, double dt,
                           const IntegratorConfig& cfg, const ObserverFunction& observer,
                           const PostStepFunction& post_step = {});

}  // namespace rydgate
