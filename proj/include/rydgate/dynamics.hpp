#pragma once

#include <span>
#include <vector>

#include "rydgate/harmonic_operator.hpp"
#include "rydgate/integrator.hpp"
#include "rydgate/model.hpp"
#include "rydgate/quantum_core.hpp"

namespace rydgate {

/// pi / sqrt(omega1^2 + omega2^2). Throws std::invalid_argument if both vanish.
double gate_time(double omega1, double omega2);

struct EvolutionResult {
  std::vector<double> times;
  std::vector<Ket> kets;                  // filled by evolve_ket
  std::vector<DensityMatrix> densities;   // filled by evolve_density
  long steps = 0;
  /// Largest |<psi|psi> - 1| or |tr rho - 1| over the stored samples.
  double max_norm_drift = 0.0;

  /// Population of basis state `index` at every stored sample.
  std::vector<double> population_trace(int index) const;
};

/// Step used for fixed-step runs: cfg.dt, or the automatic choice. Validated
/// with check_fixed_step when the method is RK4.
double resolve_step(const HarmonicOperator& h, const IntegratorConfig& cfg, double decay_rate = 0.0);

EvolutionResult evolve_ket(const HarmonicOperator& h, const Ket& psi0, double t_final,
                           const IntegratorConfig& cfg = {});

/// Evolves several kets at once (columns of `psi0`). Returns the final states.
Eigen::MatrixXcd evolve_kets(const HarmonicOperator& h, const Eigen::MatrixXcd& psi0, double t_final,
                             const IntegratorConfig& cfg = {});

/// Lindblad master equation; each jump operator L contributes
/// rate * (L rho L^dag - {L^dag L, rho} / 2). Hermitian inputs are kept
/// exactly Hermitian after every step.
EvolutionResult evolve_density(const HarmonicOperator& h, std::span<const JumpOperator> jumps,
                               const DensityMatrix& rho0, double t_final, const IntegratorConfig& cfg = {});

/// Linear map on d x d matrices as a d^2 x d^2 superoperator acting on
/// column-stacked vectors: vec(A)[i + d j] = A(i, j).
struct ProcessMap {
  Operator superop;
  int d = 0;
  double t = 0.0;

  Operator apply(const Operator& a) const;
  static ProcessMap identity(int d);
  /// rho -> M rho M^dag.
  static ProcessMap conjugation(const Operator& m, double t = 0.0);
  /// This map followed by `next`.
  ProcessMap then(const ProcessMap& next) const;
};

enum class ChannelPath { kAuto, kKets, kDensity };

struct ChannelOptions {
  ChannelPath path = ChannelPath::kAuto;
  int threads = 1;
};

struct ChannelTrajectory {
  std::vector<double> times;
  std::vector<ProcessMap> maps;
  long steps = 0;
  double max_norm_drift = 0.0;
};

/// Process map restricted to the computational subspace: for every
/// computational unit |i><j| evolve, then project back. The ket path (no
/// decay) forms M rho M^dag from the projected propagator; the density path
/// evolves e_ii and e_ij (i < j) and uses e(E_ji) = e(E_ij)^dag.
ChannelTrajectory extract_channel_trajectory(const HarmonicOperator& h, std::span<const JumpOperator> jumps,
                                             const CompSubspaceMap& map, double t_final,
                                             const IntegratorConfig& cfg = {}, const ChannelOptions& opts = {});

ProcessMap extract_channel(const HarmonicOperator& h, std::span<const JumpOperator> jumps,
                           const CompSubspaceMap& map, double t_final, const IntegratorConfig& cfg = {},
                           const ChannelOptions& opts = {});

/// Projected propagator P U(t) P on the computational subspace (no decay).
Operator projected_propagator(const HarmonicOperator& h, const CompSubspaceMap& map, double t_final,
                              const IntegratorConfig& cfg = {});

}  // namespace rydgate
