#pragma once

#include "rydgate/dynamics.hpp"
#include "rydgate/quantum_core.hpp"

namespace rydgate {

struct FidelityResult {
  double fbar = 0.0;
  int d = 0;
  double t_gate = 0.0;
};

/// Average gate fidelity of `channel` against the unitary `target`:
///   [sum_j tr(O O_j^dag O^dag e(O_j)) + d^2] / [d^2 (d + 1)]
/// with O_j running over all Pauli strings on log2(d) qubits. Throws
/// std::invalid_argument on dimension mismatch and NumericalError if the sum
/// has an imaginary part above 1e-9.
FidelityResult average_fidelity(const ProcessMap& channel, const Operator& target);

/// (|tr(O^dag M)|^2 + d) / (d (d + 1)) for the map rho -> M rho M^dag.
/// Equals average_fidelity(ProcessMap::conjugation(M), O) for any M. The
/// Pauli-sum form assumes trace preservation, so for non-unitary M this is
/// not the Haar average, whose second term is tr(M^dag M).
double conjugation_fidelity(const Operator& m, const Operator& target);

/// Follows `channel` with the diagonal unitary diag(phases).
ProcessMap apply_phase_frame(const ProcessMap& channel, const Ket& phases);

/// rho -> (1 - p) rho + p tr(rho) I / d.
ProcessMap depolarizing(int d, double p);

double population(const Ket& psi, const Ket& label);
double population(const DensityMatrix& rho, const Ket& label);

/// Initial and ideal final superpositions for the multi-controlled demo:
/// (sum_x |x> - 2 |1..10>) / 2^{n/2} and (sum_x |x> - 2 |1..11>) / 2^{n/2}.
struct FourQubitProbe {
  Ket psi_init;
  Ket phi_target;
};

FourQubitProbe probe_states(int n_qubits = 4);

}  // namespace rydgate
