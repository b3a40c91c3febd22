#include "rydgate/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rydgate/errors.hpp"

namespace rydgate {

namespace {

int qubits_for(int d) {
  int n = 0;
  while ((1 << n) < d) ++n;
  if ((1 << n) != d || n < 1 || n > 4) throw std::invalid_argument("dimension must be 2^n with 1 <= n <= 4");
  return n;
}

}  // namespace

FidelityResult average_fidelity(const ProcessMap& channel, const Operator& target) {
  const int d = channel.d;
  if (target.rows() != d || target.cols() != d) {
    throw std::invalid_argument("average_fidelity: target is " + std::to_string(target.rows()) + "x" +
                                std::to_string(target.cols()) + ", channel acts on d = " + std::to_string(d));
  }
  const auto& paulis = pauli_matrices(qubits_for(d));
  const Operator target_adj = target.adjoint();
  Complex sum = 0.0;
  for (const auto& p : paulis) {
    // tr(O P^dag O^dag e(P)); Pauli strings are Hermitian.
    sum += (target * p * target_adj * channel.apply(p)).trace();
  }
  const double dd = static_cast<double>(d) * d;
  if (std::abs(sum.imag()) > 1e-9 * std::max(1.0, std::abs(sum))) {
    throw NumericalError("average_fidelity: imaginary residue " + std::to_string(sum.imag()));
  }
  return FidelityResult{(sum.real() + dd) / (dd * (d + 1)), d, channel.t};
}

double conjugation_fidelity(const Operator& m, const Operator& target) {
  if (m.rows() != target.rows() || m.cols() != target.cols() || m.rows() != m.cols()) {
    throw std::invalid_argument("conjugation_fidelity: dimension mismatch");
  }
  const double d = static_cast<double>(m.rows());
  const Complex overlap = (target.adjoint() * m).trace();
  return (std::norm(overlap) + d) / (d * (d + 1.0));
}

ProcessMap apply_phase_frame(const ProcessMap& channel, const Ket& phases) {
  if (phases.size() != channel.d) throw std::invalid_argument("apply_phase_frame: phase vector size mismatch");
  const Operator diag = phases.asDiagonal();
  ProcessMap out = channel.then(ProcessMap::conjugation(diag));
  out.t = channel.t;
  return out;
}

ProcessMap depolarizing(int d, double p) {
  if (d < 1) throw std::invalid_argument("depolarizing: d must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing: p must lie in [0, 1]");
  ProcessMap out = ProcessMap::identity(d);
  out.superop *= (1.0 - p);
  // tr(rho) I / d: every diagonal input unit maps to I / d.
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) out.superop(i + d * i, k + d * k) += p / d;
  }
  return out;
}

double population(const Ket& psi, const Ket& label) {
  if (psi.size() != label.size()) throw std::invalid_argument("population: label dimension mismatch");
  return std::norm(label.dot(psi));
}

double population(const DensityMatrix& rho, const Ket& label) {
  if (rho.rows() != label.size() || rho.cols() != label.size()) {
    throw std::invalid_argument("population: label dimension mismatch");
  }
  return label.dot(rho * label).real();
}

FourQubitProbe probe_states(int n_qubits) {
  if (n_qubits < 2 || n_qubits > 4) throw std::invalid_argument("probe_states: n_qubits must be 2..4");
  const int d = 1 << n_qubits;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  FourQubitProbe probe;
  probe.psi_init = Ket::Constant(d, norm);
  probe.phi_target = Ket::Constant(d, norm);
  probe.psi_init(d - 2) = -norm;
  probe.phi_target(d - 1) = -norm;
  return probe;
}

}  // namespace rydgate
