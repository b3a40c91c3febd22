#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rydgate/dynamics.hpp"
#include "rydgate/errors.hpp"
#include "rydgate/metrics.hpp"
#include "test_models.hpp"

using namespace rydgate;

namespace {

// A -> tr(A) I / d.
ProcessMap replacement(int d) { return depolarizing(d, 1.0); }

double closed_form_unitary_fidelity(const Operator& v, const Operator& o) {
  const double d = static_cast<double>(v.rows());
  return (std::norm((o.adjoint() * v).trace()) + d) / (d * (d + 1.0));
}

}  // namespace

TEST(AverageFidelity, IdealChannel) {
  const Operator g = ideal_gate(3);
  const auto r = average_fidelity(ProcessMap::conjugation(g, 2.5), g);
  EXPECT_NEAR(r.fbar, 1.0, 1e-12);
  EXPECT_EQ(r.d, 8);
  EXPECT_DOUBLE_EQ(r.t_gate, 2.5);
  EXPECT_NEAR(average_fidelity(ProcessMap::identity(16), Operator::Identity(16, 16)).fbar, 1.0, 1e-12);
}

TEST(AverageFidelity, ReplacementChannel) {
  EXPECT_NEAR(average_fidelity(replacement(8), ideal_gate(3)).fbar, 0.125, 1e-10);
  EXPECT_NEAR(average_fidelity(replacement(16), ideal_gate(4)).fbar, 1.0 / 16.0, 1e-10);
}

TEST(AverageFidelity, RandomUnitariesMatchClosedForm) {
  std::mt19937 rng(2024);
  const Operator o = ideal_gate(3);
  for (int k = 0; k < 20; ++k) {
    const Operator v = fixtures::random_unitary(8, rng);
    const double expected = closed_form_unitary_fidelity(v, o);
    EXPECT_NEAR(average_fidelity(ProcessMap::conjugation(v), o).fbar, expected, 1e-10);
    EXPECT_NEAR(conjugation_fidelity(v, o), expected, 1e-12);
  }
}

TEST(AverageFidelity, NonUnitaryConjugation) {
  std::mt19937 rng(17);
  const Operator m = 0.3 * fixtures::random_matrix(8, rng);
  const Operator o = ideal_gate(3);
  EXPECT_NEAR(average_fidelity(ProcessMap::conjugation(m), o).fbar, conjugation_fidelity(m, o), 1e-12);
}

TEST(AverageFidelity, DimensionErrors) {
  EXPECT_THROW(average_fidelity(ProcessMap::identity(8), Operator::Identity(4, 4)), std::invalid_argument);
  EXPECT_THROW(average_fidelity(ProcessMap::identity(6), Operator::Identity(6, 6)), std::invalid_argument);
  EXPECT_THROW(conjugation_fidelity(Operator::Identity(4, 4), Operator::Identity(8, 8)), std::invalid_argument);
}

TEST(AverageFidelity, RejectsComplexResidue) {
  // i * identity is not Hermiticity preserving; the Pauli sum picks up an
  // imaginary part.
  ProcessMap bad = ProcessMap::identity(8);
  bad.superop *= kI;
  EXPECT_THROW(average_fidelity(bad, ideal_gate(3)), NumericalError);
}

TEST(AverageFidelity, DepolarizingNeverHelps) {
  std::mt19937 rng(4);
  const Operator o = ideal_gate(3);
  // Slightly imperfect gate: ideal followed by a small random unitary.
  Operator h = fixtures::random_hermitian(8, rng);
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const Operator kick =
      es.eigenvectors() * (kI * 0.05 * es.eigenvalues().cast<Complex>()).array().exp().matrix().asDiagonal() *
      es.eigenvectors().adjoint();
  const ProcessMap channel = ProcessMap::conjugation(kick * o);
  double previous = average_fidelity(channel, o).fbar;
  for (double p : {0.01, 0.05, 0.2}) {
    const double f = average_fidelity(channel.then(depolarizing(8, p)), o).fbar;
    EXPECT_LT(f, previous);
    previous = f;
  }
  EXPECT_THROW(depolarizing(8, 1.5), std::invalid_argument);
}

TEST(AverageFidelity, PhaseFrame) {
  const Operator o = ideal_gate(3);
  Ket phases = Ket::Ones(8);
  phases(0) = std::exp(kI * 0.4);
  const ProcessMap channel = ProcessMap::conjugation(phases.conjugate().asDiagonal() * o);
  EXPECT_LT(average_fidelity(channel, o).fbar, 1.0 - 1e-3);
  EXPECT_NEAR(average_fidelity(apply_phase_frame(channel, phases), o).fbar, 1.0, 1e-12);
  EXPECT_THROW(apply_phase_frame(channel, Ket::Ones(4)), std::invalid_argument);
}

TEST(Population, ProbeStates) {
  const auto probe = probe_states(4);
  EXPECT_NEAR(probe.psi_init.norm(), 1.0, 1e-15);
  EXPECT_NEAR(probe.phi_target.norm(), 1.0, 1e-15);
  EXPECT_NEAR(probe.phi_target.dot(probe.psi_init).real(), 0.75, 1e-15);
  EXPECT_NEAR(population(probe.psi_init, probe.phi_target), 0.5625, 1e-15);
  EXPECT_NEAR(population(probe.psi_init, probe.psi_init), 1.0, 1e-15);
  EXPECT_EQ(probe.psi_init(14), Complex(-0.25));
  EXPECT_EQ(probe.phi_target(15), Complex(-0.25));

  const DensityMatrix rho = probe.psi_init * probe.psi_init.adjoint();
  EXPECT_NEAR(population(rho, probe.phi_target), 0.5625, 1e-15);
  EXPECT_THROW(population(probe.psi_init, Ket::Ones(8)), std::invalid_argument);
  // The ideal gate maps the probe onto its target exactly.
  EXPECT_NEAR(population(Ket(ideal_gate(4) * probe.psi_init), probe.phi_target), 1.0, 1e-15);
}

TEST(AverageFidelity, GateWithoutDecayPreservesIdentity) {
  const auto m = fixtures::urp_model(0.05);
  const auto map = computational_subspace(m.space);
  const double t = gate_time(0.05, -0.05);
  const ProcessMap channel = extract_channel(full_hamiltonian(m), {}, map, t);
  const Operator o = ideal_gate(3);
  const Operator image = channel.apply(Operator::Identity(8, 8));
  // Population left in Rydberg states at t_gate makes the map slightly
  // trace-decreasing; it never creates trace.
  EXPECT_TRUE(image.isApprox(image.adjoint(), 1e-12));
  EXPECT_LE((image - Operator::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-2);
  const double trace = image.trace().real();
  EXPECT_LE(trace, 8.0 + 1e-9);
  EXPECT_GE(trace, 8.0 - 0.05);
  const auto f = average_fidelity(apply_phase_frame(channel, light_shift_correction(m, t)), o);
  EXPECT_NEAR(f.fbar, 0.9972, 0.003);
}
