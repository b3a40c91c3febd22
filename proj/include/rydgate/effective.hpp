#pragma once

#include <span>
#include <string>
#include <vector>

#include "rydgate/model.hpp"
#include "rydgate/quantum_core.hpp"

namespace rydgate {

/// Eigenpairs of the strong control-coupling block among {|00r>, |r0r>, |0rr>}
/// (the |rrr> coupling dropped, i.e. U12 >> Omega').
///
/// Ordered (+, 0, -). Phases are fixed so that the |00r> component of
/// Phi_+ and Phi_- is positive and the |r0r> component of Phi_0 is positive.
struct DressedSpectrum {
  Eigen::Vector3d eigenvalues;
  Eigen::Matrix3d eigenvectors;  // columns, basis order {00r, r0r, 0rr}

  double lambda_plus() const { return eigenvalues(0); }
  double lambda_zero() const { return eigenvalues(1); }
  double lambda_minus() const { return eigenvalues(2); }
  Eigen::Vector3d phi_plus() const { return eigenvectors.col(0); }
  Eigen::Vector3d phi_zero() const { return eigenvectors.col(1); }
  Eigen::Vector3d phi_minus() const { return eigenvectors.col(2); }
};

DressedSpectrum dressed_states(double omega_prime);
/// Unequal control drives: |00r> couples to |r0r> with omega_a and to |0rr> with omega_b.
DressedSpectrum dressed_states(double omega_a, double omega_b);

/// Partition H = H_e + V_+ + V_- of a static Hamiltonian into an excited
/// manifold and a weakly coupled ground manifold.
struct EffectiveBlock {
  Operator h_e;      // n_e x n_e
  Operator v_minus;  // n_g x n_e, excited -> ground
  Operator v_plus;   // n_e x n_g, adjoint of v_minus
  double reg_eps = 0.0;
};

EffectiveBlock make_effective_block(Operator h_e, Operator v_minus, double reg_eps);

/// Cuts a block out of a static Hamiltonian given ground and excited index lists.
EffectiveBlock partition_block(const Operator& h, std::span<const int> ground,
                               std::span<const int> excited, double reg_eps);

/// Time-independent form of RWA block 1 (e^{-i U12 t} -> 1, U12 on |rrr>).
Operator block_one_static(const SystemModel& model);

/// Default regularization scale relative to Omega'.
inline constexpr double kDefaultRegEps = 1e-7;

/// Block 1 split into ground {000, 001} and excited {00r, r0r, 0rr, rrr}.
EffectiveBlock block_one_partition(const SystemModel& model, double reg_eps);

/// -[V_- H_e^{-1} V_+ + V_- (H_e^{-1})^dagger V_+] / 2.
///
/// Zero diagonal entries of H_e are replaced by i*reg_eps before inversion.
/// The imaginary shift enters the symmetrized result only at second order,
/// so the output converges quadratically as reg_eps -> 0. Throws
/// NumericalError if H_e stays singular.
Operator effective_hamiltonian(const EffectiveBlock& block);

/// ||V_-|| over the smallest nonzero singular value of the unregularized
/// H_e; values well below 1 mean the second-order reduction is valid.
double weak_coupling_ratio(const EffectiveBlock& block);

}  // namespace rydgate
