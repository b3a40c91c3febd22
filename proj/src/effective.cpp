#include "rydgate/effective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "rydgate/errors.hpp"

namespace rydgate {

DressedSpectrum dressed_states(double omega_prime) { return dressed_states(omega_prime, omega_prime); }

DressedSpectrum dressed_states(double omega_a, double omega_b) {
  if (!(omega_a > 0.0) || !(omega_b > 0.0)) {
    throw std::invalid_argument("dressed_states: control Rabi frequencies must be positive");
  }
  Eigen::Matrix3d h;
  h << 0.0, omega_a, omega_b,
       omega_a, 0.0, 0.0,
       omega_b, 0.0, 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(h);
  // Ascending (-, 0, +); reverse to (+, 0, -).
  DressedSpectrum out;
  for (int k = 0; k < 3; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(2 - k);
    out.eigenvectors.col(k) = solver.eigenvectors().col(2 - k);
  }
  for (int k : {0, 2}) {
    if (out.eigenvectors(0, k) < 0.0) out.eigenvectors.col(k) *= -1.0;
  }
  if (out.eigenvectors(1, 1) < 0.0) out.eigenvectors.col(1) *= -1.0;
  return out;
}

EffectiveBlock make_effective_block(Operator h_e, Operator v_minus, double reg_eps) {
  if (h_e.rows() != h_e.cols()) throw std::invalid_argument("EffectiveBlock: h_e must be square");
  if (v_minus.cols() != h_e.rows()) throw std::invalid_argument("EffectiveBlock: v_minus columns must match h_e");
  if (!is_hermitian(h_e)) throw std::invalid_argument("EffectiveBlock: h_e must be Hermitian");
  if (!(reg_eps > 0.0)) throw std::invalid_argument("EffectiveBlock: reg_eps must be positive");
  EffectiveBlock block;
  block.v_plus = v_minus.adjoint();
  block.h_e = std::move(h_e);
  block.v_minus = std::move(v_minus);
  block.reg_eps = reg_eps;
  return block;
}

EffectiveBlock partition_block(const Operator& h, std::span<const int> ground,
                               std::span<const int> excited, double reg_eps) {
  const auto ng = static_cast<int>(ground.size());
  const auto ne = static_cast<int>(excited.size());
  Operator h_e(ne, ne);
  Operator v_minus(ng, ne);
  for (int j = 0; j < ne; ++j) {
    for (int i = 0; i < ne; ++i) h_e(i, j) = h(excited[i], excited[j]);
    for (int i = 0; i < ng; ++i) v_minus(i, j) = h(ground[i], excited[j]);
  }
  return make_effective_block(std::move(h_e), std::move(v_minus), reg_eps);
}

Operator block_one_static(const SystemModel& model) {
  if (model.space.n_atoms() != 3) throw std::invalid_argument("block_one_static: requires three atoms");
  const HarmonicOperator block = hamiltonian_block(model, 1);
  Operator h = block.static_part();
  for (const auto& term : block.terms()) h += term.op + term.op.adjoint();
  h(model.space.index_of("rrr"), model.space.index_of("rrr")) += model.interactions.u(0, 1);
  return h;
}

EffectiveBlock block_one_partition(const SystemModel& model, double reg_eps) {
  const Operator h = block_one_static(model);
  const auto& s = model.space;
  const std::vector<int> ground{s.index_of("000"), s.index_of("001")};
  const std::vector<int> excited{s.index_of("00r"), s.index_of("r0r"), s.index_of("0rr"), s.index_of("rrr")};
  return partition_block(h, ground, excited, reg_eps);
}

Operator effective_hamiltonian(const EffectiveBlock& block) {
  const int ng = static_cast<int>(block.v_minus.rows());
  if (block.v_minus.isZero(0.0)) return Operator::Zero(ng, ng);

  Operator h = block.h_e;
  const double scale = std::max(h.cwiseAbs().maxCoeff(), block.reg_eps);
  for (int i = 0; i < h.rows(); ++i) {
    if (std::abs(h(i, i)) <= 1e-14 * scale) h(i, i) = kI * block.reg_eps;
  }
  Eigen::FullPivLU<Operator> lu(h);
  lu.setThreshold(1e-15);
  if (!lu.isInvertible()) throw NumericalError("effective_hamiltonian: H_e is singular after regularization");
  // V_- (H^-1)^dag V_+ is the adjoint of V_- H^-1 V_+ because V_+ = V_-^dag.
  const Operator forward = block.v_minus * lu.solve(block.v_plus);
  return -0.5 * (forward + forward.adjoint());
}

double weak_coupling_ratio(const EffectiveBlock& block) {
  Eigen::JacobiSVD<Operator> svd(block.h_e);
  const auto& sv = svd.singularValues();
  double smallest = 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-12 * sv(0)) smallest = sv(i);
  }
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Operator> vsvd(block.v_minus);
  return vsvd.singularValues()(0) / smallest;
}

}  // namespace rydgate
