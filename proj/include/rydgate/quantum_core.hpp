#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rydgate {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Per-atom level index. The order is fixed across the library.
enum class Level : int { kZero = 0, kOne = 1, kRydberg = 2, kLeak = 3 };

/// Tensor-product space of `n_atoms` identical atoms with `n_levels` each.
/// Atom 0 is the leftmost (most significant) tensor factor, so the ket
/// |a0 a1 a2> has index a0*L^2 + a1*L + a2.
class HilbertSpace {
 public:
  HilbertSpace(int n_atoms, int n_levels);

  int n_atoms() const { return n_atoms_; }
  int n_levels() const { return n_levels_; }
  int dim() const { return dim_; }
  bool has_leakage() const { return n_levels_ > 3; }

  int index(std::span<const int> levels) const;
  std::vector<int> levels(int index) const;
  int level_of(int index, int atom) const;

  /// Parses a ket label such as "11r" or "0d1" (characters 0, 1, r, d).
  int index_of(std::string_view label) const;
  std::string label_of(int index) const;

  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

 private:
  int n_atoms_;
  int n_levels_;
  int dim_;
  std::vector<int> strides_;
};

/// Three-level atoms, or four-level when the leakage state |d> is present.
/// Only 3- and 4-atom registers are supported here.
HilbertSpace build_space(int n_atoms, bool with_leakage);

/// |a><b| on `atom`, identity on every other atom.
Operator transition_op(const HilbertSpace& space, int atom, int a, int b);
Operator transition_op(const HilbertSpace& space, int atom, Level a, Level b);

Ket basis_ket(const HilbertSpace& space, std::string_view label);

/// Full-space indices of the 2^n states with every atom in |0> or |1>,
/// in increasing order (which equals binary order of the qubit labels).
struct CompSubspaceMap {
  int full_dim = 0;
  int n_qubits = 0;
  std::vector<int> indices;

  int size() const { return static_cast<int>(indices.size()); }
};

CompSubspaceMap computational_subspace(const HilbertSpace& space);

Operator embed_comp(const Operator& op_small, const CompSubspaceMap& map);
Operator project_comp(const Operator& op_full, const CompSubspaceMap& map);
Ket embed_ket(const Ket& small, const CompSubspaceMap& map);
Ket project_ket(const Ket& full, const CompSubspaceMap& map);

enum class Pauli : std::uint8_t { kI = 0, kX = 1, kY = 2, kZ = 3 };

struct PauliString {
  std::vector<Pauli> labels;  // qubit 0 first

  std::string name() const;
  Operator matrix() const;
};

/// All 4^n strings in lexicographic order I < X < Y < Z with qubit 0 the
/// most significant digit; element 0 is the identity.
std::vector<PauliString> pauli_basis(int n_qubits);

/// Matrices of pauli_basis(n), cached per n.
const std::vector<Operator>& pauli_matrices(int n_qubits);

bool is_hermitian(const Operator& op, double rel_tol = 1e-12);

}  // namespace rydgate
