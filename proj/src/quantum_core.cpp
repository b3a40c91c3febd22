#include "rydgate/quantum_core.hpp"

#include <array>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rydgate {

HilbertSpace::HilbertSpace(int n_atoms, int n_levels)
    : n_atoms_(n_atoms), n_levels_(n_levels), dim_(1) {
  if (n_atoms < 1 || n_atoms > 4) {
    throw std::invalid_argument("HilbertSpace: atom count must be in [1, 4]");
  }
  if (n_levels < 2 || n_levels > 4) {
    throw std::invalid_argument("HilbertSpace: level count must be in [2, 4]");
  }
  strides_.assign(n_atoms, 1);
  for (int a = n_atoms - 1; a >= 0; --a) {
    strides_[a] = dim_;
    dim_ *= n_levels;
  }
}

int HilbertSpace::index(std::span<const int> levels) const {
  if (static_cast<int>(levels.size()) != n_atoms_) {
    throw std::invalid_argument("HilbertSpace::index: wrong number of levels");
  }
  int idx = 0;
  for (int a = 0; a < n_atoms_; ++a) {
    if (levels[a] < 0 || levels[a] >= n_levels_) {
      throw std::out_of_range("HilbertSpace::index: level out of range");
    }
    idx += levels[a] * strides_[a];
  }
  return idx;
}

std::vector<int> HilbertSpace::levels(int index) const {
  std::vector<int> out(n_atoms_);
  for (int a = 0; a < n_atoms_; ++a) out[a] = level_of(index, a);
  return out;
}

int HilbertSpace::level_of(int index, int atom) const {
  if (index < 0 || index >= dim_) throw std::out_of_range("HilbertSpace: index out of range");
  if (atom < 0 || atom >= n_atoms_) throw std::out_of_range("HilbertSpace: atom out of range");
  return (index / strides_[atom]) % n_levels_;
}

namespace {

int level_from_char(char c) {
  switch (c) {
    case '0': return 0;
    case '1': return 1;
    case 'r': case 'R': return 2;
    case 'd': case 'D': return 3;
    default: return -1;
  }
}

constexpr std::array<char, 4> kLevelChars{'0', '1', 'r', 'd'};

}  // namespace

int HilbertSpace::index_of(std::string_view label) const {
  if (static_cast<int>(label.size()) != n_atoms_) {
    throw std::invalid_argument("ket label '" + std::string(label) + "' has wrong length");
  }
  std::vector<int> lv(n_atoms_);
  for (int a = 0; a < n_atoms_; ++a) {
    lv[a] = level_from_char(label[a]);
    if (lv[a] < 0 || lv[a] >= n_levels_) {
      throw std::invalid_argument("ket label '" + std::string(label) + "' has an invalid level");
    }
  }
  return index(lv);
}

std::string HilbertSpace::label_of(int index) const {
  std::string s(n_atoms_, '0');
  for (int a = 0; a < n_atoms_; ++a) s[a] = kLevelChars[level_of(index, a)];
  return s;
}

HilbertSpace build_space(int n_atoms, bool with_leakage) {
  if (n_atoms != 3 && n_atoms != 4) {
    throw std::invalid_argument("build_space: only 3- or 4-atom registers are supported");
  }
  return HilbertSpace(n_atoms, with_leakage ? 4 : 3);
}

Operator transition_op(const HilbertSpace& space, int atom, int a, int b) {
  if (atom < 0 || atom >= space.n_atoms()) throw std::out_of_range("transition_op: atom out of range");
  if (a < 0 || a >= space.n_levels() || b < 0 || b >= space.n_levels()) {
    throw std::out_of_range("transition_op: level out of range");
  }
  Operator op = Operator::Zero(space.dim(), space.dim());
  for (int col = 0; col < space.dim(); ++col) {
    auto lv = space.levels(col);
    if (lv[atom] != b) continue;
    lv[atom] = a;
    op(space.index(lv), col) = 1.0;
  }
  return op;
}

Operator transition_op(const HilbertSpace& space, int atom, Level a, Level b) {
  return transition_op(space, atom, static_cast<int>(a), static_cast<int>(b));
}

Ket basis_ket(const HilbertSpace& space, std::string_view label) {
  Ket k = Ket::Zero(space.dim());
  k(space.index_of(label)) = 1.0;
  return k;
}

CompSubspaceMap computational_subspace(const HilbertSpace& space) {
  CompSubspaceMap map;
  map.full_dim = space.dim();
  map.n_qubits = space.n_atoms();
  for (int i = 0; i < space.dim(); ++i) {
    bool comp = true;
    for (int a = 0; a < space.n_atoms() && comp; ++a) comp = space.level_of(i, a) <= 1;
    if (comp) map.indices.push_back(i);
  }
  return map;
}

Operator embed_comp(const Operator& op_small, const CompSubspaceMap& map) {
  const int n = map.size();
  if (op_small.rows() != n || op_small.cols() != n) {
    throw std::invalid_argument("embed_comp: operator dimension does not match subspace map");
  }
  Operator full = Operator::Zero(map.full_dim, map.full_dim);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) full(map.indices[i], map.indices[j]) = op_small(i, j);
  }
  return full;
}

Operator project_comp(const Operator& op_full, const CompSubspaceMap& map) {
  if (op_full.rows() != map.full_dim || op_full.cols() != map.full_dim) {
    throw std::invalid_argument("project_comp: operator does not live on the mapped space");
  }
  const int n = map.size();
  Operator small(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) small(i, j) = op_full(map.indices[i], map.indices[j]);
  }
  return small;
}

Ket embed_ket(const Ket& small, const CompSubspaceMap& map) {
  if (small.size() != map.size()) throw std::invalid_argument("embed_ket: dimension mismatch");
  Ket full = Ket::Zero(map.full_dim);
  for (int i = 0; i < map.size(); ++i) full(map.indices[i]) = small(i);
  return full;
}

Ket project_ket(const Ket& full, const CompSubspaceMap& map) {
  if (full.size() != map.full_dim) throw std::invalid_argument("project_ket: dimension mismatch");
  Ket small(map.size());
  for (int i = 0; i < map.size(); ++i) small(i) = full(map.indices[i]);
  return small;
}

std::string PauliString::name() const {
  static constexpr std::array<char, 4> kChars{'I', 'X', 'Y', 'Z'};
  std::string s;
  s.reserve(labels.size());
  for (Pauli p : labels) s.push_back(kChars[static_cast<int>(p)]);
  return s;
}

Operator PauliString::matrix() const {
  static const std::array<Eigen::Matrix2cd, 4> kSingle = [] {
    std::array<Eigen::Matrix2cd, 4> m;
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, -kI, kI, 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  const int n = static_cast<int>(labels.size());
  const int d = 1 << n;
  Operator out(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      Complex v = 1.0;
      for (int q = 0; q < n && v != 0.0; ++q) {
        const int bit = n - 1 - q;
        v *= kSingle[static_cast<int>(labels[q])]((r >> bit) & 1, (c >> bit) & 1);
      }
      out(r, c) = v;
    }
  }
  return out;
}

std::vector<PauliString> pauli_basis(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 4) throw std::invalid_argument("pauli_basis: qubit count must be in [1, 4]");
  const int count = 1 << (2 * n_qubits);
  std::vector<PauliString> basis(count);
  for (int k = 0; k < count; ++k) {
    basis[k].labels.resize(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
      basis[k].labels[q] = static_cast<Pauli>((k >> (2 * (n_qubits - 1 - q))) & 3);
    }
  }
  return basis;
}

const std::vector<Operator>& pauli_matrices(int n_qubits) {
  static std::mutex mutex;
  static std::map<int, std::vector<Operator>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n_qubits);
  if (it == cache.end()) {
    std::vector<Operator> mats;
    for (const auto& p : pauli_basis(n_qubits)) mats.push_back(p.matrix());
    it = cache.emplace(n_qubits, std::move(mats)).first;
  }
  return it->second;
}

bool is_hermitian(const Operator& op, double rel_tol) {
  if (op.rows() != op.cols()) return false;
  const double scale = std::max(op.cwiseAbs().maxCoeff(), 1e-300);
  return (op - op.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

}  // namespace rydgate
