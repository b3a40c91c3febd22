#pragma once

#include <vector>

#include "rydgate/quantum_core.hpp"

namespace rydgate {

struct HarmonicTerm {
  double frequency = 0.0;  // angular
  Operator op;
};

/// H(t) = H0 + sum_k ( e^{i w_k t} A_k + e^{-i w_k t} A_k^dagger ).
///
/// Hermitian for every t whenever H0 is. All Hamiltonians handed to the
/// integrators use this form; a static Hamiltonian simply has no terms.
class HarmonicOperator {
 public:
  HarmonicOperator() = default;
  explicit HarmonicOperator(Operator static_part);

  /// Adds e^{iwt} op + h.c. Terms with w == 0 are folded into H0.
  void add_term(double frequency, const Operator& op);

  int dim() const { return static_cast<int>(static_part_.rows()); }
  const Operator& static_part() const { return static_part_; }
  const std::vector<HarmonicTerm>& terms() const { return terms_; }

  /// Largest |w| among terms, 0 if static.
  double max_frequency() const;
  /// Upper bound on ||H(t)|| (max row sum) valid for all t.
  double norm_bound() const;

  Operator at(double t) const;

 private:
  Operator static_part_;
  std::vector<HarmonicTerm> terms_;
};

/// Groups matrix elements by frequency: element (a, b) of `op` oscillates as
/// e^{i freq(a, b) t}. Returns a HarmonicOperator whose value at t equals
/// sum_ab op(a,b) e^{i freq(a,b) t} |a><b| + h.c. (lower/upper both allowed).
/// Frequencies closer than `tol` are merged.
HarmonicOperator group_by_frequency(const Operator& op, const Eigen::MatrixXd& freq, double tol);

}  // namespace rydgate
