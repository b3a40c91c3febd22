#include "rydgate/harmonic_operator.hpp"

#include <cmath>
#include <stdexcept>

namespace rydgate {

HarmonicOperator::HarmonicOperator(Operator static_part) : static_part_(std::move(static_part)) {
  if (static_part_.rows() != static_part_.cols()) {
    throw std::invalid_argument("HarmonicOperator: static part must be square");
  }
}

void HarmonicOperator::add_term(double frequency, const Operator& op) {
  if (op.rows() != dim() || op.cols() != dim()) {
    throw std::invalid_argument("HarmonicOperator::add_term: dimension mismatch");
  }
  if (frequency == 0.0) {
    static_part_ += op + op.adjoint();
    return;
  }
  for (auto& term : terms_) {
    if (term.frequency == frequency) {
      term.op += op;
      return;
    }
  }
  terms_.push_back({frequency, op});
}

double HarmonicOperator::max_frequency() const {
  double w = 0.0;
  for (const auto& term : terms_) w = std::max(w, std::abs(term.frequency));
  return w;
}

double HarmonicOperator::norm_bound() const {
  Eigen::VectorXd rows = static_part_.cwiseAbs().rowwise().sum();
  for (const auto& term : terms_) {
    rows += term.op.cwiseAbs().rowwise().sum();
    rows += term.op.cwiseAbs().colwise().sum().transpose();
  }
  return rows.size() == 0 ? 0.0 : rows.maxCoeff();
}

Operator HarmonicOperator::at(double t) const {
  Operator h = static_part_;
  for (const auto& term : terms_) {
    const Complex phase = std::exp(kI * (term.frequency * t));
    h += phase * term.op + std::conj(phase) * term.op.adjoint();
  }
  return h;
}

HarmonicOperator group_by_frequency(const Operator& op, const Eigen::MatrixXd& freq, double tol) {
  const int n = static_cast<int>(op.rows());
  HarmonicOperator out(Operator::Zero(n, n));
  std::vector<double> buckets;
  std::vector<Operator> parts;
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      if (op(a, b) == 0.0) continue;
      const double w = freq(a, b);
      if (std::abs(w) <= tol) {
        // Static element; the caller supplies only one triangle, so the
        // add_term fold (op + op^dagger) restores Hermiticity.
        Operator single = Operator::Zero(n, n);
        single(a, b) = op(a, b);
        out.add_term(0.0, single);
        continue;
      }
      std::size_t k = 0;
      while (k < buckets.size() && std::abs(buckets[k] - w) > tol) ++k;
      if (k == buckets.size()) {
        buckets.push_back(w);
        parts.push_back(Operator::Zero(n, n));
      }
      parts[k](a, b) += op(a, b);
    }
  }
  for (std::size_t k = 0; k < buckets.size(); ++k) out.add_term(buckets[k], parts[k]);
  return out;
}

}  // namespace rydgate
