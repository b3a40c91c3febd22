#include "rydgate/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "rydgate/errors.hpp"

namespace rydgate {

namespace {

constexpr double kPatternTol = 0.0;

// H(t) + diag(extra) in compressed-row form; values are refreshed in place.
class CompiledOperator {
 public:
  CompiledOperator(const HarmonicOperator& h, const Eigen::VectorXcd& extra_diag) : dim_(h.dim()) {
    Eigen::MatrixXd mask = h.static_part().cwiseAbs();
    for (const auto& term : h.terms()) mask += term.op.cwiseAbs() + term.op.adjoint().cwiseAbs();
    mask.diagonal() += extra_diag.cwiseAbs();

    row_start_.push_back(0);
    for (int r = 0; r < dim_; ++r) {
      for (int c = 0; c < dim_; ++c) {
        if (mask(r, c) > kPatternTol) col_.push_back(c);
      }
      row_start_.push_back(static_cast<int>(col_.size()));
    }
    const std::size_t nnz = col_.size();
    base_.resize(nnz);
    values_.resize(nnz);
    for (const auto& term : h.terms()) {
      freqs_.push_back(term.frequency);
      up_.emplace_back(nnz);
      down_.emplace_back(nnz);
    }
    for (int r = 0; r < dim_; ++r) {
      for (int idx = row_start_[r]; idx < row_start_[r + 1]; ++idx) {
        const int c = col_[idx];
        base_[idx] = h.static_part()(r, c) + (r == c ? extra_diag(r) : Complex(0.0, 0.0));
        for (std::size_t k = 0; k < freqs_.size(); ++k) {
          up_[k][idx] = h.terms()[k].op(r, c);
          down_[k][idx] = std::conj(h.terms()[k].op(c, r));
        }
      }
    }
  }

  void refresh(double t) {
    if (t == last_t_) return;
    const std::size_t nnz = base_.size();
    for (std::size_t i = 0; i < nnz; ++i) values_[i] = base_[i];
    for (std::size_t k = 0; k < freqs_.size(); ++k) {
      const Complex ph = std::polar(1.0, freqs_[k] * t);
      const Complex phc = std::conj(ph);
      const auto& up = up_[k];
      const auto& down = down_[k];
      for (std::size_t i = 0; i < nnz; ++i) values_[i] += ph * up[i] + phc * down[i];
    }
    last_t_ = t;
  }

  // y = scale * A x (overwrite) for column-major x with any number of columns.
  void multiply_left(const StateMatrix& x, StateMatrix& y, Complex scale) const {
    const auto cols = x.cols();
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Complex* xc = x.col(j).data();
      Complex* yc = y.col(j).data();
      for (int r = 0; r < dim_; ++r) {
        Complex acc = 0.0;
        for (int idx = row_start_[r]; idx < row_start_[r + 1]; ++idx) acc += values_[idx] * xc[col_[idx]];
        yc[r] = scale * acc;
      }
    }
  }

  // y += scale * x A^dag for square x.
  void add_multiply_right_adjoint(const StateMatrix& x, StateMatrix& y, Complex scale) const {
    for (int r = 0; r < dim_; ++r) {
      auto yc = y.col(r);
      for (int idx = row_start_[r]; idx < row_start_[r + 1]; ++idx) {
        yc += (scale * std::conj(values_[idx])) * x.col(col_[idx]);
      }
    }
  }

 private:
  int dim_;
  std::vector<int> row_start_;
  std::vector<int> col_;
  std::vector<Complex> base_;
  std::vector<Complex> values_;
  std::vector<double> freqs_;
  std::vector<std::vector<Complex>> up_;
  std::vector<std::vector<Complex>> down_;
  double last_t_ = std::numeric_limits<double>::quiet_NaN();
};

struct JumpEntry {
  int row;
  int col;
  Complex value;
};

// Nonzero entries of a jump operator, with its rate folded in as sqrt(rate).
std::vector<JumpEntry> jump_entries(const JumpOperator& j) {
  std::vector<JumpEntry> out;
  const double s = std::sqrt(j.rate);
  for (int c = 0; c < j.op.cols(); ++c) {
    for (int r = 0; r < j.op.rows(); ++r) {
      if (j.op(r, c) != Complex(0.0, 0.0)) out.push_back({r, c, s * j.op(r, c)});
    }
  }
  return out;
}

double total_rate(std::span<const JumpOperator> jumps) {
  double sum = 0.0;
  for (const auto& j : jumps) sum += j.rate;
  return sum;
}

bool any_decay(std::span<const JumpOperator> jumps) {
  for (const auto& j : jumps) {
    if (j.rate > 0.0) return true;
  }
  return false;
}

// dX = -i (K X - X K^dag) + sum_L L X L^dag with K = H - (i/2) sum_L L^dag L.
class LindbladPropagator {
 public:
  LindbladPropagator(const HarmonicOperator& h, std::span<const JumpOperator> jumps) {
    const int dim = h.dim();
    Eigen::VectorXcd anti = Eigen::VectorXcd::Zero(dim);
    for (const auto& j : jumps) {
      if (j.op.rows() != dim || j.op.cols() != dim) throw std::invalid_argument("jump operator dimension mismatch");
      if (!(j.rate >= 0.0)) throw std::invalid_argument("jump rates must be non-negative");
      if (j.rate == 0.0) continue;
      const Operator ldl = j.op.adjoint() * j.op;
      if (!ldl.isDiagonal(1e-14)) throw std::invalid_argument("jump operators must have diagonal L^dag L");
      anti += (-0.5 * kI * j.rate) * ldl.diagonal();
      jumps_.push_back(jump_entries(j));
    }
    k_ = std::make_unique<CompiledOperator>(h, anti);
  }

  void rhs(double t, const StateMatrix& x, StateMatrix& dx) {
    dx.resize(x.rows(), x.cols());
    k_->refresh(t);
    k_->multiply_left(x, dx, -kI);
    k_->add_multiply_right_adjoint(x, dx, kI);
    for (const auto& entries : jumps_) {
      for (const auto& a : entries) {
        for (const auto& b : entries) dx(a.row, b.row) += a.value * std::conj(b.value) * x(a.col, b.col);
      }
    }
  }

 private:
  std::unique_ptr<CompiledOperator> k_;
  std::vector<std::vector<JumpEntry>> jumps_;
};

RhsFunction ket_rhs(CompiledOperator& op) {
  return [&op](double t, const StateMatrix& x, StateMatrix& dx) {
    dx.resize(x.rows(), x.cols());
    op.refresh(t);
    op.multiply_left(x, dx, -kI);
  };
}

double finite_step(double dt, double t_final) {
  if (std::isfinite(dt)) return dt;
  return t_final > 0.0 ? t_final : 1.0;
}

Operator project_matrix(const Operator& full, const CompSubspaceMap& map) {
  const int d = static_cast<int>(map.indices.size());
  Operator out(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) out(i, j) = full(map.indices[i], map.indices[j]);
  }
  return out;
}

Operator project_rows(const Eigen::MatrixXcd& full, const CompSubspaceMap& map) {
  const int d = static_cast<int>(map.indices.size());
  Operator out(d, full.cols());
  for (int i = 0; i < d; ++i) out.row(i) = full.row(map.indices[i]);
  return out;
}

void check_map(const HarmonicOperator& h, const CompSubspaceMap& map) {
  if (map.full_dim != h.dim()) throw std::invalid_argument("computational map does not match Hamiltonian dimension");
}

template <typename Task>
void run_parallel(int n_tasks, int threads, Task&& task) {
  const int workers = std::max(1, std::min(threads, n_tasks));
  if (workers == 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n_tasks; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double gate_time(double omega1, double omega2) {
  const double w = std::hypot(omega1, omega2);
  if (!(w > 0.0)) throw std::invalid_argument("gate_time: omega1 and omega2 both vanish");
  return std::numbers::pi / w;
}

std::vector<double> EvolutionResult::population_trace(int index) const {
  std::vector<double> out;
  if (!kets.empty()) {
    for (const auto& k : kets) out.push_back(std::norm(k(index)));
  } else {
    for (const auto& r : densities) out.push_back(r(index, index).real());
  }
  return out;
}

double resolve_step(const HarmonicOperator& h, const IntegratorConfig& cfg, double decay_rate) {
  if (cfg.dt > 0.0) {
    if (cfg.method == IntegratorMethod::kRk4) check_fixed_step(h, cfg.dt, decay_rate);
    return cfg.dt;
  }
  if (cfg.dt < 0.0) throw std::invalid_argument("integrator: dt must be non-negative");
  return auto_step(h, cfg, decay_rate);
}

EvolutionResult evolve_ket(const HarmonicOperator& h, const Ket& psi0, double t_final, const IntegratorConfig& cfg) {
  if (psi0.size() != h.dim()) throw std::invalid_argument("evolve_ket: state dimension mismatch");
  CompiledOperator op(h, Eigen::VectorXcd::Zero(h.dim()));
  StateMatrix x = psi0;
  const double norm0 = psi0.squaredNorm();
  EvolutionResult result;
  const auto observer = [&](double t, const StateMatrix& s) {
    result.times.push_back(t);
    result.kets.emplace_back(s.col(0));
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(s.col(0).squaredNorm() - norm0));
  };
  const double dt = finite_step(resolve_step(h, cfg), t_final);
  result.steps = integrate(ket_rhs(op), x, t_final, dt, cfg, observer).steps;
  return result;
}

Eigen::MatrixXcd evolve_kets(const HarmonicOperator& h, const Eigen::MatrixXcd& psi0, double t_final,
                             const IntegratorConfig& cfg) {
  if (psi0.rows() != h.dim()) throw std::invalid_argument("evolve_kets: state dimension mismatch");
  CompiledOperator op(h, Eigen::VectorXcd::Zero(h.dim()));
  StateMatrix x = psi0;
  IntegratorConfig quiet = cfg;
  quiet.store_every = 0;
  integrate(ket_rhs(op), x, t_final, finite_step(resolve_step(h, cfg), t_final), quiet, {});
  return x;
}

EvolutionResult evolve_density(const HarmonicOperator& h, std::span<const JumpOperator> jumps,
                               const DensityMatrix& rho0, double t_final, const IntegratorConfig& cfg) {
  if (rho0.rows() != h.dim() || rho0.cols() != h.dim()) throw std::invalid_argument("evolve_density: dimension mismatch");
  LindbladPropagator prop(h, jumps);
  StateMatrix x = rho0;
  const Complex trace0 = rho0.trace();
  const bool hermitian = is_hermitian(rho0);
  EvolutionResult result;
  const auto observer = [&](double t, const StateMatrix& s) {
    result.times.push_back(t);
    result.densities.push_back(s);
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(s.trace() - trace0));
  };
  PostStepFunction post;
  if (hermitian) {
    post = [](StateMatrix& s) { s = (0.5 * (s + s.adjoint())).eval(); };
  }
  const double rate = total_rate(jumps);
  const double dt = finite_step(resolve_step(h, cfg, rate), t_final);
  const RhsFunction rhs = [&prop](double t, const StateMatrix& s, StateMatrix& ds) { prop.rhs(t, s, ds); };
  result.steps = integrate(rhs, x, t_final, dt, cfg, observer, post).steps;
  return result;
}

Operator ProcessMap::apply(const Operator& a) const {
  if (a.rows() != d || a.cols() != d) throw std::invalid_argument("ProcessMap::apply: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXcd> in(a.data(), static_cast<Eigen::Index>(d) * d);
  const Eigen::VectorXcd out = superop * in;
  return Eigen::Map<const Operator>(out.data(), d, d);
}

ProcessMap ProcessMap::identity(int d) {
  return ProcessMap{Operator::Identity(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d), d, 0.0};
}

ProcessMap ProcessMap::conjugation(const Operator& m, double t) {
  if (m.rows() != m.cols()) throw std::invalid_argument("ProcessMap::conjugation: matrix must be square");
  const auto d = static_cast<int>(m.rows());
  Operator s(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) {
        const Complex mj = std::conj(m(j, l));
        for (int i = 0; i < d; ++i) s(i + d * j, k + d * l) = m(i, k) * mj;
      }
    }
  }
  return ProcessMap{std::move(s), d, t};
}

ProcessMap ProcessMap::then(const ProcessMap& next) const {
  if (next.d != d) throw std::invalid_argument("ProcessMap::then: dimension mismatch");
  return ProcessMap{next.superop * superop, d, t + next.t};
}

ChannelTrajectory extract_channel_trajectory(const HarmonicOperator& h, std::span<const JumpOperator> jumps,
                                             const CompSubspaceMap& map, double t_final,
                                             const IntegratorConfig& cfg, const ChannelOptions& opts) {
  check_map(h, map);
  const int d = static_cast<int>(map.indices.size());
  const int dim = h.dim();
  ChannelPath path = opts.path;
  if (path == ChannelPath::kAuto) path = any_decay(jumps) ? ChannelPath::kDensity : ChannelPath::kKets;
  if (path == ChannelPath::kKets && any_decay(jumps)) {
    throw std::invalid_argument("extract_channel: ket path cannot represent decay");
  }

  ChannelTrajectory out;
  if (path == ChannelPath::kKets) {
    CompiledOperator op(h, Eigen::VectorXcd::Zero(dim));
    StateMatrix x = StateMatrix::Zero(dim, d);
    for (int k = 0; k < d; ++k) x(map.indices[k], k) = 1.0;
    const auto observer = [&](double t, const StateMatrix& s) {
      const Operator m = project_rows(s, map);
      out.times.push_back(t);
      out.maps.push_back(ProcessMap::conjugation(m, t));
      double drift = 0.0;
      for (int k = 0; k < d; ++k) drift = std::max(drift, std::abs(s.col(k).squaredNorm() - 1.0));
      out.max_norm_drift = std::max(out.max_norm_drift, drift);
    };
    const double dt = finite_step(resolve_step(h, cfg), t_final);
    out.steps = integrate(ket_rhs(op), x, t_final, dt, cfg, observer).steps;
    return out;
  }

  // Units E_ij with i <= j, ordered row-major over the upper triangle.
  std::vector<std::pair<int, int>> units;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) units.emplace_back(i, j);
  }
  const int n_units = static_cast<int>(units.size());
  std::vector<std::vector<Operator>> images(static_cast<std::size_t>(n_units));
  std::vector<std::vector<double>> times(static_cast<std::size_t>(n_units));
  std::vector<double> drifts(static_cast<std::size_t>(n_units), 0.0);
  std::vector<long> steps(static_cast<std::size_t>(n_units), 0);

  const double rate = total_rate(jumps);
  const double dt = finite_step(resolve_step(h, cfg, rate), t_final);
  run_parallel(n_units, opts.threads, [&](int u) {
    const auto [i, j] = units[static_cast<std::size_t>(u)];
    LindbladPropagator prop(h, jumps);
    StateMatrix x = StateMatrix::Zero(dim, dim);
    x(map.indices[i], map.indices[j]) = 1.0;
    const Complex trace0 = x.trace();
    auto& img = images[static_cast<std::size_t>(u)];
    auto& ts = times[static_cast<std::size_t>(u)];
    double& drift = drifts[static_cast<std::size_t>(u)];
    const auto observer = [&](double t, const StateMatrix& s) {
      ts.push_back(t);
      img.push_back(project_matrix(s, map));
      drift = std::max(drift, std::abs(s.trace() - trace0));
    };
    PostStepFunction post;
    if (i == j) post = [](StateMatrix& s) { s = (0.5 * (s + s.adjoint())).eval(); };
    const RhsFunction rhs = [&prop](double t, const StateMatrix& s, StateMatrix& ds) { prop.rhs(t, s, ds); };
    steps[static_cast<std::size_t>(u)] = integrate(rhs, x, t_final, dt, cfg, observer, post).steps;
  });

  const std::size_t n_samples = times.front().size();
  for (const auto& ts : times) {
    if (ts.size() != n_samples) throw NumericalError("extract_channel: sample schedules differ between units");
  }
  out.times = times.front();
  out.steps = steps.front();
  for (double drift : drifts) out.max_norm_drift = std::max(out.max_norm_drift, drift);
  const auto dd = static_cast<Eigen::Index>(d) * d;
  for (std::size_t s = 0; s < n_samples; ++s) {
    ProcessMap pm{Operator::Zero(dd, dd), d, out.times[s]};
    for (int u = 0; u < n_units; ++u) {
      const auto [i, j] = units[static_cast<std::size_t>(u)];
      const Operator& img = images[static_cast<std::size_t>(u)][s];
      pm.superop.col(i + d * j) = Eigen::Map<const Eigen::VectorXcd>(img.data(), dd);
      if (i != j) {
        const Operator adj = img.adjoint();
        pm.superop.col(j + d * i) = Eigen::Map<const Eigen::VectorXcd>(adj.data(), dd);
      }
    }
    out.maps.push_back(std::move(pm));
  }
  return out;
}

ProcessMap extract_channel(const HarmonicOperator& h, std::span<const JumpOperator> jumps, const CompSubspaceMap& map,
                           double t_final, const IntegratorConfig& cfg, const ChannelOptions& opts) {
  IntegratorConfig quiet = cfg;
  quiet.store_every = 0;
  ChannelTrajectory traj = extract_channel_trajectory(h, jumps, map, t_final, quiet, opts);
  return std::move(traj.maps.back());
}

Operator projected_propagator(const HarmonicOperator& h, const CompSubspaceMap& map, double t_final,
                              const IntegratorConfig& cfg) {
  check_map(h, map);
  const int d = static_cast<int>(map.indices.size());
  StateMatrix x = StateMatrix::Zero(h.dim(), d);
  for (int k = 0; k < d; ++k) x(map.indices[k], k) = 1.0;
  return project_rows(evolve_kets(h, x, t_final, cfg), map);
}

}  // namespace rydgate
