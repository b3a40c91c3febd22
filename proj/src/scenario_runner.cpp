#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "rydgate/errors.hpp"
#include "rydgate/metrics.hpp"
#include "rydgate/scenario.hpp"

namespace rydgate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

HarmonicOperator hamiltonian_for(const SystemModel& model, HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::kFull:
      return full_hamiltonian(model);
    case HamiltonianKind::kRotated:
      return rotated_hamiltonian(model);
    case HamiltonianKind::kEffective:
      return HarmonicOperator(hamiltonian_effective(model));
  }
  throw std::logic_error("unhandled Hamiltonian kind");
}

double decay_rate(std::span<const JumpOperator> jumps) {
  double sum = 0.0;
  for (const auto& j : jumps) sum += j.rate;
  return sum;
}

// Fixed step that lands exactly on `samples` evenly spaced times.
IntegratorConfig aligned(const HarmonicOperator& h, IntegratorConfig cfg, double rate, double t_final, int samples) {
  if (samples < 2 || t_final == 0.0 || cfg.method != IntegratorMethod::kRk4) {
    cfg.store_every = 0;
    return cfg;
  }
  const double dt = resolve_step(h, cfg, rate);
  const long intervals = samples - 1;
  const long n_min = std::isfinite(dt) ? static_cast<long>(std::ceil(t_final / dt * (1.0 - 1e-12))) : 1;
  const long per = std::max(1L, (n_min + intervals - 1) / intervals);
  cfg.dt = t_final / static_cast<double>(per * intervals);
  cfg.store_every = static_cast<int>(per);
  return cfg;
}

Ket named_state(const std::string& name, const HilbertSpace& space) {
  if (name == "psi" || name == "phi") {
    const auto map = computational_subspace(space);
    const auto probe = probe_states(space.n_atoms());
    return embed_ket(name == "psi" ? probe.psi_init : probe.phi_target, map);
  }
  return basis_ket(space, name);
}

// Full-space diagonal: light-shift phases on computational states, 1 elsewhere.
Ket full_frame(const SystemModel& model, const CompSubspaceMap& map, double t, bool enabled) {
  Ket d = Ket::Ones(model.space.dim());
  if (!enabled) return d;
  const Ket phases = light_shift_correction(model, t);
  for (int k = 0; k < map.size(); ++k) d(map.indices[k]) = phases(k);
  return d;
}

struct Series {
  std::vector<double> times;
  std::vector<double> fbar;
  std::vector<std::vector<double>> pops;  // [population][sample]
  double drift = 0.0;
};

Series simulate(const PointSpec& p, HamiltonianKind kind, int inner_threads) {
  const SystemModel& model = p.model;
  const HarmonicOperator h = hamiltonian_for(model, kind);
  const std::vector<JumpOperator> jumps = model.decay ? jump_operators(model) : std::vector<JumpOperator>{};
  const double rate = decay_rate(jumps);
  const IntegratorConfig cfg = aligned(h, p.integrator, rate, p.t_gate, p.samples);
  const auto map = computational_subspace(model.space);
  const bool correct = p.light_shift_correction && kind != HamiltonianKind::kEffective;
  const int n_qubits = model.space.n_atoms();

  Series s;
  if (p.fidelity) {
    const auto traj = extract_channel_trajectory(h, jumps, map, p.t_gate, cfg, {ChannelPath::kAuto, inner_threads});
    const Operator target = ideal_gate(n_qubits);
    s.times = traj.times;
    for (std::size_t k = 0; k < traj.maps.size(); ++k) {
      ProcessMap ch = traj.maps[k];
      if (correct) ch = apply_phase_frame(ch, light_shift_correction(model, traj.times[k]));
      s.fbar.push_back(average_fidelity(ch, target).fbar);
    }
    s.drift = traj.max_norm_drift;
  }
  if (!p.initial_state.empty()) {
    const Ket psi0 = named_state(p.initial_state, model.space);
    std::vector<Ket> labels;
    for (const auto& name : p.populations) labels.push_back(named_state(name, model.space));
    s.pops.assign(labels.size(), {});
    std::vector<double> times;
    if (jumps.empty()) {
      const auto r = evolve_ket(h, psi0, p.t_gate, cfg);
      times = r.times;
      for (std::size_t k = 0; k < r.kets.size(); ++k) {
        const Ket psi = full_frame(model, map, r.times[k], correct).cwiseProduct(r.kets[k]);
        for (std::size_t j = 0; j < labels.size(); ++j) s.pops[j].push_back(population(psi, labels[j]));
      }
      s.drift = std::max(s.drift, r.max_norm_drift);
    } else {
      const DensityMatrix rho0 = psi0 * psi0.adjoint();
      const auto r = evolve_density(h, jumps, rho0, p.t_gate, cfg);
      times = r.times;
      for (std::size_t k = 0; k < r.densities.size(); ++k) {
        const Ket d = full_frame(model, map, r.times[k], correct);
        const DensityMatrix rho = d.asDiagonal() * r.densities[k] * d.conjugate().asDiagonal();
        for (std::size_t j = 0; j < labels.size(); ++j) s.pops[j].push_back(population(rho, labels[j]));
      }
      s.drift = std::max(s.drift, r.max_norm_drift);
    }
    if (s.times.empty()) s.times = times;
  }
  return s;
}

double max_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw NumericalError("full and effective sample schedules differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct Layout {
  std::vector<std::string> prefix;  // case + axes
  bool fidelity = false;
  bool compare = false;
  std::vector<std::string> pops;
};

Layout describe(const SweepLayout& sweep) {
  Layout l;
  if (sweep.has_cases) l.prefix.push_back("case");
  for (const auto& a : sweep.axis_names) l.prefix.push_back(a);
  if (!sweep.points.empty()) {
    const auto& p = sweep.points.front();
    l.fidelity = p.fidelity;
    l.compare = p.compare_effective;
    l.pops = p.populations;
  }
  for (const auto& p : sweep.points) {
    if (p.fidelity != l.fidelity || p.compare_effective != l.compare || p.populations != l.pops) {
      throw ConfigError("cases: outputs must be the same for every case");
    }
  }
  return l;
}

std::vector<std::string> metric_columns(const Layout& l) {
  std::vector<std::string> c{"t_gate"};
  if (l.fidelity) {
    c.push_back("fbar");
    if (l.compare) {
      c.push_back("fbar_effective");
      c.push_back("max_effective_deviation");
    }
  }
  for (const auto& p : l.pops) {
    c.push_back("pop_" + p);
    if (l.compare) c.push_back("pop_" + p + "_effective");
  }
  if (l.compare && !l.pops.empty()) c.push_back("max_population_deviation");
  c.push_back("drift");
  c.push_back("flagged");
  c.push_back("status");
  return c;
}

struct Outcome {
  std::vector<Cell> cells;
  std::vector<std::vector<Cell>> trajectory;
  bool failed = false;
  bool flagged = false;
};

std::vector<Cell> prefix_cells(const PointSpec& p, bool has_cases) {
  std::vector<Cell> cells;
  if (has_cases) cells.emplace_back(p.case_label);
  for (double v : p.coordinates) cells.emplace_back(v);
  return cells;
}

Outcome run_point(const PointSpec& p, const Layout& l, bool has_cases, int inner_threads, bool want_traj,
                  std::size_t row) {
  Outcome out;
  out.cells = prefix_cells(p, has_cases);
  const double time_unit = p.units == UnitSystem::kTwoPiMHz ? 1e-6 : 1.0;
  out.cells.emplace_back(p.t_gate / time_unit);
  const std::size_t n_metrics = metric_columns(l).size() - 1;  // t_gate already placed
  try {
    const Series full = simulate(p, p.hamiltonian, inner_threads);
    Series eff;
    if (p.compare_effective) eff = simulate(p, HamiltonianKind::kEffective, inner_threads);
    double drift = std::max(full.drift, eff.drift);
    if (p.fidelity) {
      out.cells.emplace_back(full.fbar.back());
      if (p.compare_effective) {
        out.cells.emplace_back(eff.fbar.back());
        out.cells.emplace_back(max_deviation(full.fbar, eff.fbar));
      }
    }
    double pop_dev = 0.0;
    for (std::size_t j = 0; j < p.populations.size(); ++j) {
      out.cells.emplace_back(full.pops[j].back());
      if (p.compare_effective) {
        out.cells.emplace_back(eff.pops[j].back());
        pop_dev = std::max(pop_dev, max_deviation(full.pops[j], eff.pops[j]));
      }
    }
    if (p.compare_effective && !p.populations.empty()) out.cells.emplace_back(pop_dev);
    out.flagged = drift > kDriftFlagThreshold;
    out.cells.emplace_back(drift);
    out.cells.emplace_back(out.flagged ? 1.0 : 0.0);
    out.cells.emplace_back(std::string(out.flagged ? "flagged: drift above 1e-5" : "ok"));

    if (want_traj) {
      for (std::size_t k = 0; k < full.times.size(); ++k) {
        std::vector<Cell> r{static_cast<double>(row)};
        for (auto& c : prefix_cells(p, has_cases)) r.push_back(c);
        r.emplace_back(full.times[k] / time_unit);
        if (p.fidelity) {
          r.emplace_back(full.fbar[k]);
          if (p.compare_effective) r.emplace_back(eff.fbar[k]);
        }
        for (std::size_t j = 0; j < p.populations.size(); ++j) {
          r.emplace_back(full.pops[j][k]);
          if (p.compare_effective) r.emplace_back(eff.pops[j][k]);
        }
        out.trajectory.push_back(std::move(r));
      }
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.cells = prefix_cells(p, has_cases);
    out.cells.emplace_back(p.t_gate / time_unit);
    for (std::size_t i = 0; i + 1 < n_metrics; ++i) out.cells.emplace_back(kNaN);
    out.cells.emplace_back(std::string("error: ") + e.what());
    out.trajectory.clear();
  }
  return out;
}

std::vector<std::string> trajectory_columns(const Layout& l) {
  std::vector<std::string> c{"row"};
  for (const auto& p : l.prefix) c.push_back(p);
  c.push_back("t");
  if (l.fidelity) {
    c.push_back("fbar");
    if (l.compare) c.push_back("fbar_effective");
  }
  for (const auto& p : l.pops) {
    c.push_back("pop_" + p);
    if (l.compare) c.push_back("pop_" + p + "_effective");
  }
  return c;
}

}  // namespace

int Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

double Table::number(std::size_t row, const std::string& column) const {
  const int idx = column_index(column);
  if (idx < 0) throw std::out_of_range("Table: no column '" + column + "'");
  const Cell& c = rows.at(row).at(static_cast<std::size_t>(idx));
  if (const double* v = std::get_if<double>(&c)) return *v;
  throw std::invalid_argument("Table: column '" + column + "' is not numeric");
}

int default_thread_count() {
  if (const char* env = std::getenv("RYDGATE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1 && n <= 1024) return static_cast<int>(n);
  }
  return 1;
}

SweepResult run_scenario(const ScenarioConfig& config, const RunOptions& opts) {
  const SweepLayout sweep = expand_points(config);
  const Layout layout = describe(sweep);
  SweepResult result;
  result.name = config.name();
  result.table.columns = layout.prefix;
  for (const auto& c : metric_columns(layout)) result.table.columns.push_back(c);
  if (opts.trajectories) result.trajectory.columns = trajectory_columns(layout);

  const int n = static_cast<int>(sweep.points.size());
  const int threads = std::max(1, opts.threads);
  const int outer = std::min(threads, std::max(1, n));
  const int inner = std::max(1, threads / outer);
  std::vector<Outcome> outcomes(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      outcomes[static_cast<std::size_t>(i)] = run_point(sweep.points[static_cast<std::size_t>(i)], layout,
                                                        sweep.has_cases, inner, opts.trajectories,
                                                        static_cast<std::size_t>(i));
      const int finished = ++done;
      if (opts.progress) opts.progress(finished, n);
    }
  };
  if (outer == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < outer; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto& o : outcomes) {
    result.failed_rows += o.failed ? 1 : 0;
    result.flagged_rows += o.flagged ? 1 : 0;
    result.table.rows.push_back(std::move(o.cells));
    for (auto& r : o.trajectory) result.trajectory.rows.push_back(std::move(r));
  }
  return result;
}

}  // namespace rydgate
