#include "rydgate/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rydgate {

namespace {

constexpr int kGround0 = 0;
constexpr int kGround1 = 1;
constexpr int kRyd = 2;
constexpr int kLeakLevel = 3;

void add_coupling(Operator& op, const HilbertSpace& space, std::string_view bra_from,
                  std::string_view ket_to, Complex amplitude) {
  op(space.index_of(bra_from), space.index_of(ket_to)) += amplitude;
}

void require_three_atoms(const SystemModel& model, const char* what) {
  if (model.space.n_atoms() != 3) {
    throw std::invalid_argument(std::string(what) + ": requires a three-atom register");
  }
}

}  // namespace

double DriveParams::control_rabi(int control) const {
  switch (control) {
    case 0: return omega_prime;
    case 1: return omega_dprime.value_or(omega_prime);
    case 2: return omega_ctrl3.value_or(omega_prime);
    default: throw std::out_of_range("DriveParams::control_rabi: control index out of range");
  }
}

std::vector<std::string> DriveParams::regime_warnings() const {
  std::vector<std::string> out;
  if (delta / omega_prime < 10.0) {
    std::ostringstream s;
    s << "Delta/Omega' = " << delta / omega_prime << " < 10";
    out.push_back(s.str());
  }
  const double weak = std::max(std::abs(omega1), std::abs(omega2));
  if (weak > 0.0 && omega_prime / weak < 5.0) {
    std::ostringstream s;
    s << "Omega'/max|Omega_1,2| = " << omega_prime / weak << " < 5";
    out.push_back(s.str());
  }
  return out;
}

InteractionGraph::InteractionGraph(int n_atoms) : u_(Eigen::MatrixXd::Zero(n_atoms, n_atoms)) {
  if (n_atoms < 1) throw std::invalid_argument("InteractionGraph: atom count must be positive");
}

InteractionGraph::InteractionGraph(const Eigen::MatrixXd& u) : u_(u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("InteractionGraph: matrix must be square");
  for (int j = 0; j < u.rows(); ++j) {
    if (u(j, j) != 0.0) throw std::invalid_argument("InteractionGraph: diagonal must be zero");
    for (int k = 0; k < u.cols(); ++k) {
      if (u(j, k) < 0.0 || !std::isfinite(u(j, k))) {
        throw std::invalid_argument("InteractionGraph: entries must be finite and non-negative");
      }
      if (u(j, k) != u(k, j)) throw std::invalid_argument("InteractionGraph: matrix must be symmetric");
    }
  }
}

void InteractionGraph::set(int j, int k, double value) {
  if (j == k) throw std::invalid_argument("InteractionGraph::set: self-interaction");
  if (j < 0 || k < 0 || j >= n_atoms() || k >= n_atoms()) {
    throw std::out_of_range("InteractionGraph::set: atom index out of range");
  }
  if (value < 0.0 || !std::isfinite(value)) {
    throw std::invalid_argument("InteractionGraph::set: value must be finite and non-negative");
  }
  u_(j, k) = value;
  u_(k, j) = value;
}

double u_from_distance(double c6, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("u_from_distance: distance must be positive");
  return c6 / std::pow(r, 6);
}

InteractionGraph interactions_from_geometry(const Geometry& geom) {
  const int n = static_cast<int>(geom.positions.size());
  InteractionGraph graph(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double dx = geom.positions[j][0] - geom.positions[k][0];
      const double dy = geom.positions[j][1] - geom.positions[k][1];
      const double r = std::hypot(dx, dy);
      if (r == 0.0) throw std::invalid_argument("interactions_from_geometry: coincident atoms");
      graph.set(j, k, u_from_distance(std::abs(geom.c6), r));
    }
  }
  return graph;
}

double DecayModel::channel_rate() const {
  if (channels == DecayChannels::kTwoChannel) return gamma / 2.0;
  return branching == LeakageBranching::kFixedTotal ? gamma / 3.0 : gamma / 2.0;
}

SystemModel::SystemModel(HilbertSpace space_, DriveParams drives_, InteractionGraph interactions_,
                         std::optional<DecayModel> decay_)
    : space(std::move(space_)),
      drives(drives_),
      interactions(std::move(interactions_)),
      decay(decay_) {
  if (!(drives.delta > 0.0)) throw std::invalid_argument("SystemModel: delta must be positive");
  if (!(drives.omega_prime > 0.0)) throw std::invalid_argument("SystemModel: omega_prime must be positive");
  if (interactions.n_atoms() != space.n_atoms()) {
    throw std::invalid_argument("SystemModel: interaction graph size does not match atom count");
  }
  if (space.n_atoms() < 2) throw std::invalid_argument("SystemModel: need at least one control and a target");
  if (decay && decay->gamma < 0.0) throw std::invalid_argument("SystemModel: gamma must be non-negative");
}

Eigen::VectorXd rri_energies(const SystemModel& model) {
  const auto& space = model.space;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    const auto lv = space.levels(i);
    for (int j = 0; j < space.n_atoms(); ++j) {
      for (int k = j + 1; k < space.n_atoms(); ++k) {
        if (lv[j] == kRyd && lv[k] == kRyd) v(i) += model.interactions.u(j, k);
      }
    }
  }
  return v;
}

namespace {

// Lower-triangle generators: target drive (static) and control drives
// (carrying e^{i Delta t}). The full Hamiltonian is T + T^dag + V + C e^{iDt} + h.c.
Operator target_generator(const SystemModel& model) {
  const auto& s = model.space;
  const int t = model.target();
  return model.drives.omega1 * transition_op(s, t, kGround0, kRyd) +
         model.drives.omega2 * transition_op(s, t, kGround1, kRyd);
}

Operator control_generator(const SystemModel& model) {
  const auto& s = model.space;
  Operator c = Operator::Zero(s.dim(), s.dim());
  for (int ctrl = 0; ctrl < model.n_controls(); ++ctrl) {
    c += model.drives.control_rabi(ctrl) * transition_op(s, ctrl, kGround0, kRyd);
  }
  return c;
}

}  // namespace

HarmonicOperator full_hamiltonian(const SystemModel& model) {
  const Operator target = target_generator(model);
  Operator h0 = target + target.adjoint();
  h0.diagonal() += rri_energies(model).cast<Complex>();
  HarmonicOperator h(std::move(h0));
  h.add_term(model.drives.delta, control_generator(model));
  return h;
}

Operator hamiltonian_full(const SystemModel& model, double t) { return full_hamiltonian(model).at(t); }

HarmonicOperator rotated_hamiltonian(const SystemModel& model) {
  const Eigen::VectorXd v = rri_energies(model);
  const int n = model.space.dim();
  const Operator target = target_generator(model);
  const Operator control = control_generator(model);
  Operator gen = Operator::Zero(n, n);
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      // The two generators never share an element: one moves the target,
      // the other a control.
      if (target(a, b) != 0.0) {
        gen(a, b) = target(a, b);
        freq(a, b) = v(a) - v(b);
      } else if (control(a, b) != 0.0) {
        gen(a, b) = control(a, b);
        freq(a, b) = model.drives.delta + v(a) - v(b);
      }
    }
  }
  const double scale = std::max(model.drives.delta, v.maxCoeff());
  return group_by_frequency(gen, freq, 1e-12 * scale);
}

Operator hamiltonian_rotated(const SystemModel& model, double t) { return rotated_hamiltonian(model).at(t); }

Ket rri_frame(const SystemModel& model, double t) {
  const Eigen::VectorXd v = rri_energies(model);
  Ket out(v.size());
  for (int i = 0; i < v.size(); ++i) out(i) = std::exp(-kI * (v(i) * t));
  return out;
}

std::vector<std::string> block_kets(int block) {
  switch (block) {
    case 1: return {"000", "001", "00r", "r0r", "0rr", "rrr"};
    case 2: return {"010", "011", "01r", "r1r"};
    case 3: return {"100", "101", "10r", "1rr"};
    case 4: return {"110", "111", "11r"};
    default: throw std::invalid_argument("hamiltonian_block: block id must be 1..4");
  }
}

HarmonicOperator hamiltonian_block(const SystemModel& model, int block) {
  require_three_atoms(model, "hamiltonian_block");
  const auto& s = model.space;
  const int n = s.dim();
  const double o1 = model.drives.omega1;
  const double o2 = model.drives.omega2;
  const double c1 = model.drives.control_rabi(0);
  const double c2 = model.drives.control_rabi(1);
  Operator gen = Operator::Zero(n, n);
  HarmonicOperator h(Operator::Zero(n, n));
  switch (block) {
    case 1: {
      add_coupling(gen, s, "000", "00r", o1);
      add_coupling(gen, s, "001", "00r", o2);
      add_coupling(gen, s, "00r", "r0r", c1);
      add_coupling(gen, s, "00r", "0rr", c2);
      h.add_term(0.0, gen);
      Operator slow = Operator::Zero(n, n);
      add_coupling(slow, s, "0rr", "rrr", c1);
      add_coupling(slow, s, "r0r", "rrr", c2);
      h.add_term(-model.interactions.u(0, 1), slow);
      return h;
    }
    case 2:
      add_coupling(gen, s, "010", "01r", o1);
      add_coupling(gen, s, "011", "01r", o2);
      add_coupling(gen, s, "01r", "r1r", c1);
      break;
    case 3:
      add_coupling(gen, s, "100", "10r", o1);
      add_coupling(gen, s, "101", "10r", o2);
      add_coupling(gen, s, "10r", "1rr", c2);
      break;
    case 4:
      add_coupling(gen, s, "110", "11r", o1);
      add_coupling(gen, s, "111", "11r", o2);
      break;
    default:
      throw std::invalid_argument("hamiltonian_block: block id must be 1..4");
  }
  h.add_term(0.0, gen);
  return h;
}

Operator hamiltonian_effective(const SystemModel& model) {
  const auto& s = model.space;
  const std::string ones(model.n_controls(), '1');
  Operator gen = Operator::Zero(s.dim(), s.dim());
  add_coupling(gen, s, ones + "0", ones + "r", model.drives.omega1);
  add_coupling(gen, s, ones + "1", ones + "r", model.drives.omega2);
  return gen + gen.adjoint();
}

std::vector<JumpOperator> jump_operators(const SystemModel& model) {
  if (!model.decay) throw std::invalid_argument("jump_operators: model has no decay");
  const auto& decay = *model.decay;
  const auto& s = model.space;
  if (decay.channels == DecayChannels::kThreeChannel && !s.has_leakage()) {
    throw std::invalid_argument("jump_operators: three-channel decay needs a space with the |d> level");
  }
  std::vector<int> sinks{kGround0, kGround1};
  if (decay.channels == DecayChannels::kThreeChannel) sinks.push_back(kLeakLevel);
  static constexpr std::array<char, 4> kNames{'0', '1', 'r', 'd'};
  std::vector<JumpOperator> out;
  for (int atom = 0; atom < s.n_atoms(); ++atom) {
    for (int sink : sinks) {
      std::string label = "atom" + std::to_string(atom + 1) + ":r->" + kNames[sink];
      out.push_back({decay.channel_rate(), transition_op(s, atom, sink, kRyd), std::move(label)});
    }
  }
  return out;
}

Operator ideal_gate(int n_qubits) {
  if (n_qubits != 3 && n_qubits != 4) throw std::invalid_argument("ideal_gate: only 3 or 4 qubits");
  const int d = 1 << n_qubits;
  Operator gate = Operator::Zero(d, d);
  const int controls = (d - 1) & ~1;  // all control bits set, target bit clear
  for (int x = 0; x < d; ++x) {
    const int y = ((x & controls) == controls) ? (x ^ 1) : x;
    gate(y, x) = 1.0;
  }
  return gate;
}

std::vector<double> control_light_shifts(const SystemModel& model) {
  const double delta = model.drives.delta;
  std::vector<double> out;
  for (int c = 0; c < model.n_controls(); ++c) {
    const double w = model.drives.control_rabi(c);
    out.push_back(0.5 * (std::sqrt(delta * delta + 4.0 * w * w) - delta));
  }
  return out;
}

Ket light_shift_correction(const SystemModel& model, double t) {
  const auto shifts = control_light_shifts(model);
  const int n = model.space.n_atoms();
  const int d = 1 << n;
  Ket phases(d);
  for (int x = 0; x < d; ++x) {
    double acc = 0.0;
    for (int c = 0; c < model.n_controls(); ++c) {
      if (((x >> (n - 1 - c)) & 1) == 0) acc += shifts[c];
    }
    phases(x) = std::exp(kI * (acc * t));
  }
  return phases;
}

}  // namespace rydgate
