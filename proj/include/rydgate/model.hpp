#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rydgate/harmonic_operator.hpp"
#include "rydgate/quantum_core.hpp"

namespace rydgate {

/// Laser drives. All values are angular frequencies in one consistent unit.
/// Controls are atoms 0..n-2 and the target is the last atom.
struct DriveParams {
  double omega_prime = 1.0;              // control atom 1
  std::optional<double> omega_dprime;    // control atom 2, defaults to omega_prime
  std::optional<double> omega_ctrl3;     // control atom 3 (four-atom register)
  double omega1 = 0.0;                   // target |0> <-> |r>, signed
  double omega2 = 0.0;                   // target |1> <-> |r>, signed
  double delta = 50.0;                   // blue detuning of the control drives

  double control_rabi(int control) const;

  /// Human-readable notes when Delta >> Omega' >> |Omega_1,2| is weak.
  /// Simulation still proceeds; callers decide whether to print them.
  std::vector<std::string> regime_warnings() const;
  bool regime_valid() const { return regime_warnings().empty(); }
};

/// Symmetric, non-negative pairwise Rydberg-Rydberg shifts U_jk.
class InteractionGraph {
 public:
  explicit InteractionGraph(int n_atoms = 3);
  explicit InteractionGraph(const Eigen::MatrixXd& u);

  int n_atoms() const { return static_cast<int>(u_.rows()); }
  double u(int j, int k) const { return u_(j, k); }
  void set(int j, int k, double value);
  const Eigen::MatrixXd& matrix() const { return u_; }

  friend bool operator==(const InteractionGraph& a, const InteractionGraph& b) { return a.u_ == b.u_; }

 private:
  Eigen::MatrixXd u_;
};

struct Geometry {
  double c6 = 0.0;  // frequency * length^6, already in the model's frequency unit
  std::vector<std::array<double, 2>> positions;
};

double u_from_distance(double c6, double r);
InteractionGraph interactions_from_geometry(const Geometry& geom);

enum class DecayChannels { kTwoChannel, kThreeChannel };

/// How the |d> channel shares the total rate in three-channel mode.
enum class LeakageBranching {
  kFixedTotal,   // gamma/3 to each of |0>, |1>, |d>
  kExtraHalf,    // gamma/2 to each, total 3 gamma / 2
};

struct DecayModel {
  double gamma = 0.0;
  DecayChannels channels = DecayChannels::kTwoChannel;
  LeakageBranching branching = LeakageBranching::kFixedTotal;

  /// Rate per jump operator.
  double channel_rate() const;
  int channels_per_atom() const { return channels == DecayChannels::kTwoChannel ? 2 : 3; }
};

struct SystemModel {
  SystemModel(HilbertSpace space, DriveParams drives, InteractionGraph interactions,
              std::optional<DecayModel> decay = std::nullopt);

  HilbertSpace space;
  DriveParams drives;
  InteractionGraph interactions;
  std::optional<DecayModel> decay;

  int n_controls() const { return space.n_atoms() - 1; }
  int target() const { return space.n_atoms() - 1; }
};

struct JumpOperator {
  double rate = 0.0;
  Operator op;
  std::string label;  // e.g. "atom1:r->0"
};

/// Diagonal of sum U_jk |rr><rr|_jk over the full space.
Eigen::VectorXd rri_energies(const SystemModel& model);

/// Interaction-picture Hamiltonian: control drives carry e^{i Delta t},
/// target drives and the RRI are static.
HarmonicOperator full_hamiltonian(const SystemModel& model);
Operator hamiltonian_full(const SystemModel& model, double t);

/// The same dynamics in the frame U0 = exp(-i t sum U_jk |rr><rr|); every
/// element picks up e^{i (V_a - V_b) t} and the diagonal vanishes.
HarmonicOperator rotated_hamiltonian(const SystemModel& model);
Operator hamiltonian_rotated(const SystemModel& model, double t);

/// Diagonal of U0(t) = exp(-i t V).
Ket rri_frame(const SystemModel& model, double t);

/// RWA block k (1..4) of the rotated Hamiltonian for the three-atom gate.
HarmonicOperator hamiltonian_block(const SystemModel& model, int block);
std::vector<std::string> block_kets(int block);

/// Static gate Hamiltonian Omega1 |1..10><1..1r| + Omega2 |1..11><1..1r| + h.c.
Operator hamiltonian_effective(const SystemModel& model);

/// Ordered atom-major: atom 1 -> |0>, atom 1 -> |1>, [atom 1 -> |d>], atom 2 ...
std::vector<JumpOperator> jump_operators(const SystemModel& model);

/// Multi-controlled NOT: flips the last qubit iff every control is |1>.
Operator ideal_gate(int n_qubits);

/// Dressed-ground shift of a control atom in |0> under its far-detuned
/// drive: (sqrt(Delta^2 + 4 Omega_c^2) - Delta) / 2, one entry per control.
std::vector<double> control_light_shifts(const SystemModel& model);

/// Diagonal virtual-Z frame on the computational subspace that undoes the
/// control light shifts accumulated up to time t.
Ket light_shift_correction(const SystemModel& model, double t);

}  // namespace rydgate
