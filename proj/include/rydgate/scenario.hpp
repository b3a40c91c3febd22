#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "rydgate/dynamics.hpp"
#include "rydgate/integrator.hpp"
#include "rydgate/model.hpp"

namespace rydgate {

using Json = nlohmann::ordered_json;

inline constexpr int kScenarioSchemaVersion = 1;

enum class UnitSystem {
  kRelative,  // frequencies in units of Omega', times in 1/Omega'
  kTwoPiMHz,  // frequencies in 2 pi x MHz, times in microseconds
};

enum class HamiltonianKind { kFull, kRotated, kEffective };

/// Validated scenario document. Construction checks the schema and resolves
/// every sweep point, so a config that loads will not raise ConfigError later.
class ScenarioConfig {
 public:
  static ScenarioConfig from_json(Json doc);
  static ScenarioConfig from_text(const std::string& text);
  static ScenarioConfig load(const std::filesystem::path& path);

  const Json& document() const { return doc_; }
  const std::string& name() const { return name_; }

 private:
  Json doc_;
  std::string name_;
};

/// One fully resolved sweep point.
struct PointSpec {
  std::string case_label;
  std::vector<double> coordinates;  // swept values in config units, axis order
  UnitSystem units = UnitSystem::kRelative;
  SystemModel model{build_space(3, false), DriveParams{}, InteractionGraph(3)};
  HamiltonianKind hamiltonian = HamiltonianKind::kFull;
  bool light_shift_correction = true;
  IntegratorConfig integrator;
  double t_gate = 0.0;  // internal time unit
  int samples = 0;      // trajectory samples including t = 0; 0 or 1 means final state only
  bool fidelity = true;
  bool compare_effective = false;
  std::string initial_state;             // empty: no state evolution
  std::vector<std::string> populations;  // names of projector states
};

struct SweepLayout {
  bool has_cases = false;
  std::vector<std::string> axis_names;
  std::vector<PointSpec> points;  // case-major, then grid order (first axis slowest)
};

/// Expands cases and sweep axes into resolved points. Throws ConfigError with
/// the failing field path.
SweepLayout expand_points(const ScenarioConfig& config);

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  int column_index(const std::string& name) const;  // -1 if absent
  double number(std::size_t row, const std::string& column) const;
};

struct SweepResult {
  std::string name;
  Table table;
  Table trajectory;  // long format, filled when requested
  int failed_rows = 0;
  int flagged_rows = 0;
};

struct RunOptions {
  int threads = 1;
  bool trajectories = false;
  /// Called after each finished point with (done, total); may run on worker threads.
  std::function<void(int, int)> progress;
};

/// Rows with integrator drift above this are flagged.
inline constexpr double kDriftFlagThreshold = 1e-5;

SweepResult run_scenario(const ScenarioConfig& config, const RunOptions& opts = {});

/// Thread count from RYDGATE_THREADS, or 1 when unset or invalid.
int default_thread_count();

// Built-in experiments.
std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
Json preset_document(const std::string& name);  // ConfigError for unknown names
ScenarioConfig preset(const std::string& name);

enum class EmitFormat { kCsv, kJson };

EmitFormat parse_format(const std::string& name);
void write_csv(const Table& table, std::ostream& out);
void write_json(const SweepResult& result, std::ostream& out);
void emit(const SweepResult& result, EmitFormat format, const std::filesystem::path& path);
/// Reads back a JSON emission; the table only.
SweepResult load_sweep_json(std::istream& in);
/// Rounds to the precision used when emitting (12 significant digits).
double round_emitted(double v);

}  // namespace rydgate
