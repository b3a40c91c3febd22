#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "rydgate/errors.hpp"
#include "rydgate/expression.hpp"
#include "rydgate/metrics.hpp"
#include "rydgate/scenario.hpp"

namespace rydgate {

namespace {

constexpr double kMHz = 1e6;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const Json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(join(path, key), "unknown field");
  }
}

double eval_value(const Json& v, const std::string& path, const std::map<std::string, double>& names) {
  double out = 0.0;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_string()) {
    try {
      out = evaluate_expression(v.get<std::string>(), names);
    } catch (const ConfigError& e) {
      fail(path, e.what());
    }
  } else {
    fail(path, "expected a number or an expression string");
  }
  if (!std::isfinite(out)) fail(path, "value is not finite");
  return out;
}

std::string get_string(const Json& obj, const std::string& key, const std::string& path, const std::string& fallback,
                       const std::set<std::string>& allowed) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  const auto s = v.get<std::string>();
  if (!allowed.empty() && !allowed.count(s)) {
    std::string options;
    for (const auto& a : allowed) options += (options.empty() ? "" : ", ") + a;
    fail(join(path, key), "'" + s + "' is not one of {" + options + "}");
  }
  return s;
}

bool get_bool(const Json& obj, const std::string& key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
  return obj.at(key).get<bool>();
}

int get_int(const Json& obj, const std::string& key, const std::string& path, int fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<int>();
}

const std::set<std::string> kTopLevelKeys{
    "schema_version", "name",       "description", "units",       "atoms",     "leakage",
    "variables",      "drives",     "interactions", "decay",      "hamiltonian", "phase_correction",
    "integrator",     "timing",     "sweep",        "cases",      "outputs"};

struct Units {
  UnitSystem system = UnitSystem::kRelative;
  double freq = 1.0;  // config frequency -> internal
  double time = 1.0;  // config time -> internal
};

Units parse_units(const Json& doc) {
  if (!doc.contains("units")) fail("units", "required (\"omega-prime-relative\" or \"two-pi-mhz\")");
  const auto u = get_string(doc, "units", "", "", {"omega-prime-relative", "two-pi-mhz"});
  if (u == "two-pi-mhz") return Units{UnitSystem::kTwoPiMHz, 2.0 * std::numbers::pi * kMHz, 1.0 / kMHz};
  return Units{};
}

InteractionGraph parse_interactions(const Json& doc, int n_atoms, const Units& units,
                                    const std::map<std::string, double>& names) {
  if (!doc.contains("interactions")) fail("interactions", "required");
  const Json& spec = doc.at("interactions");
  check_keys(spec, "interactions", {"matrix", "geometry", "relative"});
  if (spec.size() != 1) fail("interactions", "exactly one of matrix, geometry, relative must be given");

  InteractionGraph graph(n_atoms);
  const auto set_pair = [&](int j, int k, double value, const std::string& path) {
    if (value < 0.0) fail(path, "interaction must be non-negative");
    graph.set(j, k, value * units.freq);
  };

  if (spec.contains("matrix")) {
    const Json& m = spec.at("matrix");
    if (!m.is_array() || static_cast<int>(m.size()) != n_atoms) {
      fail("interactions.matrix", "expected " + std::to_string(n_atoms) + " rows");
    }
    Eigen::MatrixXd u(n_atoms, n_atoms);
    for (int j = 0; j < n_atoms; ++j) {
      const std::string row_path = "interactions.matrix[" + std::to_string(j) + "]";
      if (!m[j].is_array() || static_cast<int>(m[j].size()) != n_atoms) fail(row_path, "wrong row length");
      for (int k = 0; k < n_atoms; ++k) {
        u(j, k) = eval_value(m[j][k], row_path + "[" + std::to_string(k) + "]", names) * units.freq;
      }
    }
    try {
      return InteractionGraph(u);
    } catch (const std::invalid_argument& e) {
      fail("interactions.matrix", e.what());
    }
  }

  if (spec.contains("relative")) {
    const Json& rel = spec.at("relative");
    if (!rel.is_object()) fail("interactions.relative", "expected an object like {\"U12\": \"delta/8\"}");
    for (const auto& [key, value] : rel.items()) {
      const std::string path = "interactions.relative." + key;
      if (key.size() != 3 || key[0] != 'U' || !std::isdigit(static_cast<unsigned char>(key[1])) ||
          !std::isdigit(static_cast<unsigned char>(key[2]))) {
        fail(path, "keys must look like U12");
      }
      const int j = key[1] - '1';
      const int k = key[2] - '1';
      if (j < 0 || k < 0 || j >= n_atoms || k >= n_atoms || j >= k) fail(path, "needs atoms 1 <= j < k <= n");
      set_pair(j, k, eval_value(value, path, names), path);
    }
    return graph;
  }

  const Json& geom = spec.at("geometry");
  check_keys(geom, "interactions.geometry", {"c6", "c6_unit", "c6_angular", "positions"});
  if (!geom.contains("c6")) fail("interactions.geometry.c6", "required");
  double c6 = eval_value(geom.at("c6"), "interactions.geometry.c6", names);
  if (units.system == UnitSystem::kTwoPiMHz) {
    const auto unit = get_string(geom, "c6_unit", "interactions.geometry", "MHz*um^6", {"MHz*um^6", "THz*um^6"});
    if (unit == "THz*um^6") c6 *= 1e6;
    // An ordinary-frequency coefficient c gives U = 2 pi c / r^6, i.e. c / r^6 in 2 pi x MHz.
    if (get_bool(geom, "c6_angular", "interactions.geometry", false)) c6 /= 2.0 * std::numbers::pi;
  } else if (geom.contains("c6_unit") || geom.contains("c6_angular")) {
    fail("interactions.geometry", "c6_unit and c6_angular apply only to two-pi-mhz units");
  }
  if (!geom.contains("positions") || !geom.at("positions").is_array() ||
      static_cast<int>(geom.at("positions").size()) != n_atoms) {
    fail("interactions.geometry.positions", "expected " + std::to_string(n_atoms) + " [x, y] pairs");
  }
  Geometry g;
  g.c6 = c6 * units.freq;
  for (std::size_t i = 0; i < geom.at("positions").size(); ++i) {
    const Json& p = geom.at("positions")[i];
    const std::string path = "interactions.geometry.positions[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2) fail(path, "expected [x, y]");
    g.positions.push_back({eval_value(p[0], path, names), eval_value(p[1], path, names)});
  }
  try {
    return interactions_from_geometry(g);
  } catch (const std::invalid_argument& e) {
    fail("interactions.geometry", e.what());
  }
}

std::optional<DecayModel> parse_decay(const Json& doc, const Units& units, const std::map<std::string, double>& names) {
  if (!doc.contains("decay")) return std::nullopt;
  const Json& d = doc.at("decay");
  check_keys(d, "decay", {"gamma", "gamma_units", "channels", "leakage_branching"});
  if (!d.contains("gamma")) fail("decay.gamma", "required");
  DecayModel model;
  double gamma = eval_value(d.at("gamma"), "decay.gamma", names);
  if (gamma < 0.0) fail("decay.gamma", "must be non-negative");
  const auto gu = get_string(d, "gamma_units", "decay", "same", {"same", "kHz", "per-second"});
  if (gu == "same") {
    gamma *= units.freq;
  } else {
    if (units.system != UnitSystem::kTwoPiMHz) fail("decay.gamma_units", "'" + gu + "' requires two-pi-mhz units");
    gamma *= gu == "kHz" ? 1e3 : 1.0;
  }
  model.gamma = gamma;
  model.channels = get_string(d, "channels", "decay", "two", {"two", "three"}) == "three"
                       ? DecayChannels::kThreeChannel
                       : DecayChannels::kTwoChannel;
  model.branching = get_string(d, "leakage_branching", "decay", "fixed-total", {"fixed-total", "extra-half"}) ==
                            "extra-half"
                        ? LeakageBranching::kExtraHalf
                        : LeakageBranching::kFixedTotal;
  if (gamma == 0.0) return std::nullopt;
  return model;
}

void check_state_name(const std::string& name, const HilbertSpace& space, const std::string& path) {
  if (name == "psi" || name == "phi") return;
  try {
    basis_ket(space, name);
  } catch (const std::exception& e) {
    fail(path, "'" + name + "' is neither psi, phi nor a basis label: " + e.what());
  }
}

// Builds one point from a document with every patch applied.
PointSpec build_point(const Json& doc) {
  check_keys(doc, "", kTopLevelKeys);
  PointSpec p;
  const Units units = parse_units(doc);
  p.units = units.system;

  const int atoms = get_int(doc, "atoms", "", 3);
  if (atoms != 3 && atoms != 4) fail("atoms", "must be 3 or 4");
  const bool leakage = get_bool(doc, "leakage", "", false);

  std::map<std::string, double> names;
  if (doc.contains("variables")) {
    const Json& vars = doc.at("variables");
    if (!vars.is_object()) fail("variables", "expected an object");
    for (const auto& [key, value] : vars.items()) names[key] = eval_value(value, "variables." + key, names);
  }

  if (!doc.contains("drives")) fail("drives", "required");
  const Json& drv = doc.at("drives");
  check_keys(drv, "drives", {"omega_prime", "omega_dprime", "omega_ctrl3", "omega1", "omega2", "delta"});
  const auto drive = [&](const char* key, bool required) -> std::optional<double> {
    if (!drv.contains(key)) {
      if (required) fail(join("drives", key), "required");
      return std::nullopt;
    }
    if (names.count(key)) fail(join("drives", key), "name clashes with a variable");
    const double v = eval_value(drv.at(key), join("drives", key), names);
    names[key] = v;
    return v;
  };
  DriveParams dp;
  dp.omega_prime = *drive("omega_prime", true) * units.freq;
  dp.delta = *drive("delta", true) * units.freq;
  dp.omega1 = *drive("omega1", true) * units.freq;
  dp.omega2 = *drive("omega2", true) * units.freq;
  if (const auto v = drive("omega_dprime", false)) dp.omega_dprime = *v * units.freq;
  if (const auto v = drive("omega_ctrl3", false)) {
    if (atoms != 4) fail("drives.omega_ctrl3", "only meaningful with 4 atoms");
    dp.omega_ctrl3 = *v * units.freq;
  }

  InteractionGraph graph = parse_interactions(doc, atoms, units, names);
  const auto decay = parse_decay(doc, units, names);
  try {
    p.model = SystemModel(build_space(atoms, leakage), dp, graph, decay);
  } catch (const std::invalid_argument& e) {
    fail("model", e.what());
  }

  const auto ham = get_string(doc, "hamiltonian", "", "full", {"full", "rotated", "effective"});
  p.hamiltonian = ham == "full" ? HamiltonianKind::kFull
                  : ham == "rotated" ? HamiltonianKind::kRotated
                                     : HamiltonianKind::kEffective;
  p.light_shift_correction =
      get_string(doc, "phase_correction", "", "light-shift", {"light-shift", "none"}) == "light-shift";

  if (doc.contains("integrator")) {
    const Json& ic = doc.at("integrator");
    check_keys(ic, "integrator", {"method", "dt", "steps_per_period", "rel_tol", "abs_tol"});
    p.integrator.method = get_string(ic, "method", "integrator", "rk4", {"rk4", "adaptive"}) == "adaptive"
                              ? IntegratorMethod::kAdaptive
                              : IntegratorMethod::kRk4;
    if (ic.contains("dt")) {
      p.integrator.dt = eval_value(ic.at("dt"), "integrator.dt", names) * units.time;
      if (p.integrator.dt < 0.0) fail("integrator.dt", "must be non-negative");
    }
    if (ic.contains("steps_per_period")) {
      p.integrator.steps_per_period = eval_value(ic.at("steps_per_period"), "integrator.steps_per_period", names);
      if (!(p.integrator.steps_per_period >= 40.0)) fail("integrator.steps_per_period", "must be at least 40");
    }
    if (ic.contains("rel_tol")) p.integrator.rel_tol = eval_value(ic.at("rel_tol"), "integrator.rel_tol", names);
    if (ic.contains("abs_tol")) p.integrator.abs_tol = eval_value(ic.at("abs_tol"), "integrator.abs_tol", names);
    if (!(p.integrator.rel_tol > 0.0) || !(p.integrator.abs_tol > 0.0)) fail("integrator", "tolerances must be positive");
  }

  std::string t_gate = "auto";
  if (doc.contains("timing")) {
    const Json& tm = doc.at("timing");
    check_keys(tm, "timing", {"t_gate", "samples"});
    p.samples = get_int(tm, "samples", "timing", 0);
    if (p.samples < 0) fail("timing.samples", "must be non-negative");
    if (tm.contains("t_gate") && !(tm.at("t_gate").is_string() && tm.at("t_gate").get<std::string>() == "auto")) {
      p.t_gate = eval_value(tm.at("t_gate"), "timing.t_gate", names) * units.time;
      if (p.t_gate < 0.0) fail("timing.t_gate", "must be non-negative");
      t_gate.clear();
    }
  }
  if (!t_gate.empty()) {
    try {
      p.t_gate = gate_time(dp.omega1, dp.omega2);
    } catch (const std::invalid_argument&) {
      fail("timing.t_gate", "auto needs omega1 or omega2 to be nonzero");
    }
  }
  if (p.samples > 1 && p.integrator.method != IntegratorMethod::kRk4) {
    fail("timing.samples", "time samples require the rk4 integrator");
  }

  if (doc.contains("outputs")) {
    const Json& out = doc.at("outputs");
    check_keys(out, "outputs", {"fidelity", "compare_effective", "initial_state", "populations"});
    p.fidelity = get_bool(out, "fidelity", "outputs", true);
    p.compare_effective = get_bool(out, "compare_effective", "outputs", false);
    p.initial_state = get_string(out, "initial_state", "outputs", "", {});
    if (!p.initial_state.empty()) check_state_name(p.initial_state, p.model.space, "outputs.initial_state");
    if (out.contains("populations")) {
      const Json& pops = out.at("populations");
      if (!pops.is_array()) fail("outputs.populations", "expected an array of state names");
      for (std::size_t i = 0; i < pops.size(); ++i) {
        const std::string path = "outputs.populations[" + std::to_string(i) + "]";
        if (!pops[i].is_string()) fail(path, "expected a string");
        check_state_name(pops[i].get<std::string>(), p.model.space, path);
        p.populations.push_back(pops[i].get<std::string>());
      }
    }
    if (!p.populations.empty() && p.initial_state.empty()) {
      fail("outputs.populations", "needs outputs.initial_state");
    }
  }
  if ((p.initial_state == "psi" || p.initial_state == "phi") && p.model.space.n_atoms() < 2) {
    fail("outputs.initial_state", "probe states need at least two atoms");
  }
  return p;
}

Json::json_pointer to_pointer(const std::string& path, const std::string& field) {
  if (path.empty()) fail(field, "empty path");
  std::string p = path;
  for (char& c : p) {
    if (c == '.') c = '/';
  }
  if (p.front() != '/') p.insert(p.begin(), '/');
  try {
    return Json::json_pointer(p);
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
}

struct Axis {
  std::string name;
  Json::json_pointer pointer;
  std::vector<double> values;
};

std::vector<double> axis_values(const Json& axis, const std::string& path) {
  const int forms = static_cast<int>(axis.contains("values")) + static_cast<int>(axis.contains("linspace")) +
                    static_cast<int>(axis.contains("logspace"));
  if (forms != 1) fail(path, "exactly one of values, linspace, logspace is required");
  std::vector<double> out;
  if (axis.contains("values")) {
    const Json& v = axis.at("values");
    if (!v.is_array()) fail(path + ".values", "expected an array of numbers");
    for (const auto& x : v) {
      if (!x.is_number()) fail(path + ".values", "expected numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  const bool log = axis.contains("logspace");
  const std::string key = log ? "logspace" : "linspace";
  const Json& r = axis.at(key);
  if (!r.is_array() || r.size() != 3 || !r[0].is_number() || !r[1].is_number() || !r[2].is_number_integer()) {
    fail(path + "." + key, "expected [start, stop, count]");
  }
  const double a = r[0].get<double>();
  const double b = r[1].get<double>();
  const int n = r[2].get<int>();
  if (n < 1) fail(path + "." + key, "count must be positive");
  if (log && (!(a > 0.0) || !(b > 0.0))) fail(path + ".logspace", "bounds must be positive");
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
  }
  if (n > 1) out.back() = b;
  return out;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(Json doc) {
  if (!doc.is_object()) fail("config", "top level must be an object");
  if (!doc.contains("schema_version")) fail("schema_version", "required");
  if (!doc.at("schema_version").is_number_integer() || doc.at("schema_version").get<int>() != kScenarioSchemaVersion) {
    fail("schema_version", "unsupported (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }
  ScenarioConfig cfg;
  cfg.name_ = get_string(doc, "name", "", "", {});
  if (cfg.name_.empty()) fail("name", "required");
  cfg.doc_ = std::move(doc);
  expand_points(cfg);
  return cfg;
}

ScenarioConfig ScenarioConfig::from_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(std::move(doc));
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

SweepLayout expand_points(const ScenarioConfig& config) {
  const Json& doc = config.document();
  check_keys(doc, "", kTopLevelKeys);

  std::vector<Axis> axes;
  bool list_mode = false;
  if (doc.contains("sweep")) {
    const Json& sw = doc.at("sweep");
    check_keys(sw, "sweep", {"mode", "axes"});
    list_mode = get_string(sw, "mode", "sweep", "grid", {"grid", "list"}) == "list";
    if (!sw.contains("axes") || !sw.at("axes").is_array() || sw.at("axes").empty()) {
      fail("sweep.axes", "expected a non-empty array");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < sw.at("axes").size(); ++i) {
      const Json& a = sw.at("axes")[i];
      const std::string path = "sweep.axes[" + std::to_string(i) + "]";
      check_keys(a, path, {"path", "name", "values", "linspace", "logspace"});
      if (!a.contains("path") || !a.at("path").is_string()) fail(path + ".path", "required string");
      const auto target = a.at("path").get<std::string>();
      Axis axis;
      axis.pointer = to_pointer(target, path + ".path");
      if (!doc.contains(axis.pointer)) fail(path + ".path", "'" + target + "' does not exist in the config");
      if (!doc.at(axis.pointer).is_primitive()) fail(path + ".path", "'" + target + "' is not a scalar parameter");
      axis.name = a.contains("name") ? get_string(a, "name", path, "", {}) : axis.pointer.back();
      if (!seen.insert(axis.name).second) fail(path + ".name", "duplicate axis name '" + axis.name + "'");
      axis.values = axis_values(a, path);
      axes.push_back(std::move(axis));
    }
    if (list_mode) {
      for (const auto& a : axes) {
        if (a.values.size() != axes.front().values.size()) fail("sweep.axes", "list mode needs equal-length axes");
      }
    }
  }

  struct Case {
    std::string label;
    std::vector<std::pair<Json::json_pointer, Json>> patches;
  };
  std::vector<Case> cases;
  SweepLayout layout;
  if (doc.contains("cases")) {
    const Json& cs = doc.at("cases");
    if (!cs.is_array() || cs.empty()) fail("cases", "expected a non-empty array");
    layout.has_cases = true;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string path = "cases[" + std::to_string(i) + "]";
      check_keys(cs[i], path, {"label", "set"});
      Case c;
      c.label = get_string(cs[i], "label", path, "", {});
      if (c.label.empty()) fail(path + ".label", "required");
      if (cs[i].contains("set")) {
        const Json& set = cs[i].at("set");
        if (!set.is_object()) fail(path + ".set", "expected an object of path: value");
        for (const auto& [key, value] : set.items()) {
          const auto ptr = to_pointer(key, path + ".set." + key);
          if (!doc.contains(ptr.parent_pointer())) fail(path + ".set." + key, "parent of '" + key + "' does not exist");
          c.patches.emplace_back(ptr, value);
        }
      }
      cases.push_back(std::move(c));
    }
  } else {
    cases.push_back(Case{});
  }

  std::vector<std::vector<double>> grid;
  if (axes.empty()) {
    grid.emplace_back();
  } else if (list_mode) {
    for (std::size_t i = 0; i < axes.front().values.size(); ++i) {
      std::vector<double> point;
      for (const auto& a : axes) point.push_back(a.values[i]);
      grid.push_back(std::move(point));
    }
  } else {
    grid.emplace_back();
    for (const auto& a : axes) {
      std::vector<std::vector<double>> next;
      for (const auto& prefix : grid) {
        for (double v : a.values) {
          auto point = prefix;
          point.push_back(v);
          next.push_back(std::move(point));
        }
      }
      grid = std::move(next);
    }
  }

  for (const auto& a : axes) layout.axis_names.push_back(a.name);
  for (const auto& c : cases) {
    Json base = doc;
    for (const auto& [ptr, value] : c.patches) base[ptr] = value;
    for (const auto& point : grid) {
      Json patched = base;
      for (std::size_t i = 0; i < axes.size(); ++i) patched[axes[i].pointer] = point[i];
      PointSpec spec;
      try {
        spec = build_point(patched);
      } catch (const ConfigError& e) {
        if (c.label.empty()) throw;
        throw ConfigError("case '" + c.label + "': " + e.what());
      }
      spec.case_label = c.label;
      spec.coordinates = point;
      layout.points.push_back(std::move(spec));
    }
  }
  return layout;
}

}  // namespace rydgate
