#include <map>

#include "rydgate/errors.hpp"
#include "rydgate/scenario.hpp"

namespace rydgate {

namespace {

struct Preset {
  const char* description;
  const char* document;
};

const std::map<std::string, Preset>& registry() {
  static const std::map<std::string, Preset> presets{
      {"fig3a",
       {"Fidelity versus time for omega1 in {0.025, 0.05, 0.075}, full and effective Hamiltonians (41 time samples).",
        R"({
  "schema_version": 1,
  "name": "fig3a",
  "units": "omega-prime-relative",
  "atoms": 3,
  "drives": {"omega_prime": 1, "omega1": 0.05, "omega2": "-omega1", "delta": 50},
  "interactions": {"relative": {"U12": "delta/8", "U13": "delta", "U23": "delta"}},
  "timing": {"t_gate": "auto", "samples": 41},
  "sweep": {"axes": [{"path": "drives/omega1", "values": [0.025, 0.05, 0.075]}]},
  "outputs": {"fidelity": true, "compare_effective": true}
})"}},
      {"fig3b",
       {"Deviation of U13 = U23 = (1 + eta_delta) delta from the pumping condition, 21 points in [-0.02, 0.02].",
        R"({
  "schema_version": 1,
  "name": "fig3b",
  "units": "omega-prime-relative",
  "atoms": 3,
  "variables": {"eta_delta": 0},
  "drives": {"omega_prime": 1, "omega1": 0.05, "omega2": "-omega1", "delta": 50},
  "interactions": {"relative": {"U12": "delta/8", "U13": "(1 + eta_delta)*delta", "U23": "(1 + eta_delta)*delta"}},
  "sweep": {"axes": [{"path": "variables/eta_delta", "linspace": [-0.02, 0.02, 21]}]},
  "outputs": {"fidelity": true}
})"}},
      {"fig3c",
       {"Unequal control drives omega_dprime = (1 + eta_omega) omega_prime, 21 points in [-0.1, 0.1].",
        R"({
  "schema_version": 1,
  "name": "fig3c",
  "units": "omega-prime-relative",
  "atoms": 3,
  "variables": {"eta_omega": 0},
  "drives": {"omega_prime": 1, "omega_dprime": "(1 + eta_omega)*omega_prime", "omega1": 0.05, "omega2": "-omega1",
             "delta": 50},
  "interactions": {"relative": {"U12": "delta/8", "U13": "delta", "U23": "delta"}},
  "sweep": {"axes": [{"path": "variables/eta_omega", "linspace": [-0.1, 0.1, 21]}]},
  "outputs": {"fidelity": true}
})"}},
      {"fig3d",
       {"Control-control distance r (units of the spacing where U12 = delta) from 0.5 to 1.5 in steps of 0.05, plus "
        "the U12 = 2 delta point r = 0.8909.",
        R"({
  "schema_version": 1,
  "name": "fig3d",
  "units": "omega-prime-relative",
  "atoms": 3,
  "variables": {"distance": 1},
  "drives": {"omega_prime": 1, "omega1": 0.05, "omega2": "-omega1", "delta": 50},
  "interactions": {"relative": {"U12": "delta / distance^6", "U13": "delta", "U23": "delta"}},
  "sweep": {"axes": [{"path": "variables/distance",
                      "values": [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.8909, 0.9, 0.95, 1.0, 1.05, 1.1,
                                 1.15, 1.2, 1.25, 1.3, 1.35, 1.4, 1.45, 1.5]}]},
  "outputs": {"fidelity": true}
})"}},
      {"fig4",
       {"Fidelity versus decay rate gamma in [0.001, 0.01] (6 log-spaced points) for omega1 in {0.025, 0.05, 0.075} "
        "with two decay channels, plus omega1 = 0.05 with a third channel into an uncoupled level.",
        R"({
  "schema_version": 1,
  "name": "fig4",
  "units": "omega-prime-relative",
  "atoms": 3,
  "leakage": false,
  "drives": {"omega_prime": 1, "omega1": 0.05, "omega2": "-omega1", "delta": 50},
  "interactions": {"relative": {"U12": "delta/8", "U13": "delta", "U23": "delta"}},
  "decay": {"gamma": 0.001, "channels": "two", "leakage_branching": "fixed-total"},
  "sweep": {"axes": [{"path": "decay/gamma", "logspace": [0.001, 0.01, 6]}]},
  "cases": [
    {"label": "omega1=0.025", "set": {"drives/omega1": 0.025}},
    {"label": "omega1=0.05", "set": {"drives/omega1": 0.05}},
    {"label": "omega1=0.075", "set": {"drives/omega1": 0.075}},
    {"label": "omega1=0.05 leakage", "set": {"drives/omega1": 0.05, "leakage": true, "decay/channels": "three"}}
  ],
  "outputs": {"fidelity": true}
})"}},
      {"table1",
       {"Ten parameter rows in 2 pi x MHz with gamma = 3.125 kHz (ordinary rate, 1 / lifetime).",
        R"({
  "schema_version": 1,
  "name": "table1",
  "units": "two-pi-mhz",
  "atoms": 3,
  "variables": {"U12": 6.25, "U": 50},
  "drives": {"omega_prime": 1, "omega_dprime": 1, "omega1": 0.05, "omega2": "-omega1", "delta": 50},
  "interactions": {"relative": {"U12": "U12", "U13": "U", "U23": "U"}},
  "decay": {"gamma": 3.125, "gamma_units": "kHz", "channels": "two"},
  "sweep": {"mode": "list", "axes": [
    {"path": "variables/U12", "values": [6.25, 6.25, 6.25, 6.25, 6.25, 6.25, 50, 50, 50, 0.78125]},
    {"path": "variables/U", "values": [50, 50, 49.5, 49.5, 50.5, 50.5, 50, 49.5, 50.5, 50]},
    {"path": "drives/omega_dprime", "values": [1, 2, 1, 2, 1, 2, 1, 2, 1, 2]}
  ]},
  "outputs": {"fidelity": true}
})"}},
      {"fig6a",
       {"Four-atom gate, U12 = U13 = U23 = delta/27, U_i4 = delta: populations of |phi> and |psi> from |psi>, full "
        "and effective Hamiltonians (41 time samples).",
        R"({
  "schema_version": 1,
  "name": "fig6a",
  "units": "omega-prime-relative",
  "atoms": 4,
  "drives": {"omega_prime": 1, "omega1": 0.05, "omega2": "-omega1", "delta": 50},
  "interactions": {"relative": {"U12": "delta/27", "U13": "delta/27", "U23": "delta/27",
                                "U14": "delta", "U24": "delta", "U34": "delta"}},
  "timing": {"t_gate": "auto", "samples": 41},
  "outputs": {"fidelity": false, "compare_effective": true, "initial_state": "psi", "populations": ["phi", "psi"]}
})"}},
      {"fig6b",
       {"Four-atom gate, U13 = delta/64, U12 = U23 = delta/8, U_i4 = delta: populations of |phi> and |psi> from "
        "|psi>, full and effective Hamiltonians (41 time samples).",
        R"({
  "schema_version": 1,
  "name": "fig6b",
  "units": "omega-prime-relative",
  "atoms": 4,
  "drives": {"omega_prime": 1, "omega1": 0.05, "omega2": "-omega1", "delta": 50},
  "interactions": {"relative": {"U12": "delta/8", "U13": "delta/64", "U23": "delta/8",
                                "U14": "delta", "U24": "delta", "U34": "delta"}},
  "timing": {"t_gate": "auto", "samples": 41},
  "outputs": {"fidelity": false, "compare_effective": true, "initial_state": "psi", "populations": ["phi", "psi"]}
})"}},
  };
  return presets;
}

const Preset& lookup(const std::string& name) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) {
    std::string known;
    for (const auto& [k, v] : r) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

std::string preset_description(const std::string& name) { return lookup(name).description; }

Json preset_document(const std::string& name) { return Json::parse(lookup(name).document); }

ScenarioConfig preset(const std::string& name) { return ScenarioConfig::from_json(preset_document(name)); }

}  // namespace rydgate
