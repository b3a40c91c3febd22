#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rydgate/errors.hpp"
#include "rydgate/scenario.hpp"

using namespace rydgate;

namespace {

// Short gate window keeps these runs cheap; physics is covered elsewhere.
const char* kSmallConfig = R"({
  "schema_version": 1,
  "name": "small",
  "units": "omega-prime-relative",
  "atoms": 3,
  "variables": {"eta": 0},
  "drives": {"omega_prime": 1, "omega1": 0.05, "omega2": "-omega1", "delta": 50},
  "interactions": {"relative": {"U12": "delta/8", "U13": "(1 + eta)*delta", "U23": "(1 + eta)*delta"}},
  "timing": {"t_gate": 2},
  "outputs": {"fidelity": true}
})";

Json small_doc() { return Json::parse(kSmallConfig); }

std::string config_error(const Json& doc) {
  try {
    ScenarioConfig::from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string csv_of(const Table& t) {
  std::ostringstream out;
  write_csv(t, out);
  return out.str();
}

bool has(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

}  // namespace

TEST(ScenarioConfig, ValidationNamesTheField) {
  auto doc = small_doc();
  doc.erase("units");
  EXPECT_TRUE(has(config_error(doc), "units: required"));

  doc = small_doc();
  doc["units"] = "MHz";
  EXPECT_TRUE(has(config_error(doc), "units: 'MHz' is not one of"));

  doc = small_doc();
  doc["drives"]["omega_4"] = 1;
  EXPECT_TRUE(has(config_error(doc), "drives.omega_4: unknown field"));

  doc = small_doc();
  doc["drives"].erase("delta");
  EXPECT_TRUE(has(config_error(doc), "drives.delta: required"));

  doc = small_doc();
  doc["drives"]["delta"] = "Delta/2";
  EXPECT_TRUE(has(config_error(doc), "drives.delta"));

  doc = small_doc();
  doc["drives"]["omega_prime"] = -1;
  EXPECT_TRUE(has(config_error(doc), "model: SystemModel: omega_prime must be positive"));

  doc = small_doc();
  doc["interactions"]["matrix"] = Json::array();
  EXPECT_TRUE(has(config_error(doc), "interactions: exactly one of"));

  doc = small_doc();
  doc["interactions"]["relative"]["U31"] = 1;
  EXPECT_TRUE(has(config_error(doc), "interactions.relative.U31"));

  doc = small_doc();
  doc["schema_version"] = 2;
  EXPECT_TRUE(has(config_error(doc), "schema_version: unsupported"));

  doc = small_doc();
  doc["atoms"] = 5;
  EXPECT_TRUE(has(config_error(doc), "atoms: must be 3 or 4"));

  doc = small_doc();
  doc["decay"] = {{"gamma", 3.125}, {"gamma_units", "kHz"}};
  EXPECT_TRUE(has(config_error(doc), "decay.gamma_units"));

  doc = small_doc();
  doc["integrator"] = {{"method", "adaptive"}};
  doc["timing"]["samples"] = 5;
  EXPECT_TRUE(has(config_error(doc), "timing.samples"));

  doc = small_doc();
  doc["integrator"] = {{"steps_per_period", 10}};
  EXPECT_TRUE(has(config_error(doc), "integrator.steps_per_period"));

  doc = small_doc();
  doc["outputs"]["populations"] = {"phi"};
  EXPECT_TRUE(has(config_error(doc), "outputs.populations: needs outputs.initial_state"));

  doc = small_doc();
  doc["outputs"]["initial_state"] = "11x";
  EXPECT_TRUE(has(config_error(doc), "outputs.initial_state"));

  doc = small_doc();
  doc["sweep"] = {{"axes", {{{"path", "drives/omega9"}, {"values", {1}}}}}};
  EXPECT_TRUE(has(config_error(doc), "sweep.axes[0].path: 'drives/omega9' does not exist"));

  doc = small_doc();
  doc["sweep"] = {{"axes", {{{"path", "drives"}, {"values", {1}}}}}};
  EXPECT_TRUE(has(config_error(doc), "not a scalar parameter"));

  doc = small_doc();
  doc["sweep"] = {{"axes", {{{"path", "variables/eta"}, {"values", {1}}, {"linspace", {0, 1, 3}}}}}};
  EXPECT_TRUE(has(config_error(doc), "exactly one of values, linspace, logspace"));

  doc = small_doc();
  doc["cases"] = {{{"label", "bad"}, {"set", {{"drives/delta", -5}}}}};
  EXPECT_TRUE(has(config_error(doc), "case 'bad': "));

  EXPECT_THROW(ScenarioConfig::from_text("{not json"), ConfigError);
  EXPECT_THROW(ScenarioConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST(ScenarioConfig, RelativeUnitsAndExpressions) {
  auto doc = small_doc();
  doc["variables"]["eta"] = 0.02;
  const auto layout = expand_points(ScenarioConfig::from_json(doc));
  ASSERT_EQ(layout.points.size(), 1u);
  const auto& p = layout.points[0];
  EXPECT_DOUBLE_EQ(p.model.interactions.u(0, 2), 51.0);
  EXPECT_DOUBLE_EQ(p.model.interactions.u(0, 1), 6.25);
  EXPECT_DOUBLE_EQ(p.model.drives.omega2, -0.05);
  EXPECT_DOUBLE_EQ(p.t_gate, 2.0);
  EXPECT_FALSE(p.model.decay.has_value());
  EXPECT_TRUE(p.light_shift_correction);
}

TEST(ScenarioConfig, TwoPiMegahertzUnits) {
  const auto layout = expand_points(preset("table1"));
  ASSERT_EQ(layout.points.size(), 10u);
  const auto& p = layout.points[0];
  const double mhz = 2.0 * std::numbers::pi * 1e6;
  EXPECT_DOUBLE_EQ(p.model.drives.delta, 50.0 * mhz);
  EXPECT_DOUBLE_EQ(p.model.interactions.u(0, 1), 6.25 * mhz);
  ASSERT_TRUE(p.model.decay.has_value());
  EXPECT_DOUBLE_EQ(p.model.decay->gamma, 3125.0);
  EXPECT_NEAR(p.t_gate * 1e6, 7.0711, 1e-4);
  EXPECT_DOUBLE_EQ(layout.points[9].model.interactions.u(0, 1), 0.78125 * mhz);
  EXPECT_DOUBLE_EQ(*layout.points[9].model.drives.omega_dprime, 2.0 * mhz);
}

TEST(ScenarioConfig, GeometryInteractions) {
  auto doc = small_doc();
  doc["units"] = "two-pi-mhz";
  doc["interactions"] = Json::parse(R"({"geometry": {"c6": 37.6946, "c6_unit": "THz*um^6",
      "positions": [[-10, 0], [10, 0], [0, 0]]}})");
  const auto p = expand_points(ScenarioConfig::from_json(doc)).points[0];
  const double mhz = 2.0 * std::numbers::pi * 1e6;
  EXPECT_NEAR(p.model.interactions.u(0, 2) / mhz, 37.6946, 1e-9);
  EXPECT_NEAR(p.model.interactions.u(0, 1) / mhz, 37.6946 / 64.0, 1e-9);

  doc["interactions"]["geometry"]["c6_angular"] = true;
  const auto q = expand_points(ScenarioConfig::from_json(doc)).points[0];
  EXPECT_NEAR(q.model.interactions.u(0, 2) / mhz, 37.6946 / (2.0 * std::numbers::pi), 1e-9);
}

TEST(ScenarioConfig, GridAndListOrdering) {
  auto doc = small_doc();
  doc["sweep"] = Json::parse(R"({"axes": [{"path": "drives/omega1", "values": [0.02, 0.04]},
                                          {"path": "variables/eta", "name": "eta_delta", "linspace": [0, 0.01, 3]}]})");
  const auto grid = expand_points(ScenarioConfig::from_json(doc));
  ASSERT_EQ(grid.points.size(), 6u);
  EXPECT_EQ(grid.axis_names, (std::vector<std::string>{"omega1", "eta_delta"}));
  EXPECT_EQ(grid.points[0].coordinates, (std::vector<double>{0.02, 0.0}));
  EXPECT_EQ(grid.points[2].coordinates, (std::vector<double>{0.02, 0.01}));
  EXPECT_EQ(grid.points[3].coordinates, (std::vector<double>{0.04, 0.0}));

  doc["sweep"]["mode"] = "list";
  EXPECT_TRUE(has(config_error(doc), "list mode needs equal-length axes"));
  doc["sweep"]["axes"][1].erase("linspace");
  doc["sweep"]["axes"][1]["values"] = {0.0, 0.01};
  const auto list = expand_points(ScenarioConfig::from_json(doc));
  ASSERT_EQ(list.points.size(), 2u);
  EXPECT_EQ(list.points[1].coordinates, (std::vector<double>{0.04, 0.01}));
  EXPECT_DOUBLE_EQ(list.points[1].model.interactions.u(1, 2), 50.5);
}

TEST(ScenarioConfig, LogspaceAxis) {
  auto doc = small_doc();
  doc["sweep"] = Json::parse(R"({"axes": [{"path": "drives/omega1", "logspace": [0.001, 0.1, 3]}]})");
  const auto layout = expand_points(ScenarioConfig::from_json(doc));
  ASSERT_EQ(layout.points.size(), 3u);
  EXPECT_NEAR(layout.points[1].coordinates[0], 0.01, 1e-15);
  EXPECT_NEAR(layout.points[2].coordinates[0], 0.1, 1e-15);
}

TEST(ScenarioRun, CasesAreCaseMajor) {
  auto doc = small_doc();
  doc["sweep"] = Json::parse(R"({"axes": [{"path": "drives/omega1", "values": [0.02, 0.04]}]})");
  doc["cases"] = Json::parse(R"([{"label": "plain"}, {"label": "shifted", "set": {"variables/eta": 0.01}}])");
  const auto r = run_scenario(ScenarioConfig::from_json(doc));
  ASSERT_EQ(r.table.rows.size(), 4u);
  EXPECT_EQ(r.table.columns.front(), "case");
  EXPECT_EQ(std::get<std::string>(r.table.rows[0][0]), "plain");
  EXPECT_EQ(std::get<std::string>(r.table.rows[2][0]), "shifted");
  EXPECT_DOUBLE_EQ(r.table.number(3, "omega1"), 0.04);
  EXPECT_NE(r.table.number(0, "fbar"), r.table.number(2, "fbar"));
}

TEST(ScenarioRun, DeterministicAndIndependentOfSchedule) {
  auto doc = small_doc();
  doc["sweep"] = Json::parse(R"({"axes": [{"path": "variables/eta", "values": [-0.01, 0.0, 0.01]}]})");
  const auto cfg = ScenarioConfig::from_json(doc);
  RunOptions serial, parallel;
  parallel.threads = 3;
  const auto a = run_scenario(cfg, serial);
  const auto b = run_scenario(cfg, serial);
  const auto c = run_scenario(cfg, parallel);
  EXPECT_EQ(csv_of(a.table), csv_of(b.table));
  EXPECT_EQ(csv_of(a.table), csv_of(c.table));

  auto single = small_doc();
  single["variables"]["eta"] = 0.01;
  const auto s = run_scenario(ScenarioConfig::from_json(single));
  EXPECT_EQ(s.table.number(0, "fbar"), a.table.number(2, "fbar"));
}

TEST(ScenarioRun, FailedRowsDoNotAbortTheSweep) {
  auto doc = small_doc();
  doc["integrator"] = {{"dt", 0.001}};
  doc["sweep"] = Json::parse(R"({"axes": [{"path": "integrator/dt", "values": [0.001, 0.5]}]})");
  const auto r = run_scenario(ScenarioConfig::from_json(doc));
  ASSERT_EQ(r.table.rows.size(), 2u);
  EXPECT_EQ(r.failed_rows, 1);
  EXPECT_EQ(std::get<std::string>(r.table.rows[0].back()), "ok");
  EXPECT_TRUE(std::get<std::string>(r.table.rows[1].back()).starts_with("error: "));
  EXPECT_TRUE(std::isnan(r.table.number(1, "fbar")));
  EXPECT_DOUBLE_EQ(r.table.number(1, "t_gate"), 2.0);
}

TEST(ScenarioRun, TrajectoriesAndPopulations) {
  auto doc = small_doc();
  doc["timing"]["samples"] = 5;
  doc["outputs"] = Json::parse(R"({"fidelity": true, "compare_effective": true, "initial_state": "110",
                                   "populations": ["110", "111"]})");
  RunOptions opts;
  opts.trajectories = true;
  const auto r = run_scenario(ScenarioConfig::from_json(doc), opts);
  EXPECT_EQ(r.table.columns, (std::vector<std::string>{"t_gate", "fbar", "fbar_effective", "max_effective_deviation",
                                                       "pop_110", "pop_110_effective", "pop_111",
                                                       "pop_111_effective", "max_population_deviation", "drift",
                                                       "flagged", "status"}));
  ASSERT_EQ(r.trajectory.rows.size(), 5u);
  EXPECT_DOUBLE_EQ(r.trajectory.number(0, "t"), 0.0);
  EXPECT_DOUBLE_EQ(r.trajectory.number(4, "t"), 2.0);
  EXPECT_DOUBLE_EQ(r.trajectory.number(0, "pop_110"), 1.0);
  // Effective evolution is the resonant lambda system 110 <-> 11r <-> 111
  // with equal and opposite drives.
  const double c = std::cos(0.05 * std::sqrt(2.0) * 2.0);
  EXPECT_NEAR(r.table.number(0, "pop_110_effective"), 0.25 * (1 + c) * (1 + c), 1e-9);
  EXPECT_NEAR(r.table.number(0, "pop_111_effective"), 0.25 * (1 - c) * (1 - c), 1e-9);
  EXPECT_NEAR(r.table.number(0, "pop_110"), r.table.number(0, "pop_110_effective"), 1e-3);
  EXPECT_LE(r.table.number(0, "max_population_deviation"), 1e-3);
}

TEST(ScenarioRun, FlagsNothingAtDefaultStep) {
  const auto r = run_scenario(ScenarioConfig::from_json(small_doc()));
  EXPECT_EQ(r.flagged_rows, 0);
  EXPECT_LT(r.table.number(0, "drift"), kDriftFlagThreshold);
  EXPECT_EQ(r.table.number(0, "flagged"), 0.0);
}

TEST(Presets, RegistryAndDocuments) {
  EXPECT_EQ(preset_names(), (std::vector<std::string>{"fig3a", "fig3b", "fig3c", "fig3d", "fig4", "fig6a", "fig6b",
                                                      "table1"}));
  for (const auto& name : preset_names()) {
    EXPECT_FALSE(preset_description(name).empty());
    EXPECT_EQ(preset(name).name(), name);
  }
  EXPECT_THROW(preset("fig9"), ConfigError);
}

TEST(Presets, SweepShapes) {
  EXPECT_EQ(expand_points(preset("fig3b")).points.size(), 21u);
  EXPECT_EQ(expand_points(preset("fig3c")).points.size(), 21u);

  const auto d = expand_points(preset("fig3d"));
  bool resonance = false;
  for (const auto& p : d.points) {
    if (p.coordinates[0] == 0.8909) {
      resonance = true;
      EXPECT_NEAR(p.model.interactions.u(0, 1), 100.0, 0.02);
    }
  }
  EXPECT_TRUE(resonance);
  EXPECT_DOUBLE_EQ(d.points.front().model.interactions.u(0, 1), 3200.0);

  const auto f4 = expand_points(preset("fig4"));
  ASSERT_EQ(f4.points.size(), 24u);
  EXPECT_NEAR(f4.points.front().model.decay->gamma, 0.001, 1e-15);
  EXPECT_NEAR(f4.points[5].model.decay->gamma, 0.01, 1e-15);
  EXPECT_EQ(f4.points.back().case_label, "omega1=0.05 leakage");
  EXPECT_TRUE(f4.points.back().model.space.has_leakage());
  EXPECT_EQ(f4.points.back().model.decay->channels, DecayChannels::kThreeChannel);

  const auto f6a = expand_points(preset("fig6a")).points.at(0);
  EXPECT_EQ(f6a.model.space.n_atoms(), 4);
  EXPECT_NEAR(f6a.model.interactions.u(0, 1), 50.0 / 27.0, 1e-12);
  const auto f6b = expand_points(preset("fig6b")).points.at(0);
  EXPECT_NEAR(f6b.model.interactions.u(0, 2), 50.0 / 64.0, 1e-12);
  EXPECT_NEAR(f6b.model.interactions.u(1, 3), 50.0, 1e-12);
}

TEST(Presets, Fig3aEmitsThreeRows) {
  const auto r = run_scenario(preset("fig3a"));
  const std::string csv = csv_of(r.table);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_TRUE(header.starts_with("omega1,t_gate,fbar,"));
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 3);
  const double expected[] = {0.998, 0.9972, 0.9914};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.table.number(i, "fbar"), expected[i], 0.003);
  EXPECT_EQ(r.flagged_rows, 0);
}

TEST(Emit, CsvQuotingAndNumbers) {
  Table t;
  t.columns = {"case", "value"};
  t.rows.push_back({std::string("a,b"), 0.1});
  t.rows.push_back({std::string("say \"hi\""), std::nan("")});
  t.rows.push_back({std::string("plain"), 1.0 / 3.0});
  EXPECT_EQ(csv_of(t), "case,value\n\"a,b\",0.1\n\"say \"\"hi\"\"\",nan\nplain,0.333333333333\n");
}

TEST(Emit, EmptySweepIsHeaderOnly) {
  Table t;
  t.columns = {"omega1", "fbar"};
  EXPECT_EQ(csv_of(t), "omega1,fbar\n");
}

TEST(Emit, JsonRoundTrip) {
  SweepResult r;
  r.name = "round";
  r.table.columns = {"case", "x", "fbar"};
  r.table.rows.push_back({std::string("one"), 0.1, 0.99612345678912345});
  r.table.rows.push_back({std::string("two"), 1e-7, std::nan("")});
  std::stringstream buf;
  write_json(r, buf);
  const Json doc = Json::parse(buf.str());
  EXPECT_EQ(doc.at("schema_version"), kScenarioSchemaVersion);
  EXPECT_TRUE(doc.at("rows")[1][2].is_null());

  buf.seekg(0);
  const SweepResult back = load_sweep_json(buf);
  EXPECT_EQ(back.name, "round");
  ASSERT_EQ(back.table.rows.size(), 2u);
  EXPECT_EQ(std::get<std::string>(back.table.rows[0][0]), "one");
  EXPECT_EQ(back.table.number(0, "fbar"), round_emitted(0.99612345678912345));
  EXPECT_TRUE(std::isnan(back.table.number(1, "fbar")));

  // Emitting the reloaded table reproduces the file byte for byte.
  std::stringstream again;
  write_json(back, again);
  EXPECT_EQ(again.str(), buf.str());
}

TEST(Emit, FilesAndFormats) {
  const auto dir = std::filesystem::temp_directory_path() / "rydgate_emit_test";
  std::filesystem::create_directories(dir);
  SweepResult r;
  r.name = "files";
  r.table.columns = {"x"};
  r.table.rows.push_back({2.5});
  emit(r, EmitFormat::kCsv, dir / "out.csv");
  std::ifstream in(dir / "out.csv");
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), "x\n2.5\n");
  EXPECT_EQ(parse_format("json"), EmitFormat::kJson);
  EXPECT_THROW(parse_format("xml"), std::exception);
  EXPECT_THROW(emit(r, EmitFormat::kJson, dir / "missing" / "out.json"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(Threads, EnvironmentFallback) {
  setenv("RYDGATE_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3);
  setenv("RYDGATE_THREADS", "many", 1);
  EXPECT_EQ(default_thread_count(), 1);
  unsetenv("RYDGATE_THREADS");
  EXPECT_EQ(default_thread_count(), 1);
}
