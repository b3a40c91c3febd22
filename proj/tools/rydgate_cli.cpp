#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rydgate/errors.hpp"
#include "rydgate/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string cell_text(const rydgate::Cell& c) {
  if (const double* v = std::get_if<double>(&c)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return buf;
  }
  return std::get<std::string>(c);
}

void print_summary(const rydgate::SweepResult& r) {
  const auto& t = r.table;
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cell_text(row[i]).size());
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::cout << (i ? "  " : "") << cells[i] << std::string(width[i] - cells[i].size(), ' ');
    }
    std::cout << "\n";
  };
  std::cout << r.name << ": " << t.rows.size() << " rows";
  if (r.failed_rows) std::cout << ", " << r.failed_rows << " failed";
  if (r.flagged_rows) std::cout << ", " << r.flagged_rows << " flagged";
  std::cout << "\n";
  line(t.columns);
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(cell_text(c));
    line(cells);
  }
}

struct EmitOptions {
  std::string path;
  std::string format;
  std::string trajectories;
};

rydgate::EmitFormat infer_format(const EmitOptions& e) {
  if (!e.format.empty()) return rydgate::parse_format(e.format);
  return std::filesystem::path(e.path).extension() == ".json" ? rydgate::EmitFormat::kJson
                                                               : rydgate::EmitFormat::kCsv;
}

int execute(const rydgate::ScenarioConfig& config, const EmitOptions& e, int threads, bool quiet) {
  rydgate::RunOptions opts;
  opts.threads = threads;
  opts.trajectories = !e.trajectories.empty() || (!e.path.empty() && infer_format(e) == rydgate::EmitFormat::kJson);
  if (!quiet) {
    opts.progress = [](int done, int total) { std::cerr << "\r[" << done << "/" << total << "]" << std::flush; };
  }
  const auto layout = rydgate::expand_points(config);
  if (!quiet && !layout.points.empty()) {
    for (const auto& w : layout.points.front().model.drives.regime_warnings()) std::cerr << "warning: " << w << "\n";
  }
  const rydgate::SweepResult result = rydgate::run_scenario(config, opts);
  if (!quiet) std::cerr << "\n";
  print_summary(result);
  if (!e.path.empty()) rydgate::emit(result, infer_format(e), e.path);
  if (!e.trajectories.empty()) {
    rydgate::SweepResult traj;
    traj.name = result.name;
    traj.table = result.trajectory;
    rydgate::emit(traj, rydgate::EmitFormat::kCsv, e.trajectories);
  }
  return result.failed_rows > 0 ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg one-step Toffoli gate simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = rydgate::default_thread_count();
  bool quiet = false;
  app.add_option("--threads", threads, "Worker threads (default: RYDGATE_THREADS or 1)")->check(CLI::Range(1, 1024));
  app.add_flag("-q,--quiet", quiet, "No progress output");

  EmitOptions emit;
  const auto add_emit = [&](CLI::App* sub) {
    sub->add_option("--emit", emit.path, "Write results to this file");
    sub->add_option("--format", emit.format, "csv or json (default: from the file extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--trajectories", emit.trajectories, "Write time-resolved samples as CSV");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a scenario config file");
  run->add_option("config", config_path, "Scenario JSON file")->required();
  add_emit(run);

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Run a built-in experiment");
  preset->add_option("name", preset_name, "Preset name (see list-presets)")->required();
  add_emit(preset);

  auto* list = app.add_subcommand("list-presets", "List built-in experiments");

  std::string show_name;
  auto* show = app.add_subcommand("show-preset", "Print a preset's config document");
  show->add_option("name", show_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& name : rydgate::preset_names()) {
        std::cout << name << "\t" << rydgate::preset_description(name) << "\n";
      }
      return 0;
    }
    if (*show) {
      std::cout << rydgate::preset_document(show_name).dump(2) << "\n";
      return 0;
    }
    if (*run) return execute(rydgate::ScenarioConfig::load(config_path), emit, threads, quiet);
    return execute(rydgate::preset(preset_name), emit, threads, quiet);
  } catch (const rydgate::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rydgate::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
