#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rydgate/errors.hpp"
#include "rydgate/scenario.hpp"

namespace rydgate {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json table_json(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (const auto& cell : row) {
      if (const double* v = std::get_if<double>(&cell)) {
        if (std::isfinite(*v)) {
          r.push_back(round_emitted(*v));
        } else {
          r.push_back(nullptr);
        }
      } else {
        r.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(std::move(r));
  }
  Json out;
  out["columns"] = table.columns;
  out["rows"] = std::move(rows);
  return out;
}

Table table_from_json(const Json& j) {
  Table t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    std::vector<Cell> cells;
    for (const auto& v : row) {
      if (v.is_null()) {
        cells.emplace_back(std::numeric_limits<double>::quiet_NaN());
      } else if (v.is_number()) {
        cells.emplace_back(v.get<double>());
      } else {
        cells.emplace_back(v.get<std::string>());
      }
    }
    if (cells.size() != t.columns.size()) throw std::runtime_error("sweep JSON: row width differs from columns");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace

double round_emitted(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

EmitFormat parse_format(const std::string& name) {
  if (name == "csv") return EmitFormat::kCsv;
  if (name == "json") return EmitFormat::kJson;
  throw ConfigError("format: '" + name + "' is not csv or json");
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_field(table.columns[i]);
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      if (const double* v = std::get_if<double>(&row[i])) {
        out << format_number(*v);
      } else {
        out << csv_field(std::get<std::string>(row[i]));
      }
    }
    out << "\n";
  }
}

void write_json(const SweepResult& result, std::ostream& out) {
  Json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["name"] = result.name;
  const Json table = table_json(result.table);
  doc["columns"] = table.at("columns");
  doc["rows"] = table.at("rows");
  if (!result.trajectory.columns.empty()) doc["trajectory"] = table_json(result.trajectory);
  out << doc.dump(1) << "\n";
}

void emit(const SweepResult& result, EmitFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (format == EmitFormat::kCsv) {
    write_csv(result.table, out);
  } else {
    write_json(result, out);
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

SweepResult load_sweep_json(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("sweep JSON: ") + e.what());
  }
  if (!doc.contains("schema_version") || doc.at("schema_version") != kScenarioSchemaVersion) {
    throw std::runtime_error("sweep JSON: unsupported schema_version");
  }
  SweepResult r;
  r.name = doc.value("name", "");
  r.table = table_from_json(doc);
  if (doc.contains("trajectory")) r.trajectory = table_from_json(doc.at("trajectory"));
  return r;
}

}  // namespace rydgate
