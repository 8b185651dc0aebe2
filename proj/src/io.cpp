#include "fclt/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fclt/error.hpp"
#include "fclt/process_spec.hpp"

namespace fclt {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t line) {
  const std::string s = trim(raw);
  if (s.empty() || s == "nan" || s == "NaN" || s == "null") return NAN;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw IoError("line " + std::to_string(line) + ": '" + s + "' is not a number");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw IoError("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& row : rows) v.push_back(row[c]);
  return v;
}

std::string format_csv(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      for (auto& c : cells) t.header.push_back(trim(c));
      continue;
    }
    if (cells.size() != t.header.size())
      throw IoError("line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                    " cells, header has " + std::to_string(t.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, lineno));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw IoError("CSV is empty (no header row)");
  return t;
}

CsvTable read_csv(const std::string& path) {
  try {
    return parse_csv(slurp(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_csv(const std::string& path, const CsvTable& t) { write_text(path, format_csv(t)); }

std::vector<double> read_sample_csv(const std::string& path) {
  const auto t = read_csv(path);
  if (t.header.size() == 1) return t.values(t.header[0]);
  return t.values("x");
}

void write_sample_csv(const std::string& path, const std::vector<double>& x) {
  CsvTable t;
  t.header = {"x"};
  t.rows.reserve(x.size());
  for (double v : x) t.rows.push_back({v});
  write_csv(path, t);
}

json read_json(const std::string& path) {
  const std::string text = slurp(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

std::string RunManifest::hash() const {
  std::ostringstream os;
  os << command << '|' << config_fingerprint << '|' << seed << '|' << version;
  std::ostringstream hex;
  hex << std::hex << fnv1a64(os.str());
  return hex.str();
}

json to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config_fingerprint", m.config_fingerprint},
          {"seed", m.seed},
          {"version", m.version},
          {"wall_seconds", m.wall_seconds},
          {"threads", m.threads},
          {"outputs", m.outputs},
          {"manifest_hash", m.hash()}};
}

void write_manifest_sidecar(const std::string& out, const RunManifest& m) {
  write_json(out + ".manifest.json", to_json(m));
}

}  // namespace fclt
