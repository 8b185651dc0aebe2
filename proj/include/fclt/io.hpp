#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fclt {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// A CSV table: header row plus numeric rows. Empty cells and "nan" read as NaN.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column; IoError when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// Comma separated, '.' decimal, LF line endings, 17 significant digits.
std::string format_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& t);

/// A sample: the "x" column of a CSV, or the only column when there is one.
std::vector<double> read_sample_csv(const std::string& path);
void write_sample_csv(const std::string& path, const std::vector<double>& x);

nlohmann::json read_json(const std::string& path);
/// Pretty printed with a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);
void write_text(const std::string& path, const std::string& text);

/// What produced an output. The hash covers command, config fingerprint,
/// seed and version only, so it is identical across thread counts; wall time
/// and threads go to the sidecar.
struct RunManifest {
  std::string command;
  std::uint64_t config_fingerprint = 0;
  std::uint64_t seed = 0;
  std::string version = kToolkitVersion;
  double wall_seconds = 0.0;
  int threads = 0;
  std::vector<std::string> outputs;

  std::string hash() const;
};

nlohmann::json to_json(const RunManifest& m);
/// Writes `<out>.manifest.json`.
void write_manifest_sidecar(const std::string& out, const RunManifest& m);

}  // namespace fclt
