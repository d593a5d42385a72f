#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cslcosmo/config.hpp"

namespace cslcosmo {

inline constexpr const char* kVersion = "0.1.0";

// Small tabular payload. Cells are stored pre-formatted (%.17g for numbers)
// so CSV and JSON emission produce identical digits; numeric columns are
// re-emitted as JSON numbers.
struct Table {
  std::vector<std::string> columns;
  std::vector<bool> numeric;
  std::vector<std::vector<std::string>> rows;

  explicit Table(std::vector<std::string> cols)
      : columns(std::move(cols)), numeric(columns.size(), true) {}

  void mark_text(std::size_t col) { numeric.at(col) = false; }
  void add_row(std::vector<std::string> cells);
};

std::string format_cell(double v);  // %.17g

// CSV dialect: comma separated, '.' decimal, header row, LF endings.
std::string table_to_csv(const Table& t);

nlohmann::ordered_json table_to_json(const Table& t);

// Run manifest: tool id, version, command, seed, and the full resolved config
// both as a map and as reparseable text. Contains no timestamps, so repeated
// runs are byte-identical.
nlohmann::ordered_json manifest_json(const std::string& command, const RunConfig& cfg);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Emit a table according to cfg.output.format:
//   csv:  <path> gets the table, <path>.manifest.json the manifest + summary
//   json: <path> gets one document {manifest, summary, columns, data}
// `summary` carries per-command scalars (fit results, verdicts, ...).
void emit_table(const Table& t, const std::string& command, const RunConfig& cfg,
                const std::string& path, const std::string& format,
                const nlohmann::ordered_json& summary = nlohmann::ordered_json::object());

// Load a config from either a key = value file or a manifest JSON produced by
// emit_table (detected by a leading '{'); manifest reruns reconstruct the
// exact resolved configuration.
RunConfig load_config_any(const std::string& path, const PhysicalConstants& pc);

}  // namespace cslcosmo
