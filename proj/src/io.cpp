#include "cslcosmo/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cslcosmo {

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw std::invalid_argument("table row width does not match header");
  rows.push_back(std::move(cells));
}

std::string format_cell(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string table_to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

nlohmann::ordered_json table_to_json(const Table& t) {
  nlohmann::ordered_json out;
  out["columns"] = t.columns;
  nlohmann::ordered_json data = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (t.numeric[i])
        r.push_back(std::strtod(row[i].c_str(), nullptr));
      else
        r.push_back(row[i]);
    }
    data.push_back(std::move(r));
  }
  out["data"] = std::move(data);
  return out;
}

nlohmann::ordered_json manifest_json(const std::string& command, const RunConfig& cfg) {
  nlohmann::ordered_json m;
  m["tool"] = "cslcosmo";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = cfg.ensemble.seed;
  m["config_text"] = config_to_text(cfg);
  nlohmann::ordered_json flat;
  for (const auto& [key, val] : cfg.resolved) flat[key] = val;
  m["config"] = std::move(flat);
  return m;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit_table(const Table& t, const std::string& command, const RunConfig& cfg,
                const std::string& path, const std::string& format,
                const nlohmann::ordered_json& summary) {
  nlohmann::ordered_json manifest = manifest_json(command, cfg);
  if (format == "csv") {
    write_text_file(path, table_to_csv(t));
    nlohmann::ordered_json side;
    side["manifest"] = std::move(manifest);
    if (!summary.empty()) side["summary"] = summary;
    write_text_file(path + ".manifest.json", side.dump(2) + "\n");
  } else if (format == "json") {
    nlohmann::ordered_json doc;
    doc["manifest"] = std::move(manifest);
    if (!summary.empty()) doc["summary"] = summary;
    nlohmann::ordered_json tbl = table_to_json(t);
    doc["columns"] = std::move(tbl["columns"]);
    doc["data"] = std::move(tbl["data"]);
    write_text_file(path, doc.dump(2) + "\n");
  } else {
    throw std::invalid_argument("unknown output format: " + format);
  }
}

RunConfig load_config_any(const std::string& path, const PhysicalConstants& pc) {
  const std::string text = read_text_file(path);
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const nlohmann::ordered_json doc = nlohmann::ordered_json::parse(text);
    const nlohmann::ordered_json& m =
        doc.contains("manifest") ? doc.at("manifest") : doc;
    return parse_config_text(m.at("config_text").get<std::string>(), pc);
  }
  return parse_config_text(text, pc);
}

}  // namespace cslcosmo
