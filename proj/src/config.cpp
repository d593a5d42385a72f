#include "cslcosmo/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cslcosmo {

namespace {

constexpr double kSqrt8Pi = 5.0132565492620005;  // sqrt(8 pi)

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(int line_no, const std::string& line, const std::string& what) {
  std::ostringstream os;
  os << "config line " << line_no << " ('" << line << "'): " << what;
  throw std::invalid_argument(os.str());
}

double parse_double(const std::string& tok, int line_no, const std::string& line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size())
    fail(line_no, line, "not a number: '" + tok + "'");
  return v;
}

long long parse_int(const std::string& tok, int line_no, const std::string& line) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size())
    fail(line_no, line, "not an integer: '" + tok + "'");
  return v;
}

// A parsed "value [unit]" pair; unit empty when absent.
struct TaggedValue {
  std::string value;
  std::string unit;
};

TaggedValue split_unit(const std::string& rhs) {
  const std::size_t sp = rhs.find_last_of(" \t");
  if (sp == std::string::npos) return {rhs, ""};
  const std::string tail = trim(rhs.substr(sp + 1));
  if (tail == "planck" || tail == "si") return {trim(rhs.substr(0, sp)), tail};
  return {rhs, ""};
}

enum class Unit { None, Length, Rate, Mass };

// converts to code units; rejects tags that make no sense for the key
double physical(const TaggedValue& tv, Unit kind, const PhysicalConstants& pc,
                int line_no, const std::string& line) {
  const double raw = parse_double(tv.value, line_no, line);
  if (tv.unit.empty() || tv.unit == "planck") return raw;
  switch (kind) {
    case Unit::Length: return pc.rc_from_si(raw);
    case Unit::Rate: return pc.rate_from_si(raw);
    case Unit::Mass: return raw / pc.mass_unit_kg();
    case Unit::None: fail(line_no, line, "dimensionless key takes no unit tag");
  }
  return raw;
}

double pure(const TaggedValue& tv, int line_no, const std::string& line) {
  if (!tv.unit.empty() && tv.unit != "planck")
    fail(line_no, line, "dimensionless key takes no unit tag");
  return parse_double(tv.value, line_no, line);
}

SpectrumRoute parse_route(const std::string& s, int line_no, const std::string& line) {
  if (s == "lindblad") return SpectrumRoute::Lindblad;
  if (s == "quadrature") return SpectrumRoute::Quadrature;
  if (s == "ensemble") return SpectrumRoute::Ensemble;
  if (s == "closed-form") return SpectrumRoute::ClosedForm;
  fail(line_no, line, "unknown route '" + s + "'");
}

const char* route_name(SpectrumRoute r) {
  switch (r) {
    case SpectrumRoute::Lindblad: return "lindblad";
    case SpectrumRoute::Quadrature: return "quadrature";
    case SpectrumRoute::Ensemble: return "ensemble";
    case SpectrumRoute::ClosedForm: return "closed-form";
  }
  return "lindblad";
}

}  // namespace

double PhysicalConstants::length_unit_m() const { return kSqrt8Pi * planck_length_m; }
double PhysicalConstants::time_unit_s() const { return kSqrt8Pi * planck_time_s; }
double PhysicalConstants::mass_unit_kg() const { return planck_mass_kg / kSqrt8Pi; }
double PhysicalConstants::nucleon_reduced() const { return nucleon_mass_kg / mass_unit_kg(); }

PhysicalConstants load_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open constants file: " + path);
  PhysicalConstants pc;
  std::string line, section;
  int line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[' && s.back() == ']') {
      section = trim(s.substr(1, s.size() - 2));
      if (section != "constants") fail(line_no, line, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line_no, line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (!seen.insert(key).second) fail(line_no, line, "duplicate key '" + key + "'");
    const double v = parse_double(val, line_no, line);
    if (key == "planck_length_m") pc.planck_length_m = v;
    else if (key == "planck_time_s") pc.planck_time_s = v;
    else if (key == "planck_mass_kg") pc.planck_mass_kg = v;
    else if (key == "nucleon_mass_kg") pc.nucleon_mass_kg = v;
    else fail(line_no, line, "unknown constants key '" + key + "'");
  }
  return pc;
}

RunConfig parse_config_text(const std::string& text, const PhysicalConstants& pc) {
  RunConfig cfg;
  cfg.constants = pc;
  cfg.csl.m0 = pc.nucleon_reduced();

  bool have_gamma = false, have_lambda = false;
  double lambda_pl = 0.0;

  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  std::set<std::string> seen;

  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[' && s.back() == ']') {
      section = trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> known = {"cosmology", "csl",     "numerics",
                                                  "spectrum",  "grid",    "scan",
                                                  "output"};
      if (!known.count(section)) fail(line_no, line, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line_no, line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string rhs = trim(s.substr(eq + 1));
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) fail(line_no, line, "duplicate key '" + full + "'");
    const TaggedValue tv = split_unit(rhs);

    if (section == "cosmology") {
      if (key == "h_inf") cfg.cosmo.h_end = physical(tv, Unit::Rate, pc, line_no, line);
      else if (key == "epsilon1") cfg.cosmo.eps1 = pure(tv, line_no, line);
      else if (key == "epsilon2") cfg.cosmo.eps2 = pure(tv, line_no, line);
      else if (key == "delta_n") cfg.delta_n = pure(tv, line_no, line);
      else fail(line_no, line, "unknown key '" + full + "'");
    } else if (section == "csl") {
      if (key == "gamma") {
        cfg.csl.gamma = physical(tv, Unit::None, pc, line_no, line);
        have_gamma = true;
      } else if (key == "lambda") {
        lambda_pl = physical(tv, Unit::Rate, pc, line_no, line);
        have_lambda = true;
      } else if (key == "r_c") cfg.csl.r_c = physical(tv, Unit::Length, pc, line_no, line);
      else if (key == "m0") cfg.csl.m0 = physical(tv, Unit::Mass, pc, line_no, line);
      else if (key == "p_index") cfg.csl.p_index = pure(tv, line_no, line);
      else fail(line_no, line, "unknown key '" + full + "'");
    } else if (section == "numerics") {
      if (key == "x_ini") cfg.ensemble.evolve.x_ini = pure(tv, line_no, line);
      else if (key == "n_rad_efolds") cfg.ensemble.evolve.n_rad_efolds = pure(tv, line_no, line);
      else if (key == "rel_tol") {
        const double v = pure(tv, line_no, line);
        cfg.ensemble.evolve.ode.rel_tol = v;
        cfg.quad.rel_tol = v;
      } else if (key == "dn_max") cfg.ensemble.dn_max = pure(tv, line_no, line);
      else if (key == "n_traj") cfg.ensemble.n_traj = static_cast<int>(parse_int(tv.value, line_no, line));
      else if (key == "seed") cfg.ensemble.seed = static_cast<std::uint64_t>(parse_int(tv.value, line_no, line));
      else if (key == "threads") cfg.ensemble.threads = static_cast<int>(parse_int(tv.value, line_no, line));
      else fail(line_no, line, "unknown key '" + full + "'");
    } else if (section == "spectrum") {
      if (key == "route") cfg.route = parse_route(tv.value, line_no, line);
      else fail(line_no, line, "unknown key '" + full + "'");
    } else if (section == "grid") {
      if (key == "delta_n_min") cfg.grid.delta_n_min = pure(tv, line_no, line);
      else if (key == "delta_n_max") cfg.grid.delta_n_max = pure(tv, line_no, line);
      else if (key == "k_count") cfg.grid.k_count = static_cast<int>(parse_int(tv.value, line_no, line));
      else fail(line_no, line, "unknown key '" + full + "'");
    } else if (section == "scan") {
      if (key == "rc_log10_min") cfg.scan.rc_log10_min = pure(tv, line_no, line);
      else if (key == "rc_log10_max") cfg.scan.rc_log10_max = pure(tv, line_no, line);
      else if (key == "lambda_log10_min") cfg.scan.lambda_log10_min = pure(tv, line_no, line);
      else if (key == "lambda_log10_max") cfg.scan.lambda_log10_max = pure(tv, line_no, line);
      else if (key == "n_rc") cfg.scan.n_rc = static_cast<int>(parse_int(tv.value, line_no, line));
      else if (key == "n_lambda") cfg.scan.n_lambda = static_cast<int>(parse_int(tv.value, line_no, line));
      else if (key == "delta_n") cfg.scan.delta_n = pure(tv, line_no, line);
      else if (key == "safety_factor") cfg.scan.safety_factor = pure(tv, line_no, line);
      else if (key == "overlay") cfg.scan.overlay_path = rhs;
      else fail(line_no, line, "unknown key '" + full + "'");
    } else if (section == "output") {
      if (key == "format") {
        if (rhs != "csv" && rhs != "json") fail(line_no, line, "format must be csv or json");
        cfg.output.format = rhs;
      } else if (key == "path") cfg.output.path = rhs;
      else fail(line_no, line, "unknown key '" + full + "'");
    } else {
      fail(line_no, line, "key outside any section");
    }
  }

  if (have_gamma && have_lambda)
    throw std::invalid_argument("config: set either csl.gamma or csl.lambda, not both");
  if (have_lambda) cfg.csl.gamma = CslParams::gamma_from_lambda(lambda_pl, cfg.csl.r_c);
  cfg.cosmo.validate();
  if (!(cfg.csl.r_c > 0.0)) throw std::invalid_argument("config: r_c must be positive");
  if (cfg.csl.gamma < 0.0) throw std::invalid_argument("config: gamma must be non-negative");

  // canonical resolved view (code units throughout)
  auto& r = cfg.resolved;
  r["cosmology.h_inf"] = fmt_double(cfg.cosmo.h_end);
  r["cosmology.epsilon1"] = fmt_double(cfg.cosmo.eps1);
  r["cosmology.epsilon2"] = fmt_double(cfg.cosmo.eps2);
  r["cosmology.delta_n"] = fmt_double(cfg.delta_n);
  r["csl.gamma"] = fmt_double(cfg.csl.gamma);
  r["csl.r_c"] = fmt_double(cfg.csl.r_c);
  r["csl.m0"] = fmt_double(cfg.csl.m0);
  r["csl.p_index"] = fmt_double(cfg.csl.p_index);
  r["numerics.x_ini"] = fmt_double(cfg.ensemble.evolve.x_ini);
  r["numerics.n_rad_efolds"] = fmt_double(cfg.ensemble.evolve.n_rad_efolds);
  r["numerics.rel_tol"] = fmt_double(cfg.ensemble.evolve.ode.rel_tol);
  r["numerics.dn_max"] = fmt_double(cfg.ensemble.dn_max);
  r["numerics.n_traj"] = std::to_string(cfg.ensemble.n_traj);
  r["numerics.seed"] = std::to_string(cfg.ensemble.seed);
  r["numerics.threads"] = std::to_string(cfg.ensemble.threads);
  r["spectrum.route"] = route_name(cfg.route);
  r["grid.delta_n_min"] = fmt_double(cfg.grid.delta_n_min);
  r["grid.delta_n_max"] = fmt_double(cfg.grid.delta_n_max);
  r["grid.k_count"] = std::to_string(cfg.grid.k_count);
  r["scan.rc_log10_min"] = fmt_double(cfg.scan.rc_log10_min);
  r["scan.rc_log10_max"] = fmt_double(cfg.scan.rc_log10_max);
  r["scan.lambda_log10_min"] = fmt_double(cfg.scan.lambda_log10_min);
  r["scan.lambda_log10_max"] = fmt_double(cfg.scan.lambda_log10_max);
  r["scan.n_rc"] = std::to_string(cfg.scan.n_rc);
  r["scan.n_lambda"] = std::to_string(cfg.scan.n_lambda);
  r["scan.delta_n"] = fmt_double(cfg.scan.delta_n);
  r["scan.safety_factor"] = fmt_double(cfg.scan.safety_factor);
  if (!cfg.scan.overlay_path.empty()) r["scan.overlay"] = cfg.scan.overlay_path;
  r["output.format"] = cfg.output.format;
  if (!cfg.output.path.empty()) r["output.path"] = cfg.output.path;
  return cfg;
}

RunConfig load_config(const std::string& path, const PhysicalConstants& pc) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str(), pc);
}

std::string config_to_text(const RunConfig& cfg) {
  // regenerate from the resolved map, grouped by section in declaration order
  static const char* sections[] = {"cosmology", "csl",  "numerics", "spectrum",
                                   "grid",      "scan", "output"};
  std::ostringstream os;
  for (const char* sec : sections) {
    const std::string prefix = std::string(sec) + ".";
    bool header = false;
    for (const auto& [key, val] : cfg.resolved) {
      if (key.rfind(prefix, 0) != 0) continue;
      if (!header) {
        os << "[" << sec << "]\n";
        header = true;
      }
      os << key.substr(prefix.size()) << " = " << val << "\n";
    }
    if (header) os << "\n";
  }
  return os.str();
}

}  // namespace cslcosmo
