#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cslcosmo/background.hpp"
#include "cslcosmo/couplings.hpp"
#include "cslcosmo/sde.hpp"
#include "cslcosmo/spectrum.hpp"

namespace cslcosmo {

// SI anchors for the reduced-Planck unit system the physics core works in
// (M_Pl reduced = 1). One code unit of length is sqrt(8 pi) Planck lengths.
struct PhysicalConstants {
  double planck_length_m = 1.616255e-35;
  double planck_time_s = 5.391247e-44;
  double planck_mass_kg = 2.176434e-8;
  double nucleon_mass_kg = 1.67262192369e-27;

  double length_unit_m() const;
  double time_unit_s() const;
  double mass_unit_kg() const;
  double nucleon_reduced() const;  // nucleon mass in code units

  // conversions (si value <-> code value)
  double rc_from_si(double meters) const { return meters / length_unit_m(); }
  double rc_to_si(double planck) const { return planck * length_unit_m(); }
  double rate_from_si(double per_second) const { return per_second * time_unit_s(); }
  double rate_to_si(double planck) const { return planck / time_unit_s(); }
};

// key = value file with the same syntax as run configs, section [constants]
PhysicalConstants load_constants(const std::string& path);

struct GridConfig {
  double delta_n_min = 14.0;  // super-Hubble e-folds of the smallest scale
  double delta_n_max = 16.3;
  int k_count = 8;
};

struct ScanConfig {
  double rc_log10_min = -9.0;       // log10 r_c [m]
  double rc_log10_max = -2.0;
  double lambda_log10_min = -22.0;  // log10 lambda [1/s]
  double lambda_log10_max = -4.0;
  int n_rc = 200;
  int n_lambda = 200;
  double delta_n = 50.0;
  double safety_factor = 1.0;
  std::string overlay_path;
};

struct OutputConfig {
  std::string format = "csv";  // csv | json
  std::string path;
};

// Fully resolved run configuration. All physical values are stored in code
// (reduced Planck) units after parsing; `resolved` keeps the canonical
// "section.key -> value" map the manifest embeds, written so that reparsing
// reproduces the exact same doubles.
struct RunConfig {
  CosmologyParams cosmo{};
  double delta_n = 15.0;  // pivot mode: k/(aH)|_end = e^{-delta_n}
  CslParams csl{};
  EnsembleOptions ensemble{};  // carries evolve options, n_traj, seed, threads
  SpectrumRoute route = SpectrumRoute::Lindblad;
  QuadOptions quad{};
  GridConfig grid{};
  ScanConfig scan{};
  OutputConfig output{};
  PhysicalConstants constants{};
  std::map<std::string, std::string> resolved;

  ModeBackground pivot_mode() const {
    return ModeBackground::from_delta_n(cosmo, delta_n);
  }
};

// Parse a config in flat key = value form with [section] headers, '#'
// comments, and an optional trailing unit tag ("planck" | "si") on physical
// quantities. Unknown sections, unknown keys, duplicate keys, and malformed
// values are errors (std::invalid_argument with the offending line).
RunConfig parse_config_text(const std::string& text, const PhysicalConstants& pc);
RunConfig load_config(const std::string& path, const PhysicalConstants& pc);

// Canonical text form of a resolved config; parse_config_text(config_to_text(c))
// reproduces c exactly (all values in code units, 17 significant digits).
std::string config_to_text(const RunConfig& cfg);

}  // namespace cslcosmo
