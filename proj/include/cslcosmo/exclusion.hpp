#pragma once

#include <array>
#include <string>
#include <vector>

#include "cslcosmo/config.hpp"
#include "cslcosmo/spectrum.hpp"

namespace cslcosmo {

// CMB bounds on the collapse strength gamma at one smearing length, all in
// log10 of code units. The upper bound keeps the spectrum scale-invariant
// (relative correction below 1); the lower bound demands collapse before CMB
// emission (1/R - 1 above 1). Both branch forms are always evaluated; the
// active branch follows the crossing rule H_end r_c vs e^{delta_n}.
struct GammaBounds {
  double r_c = 0.0;  // code units
  CrossingRegime branch = CrossingRegime::InflationCrossing;
  double log10_gamma_max = 0.0;
  double log10_gamma_min = 0.0;
  double log10_gamma_max_inf = 0.0;
  double log10_gamma_max_rad = 0.0;
  double log10_gamma_min_inf = 0.0;
  double log10_gamma_min_rad = 0.0;
};

// csl supplies m0 and p_index; its gamma and r_c are ignored.
GammaBounds gamma_bounds(double r_c, const CosmologyParams& cosmo,
                         const CslParams& csl, double delta_n);

// log-space versions of lambda = gamma / (8 pi^{3/2} r_c^3), code units
double log10_lambda_of_gamma(double log10_gamma, double r_c);
double log10_gamma_of_lambda(double log10_lambda, double r_c);

// --- laboratory overlay --------------------------------------------------

struct LabPolygon {
  int id = 0;
  bool excludes_inside = true;  // orientation flag
  std::vector<std::array<double, 2>> vertices;  // (log10 r_c [m], log10 lambda [1/s])
};

struct LabOverlay {
  std::vector<LabPolygon> polygons;
  bool empty() const { return polygons.empty(); }
  bool excluded(double log10_rc_m, double log10_lambda_s) const;
};

// CSV schema: polygon-id, vertex-index, log10_rc_m, log10_lambda_s
// [, orientation]. '#' lines are comments. The optional fifth column
// ("inside" | "outside", first vertex of a polygon) flips which side the
// polygon excludes. Vertex indices must count 0,1,2,... per polygon;
// self-intersecting polygons are rejected. An empty file is an empty overlay.
LabOverlay load_lab_overlay(const std::string& path);

// boundary counts as inside
bool point_in_polygon(const LabPolygon& poly, double x, double y);

// --- parameter-plane scan --------------------------------------------------

enum class CellStatus {
  CmbAllowed,              // inside the CMB gamma window, not lab-excluded
  CmbExcludedSpectrum,     // gamma >= gamma_max (spectral distortion)
  CmbExcludedNoCollapse,   // gamma <= gamma_min (no collapse by CMB emission)
  LabExcluded,             // CMB-allowed but inside the lab-excluded region
  BothExcluded,            // CMB-excluded and lab-excluded
};

const char* cell_status_name(CellStatus s);

struct ExclusionCell {
  double log10_rc = 0.0;      // log10 r_c [m]
  double log10_lambda = 0.0;  // log10 lambda [1/s]
  CellStatus status = CellStatus::CmbAllowed;
};

struct BoundaryPoint {
  double log10_rc_m = 0.0;
  double log10_gamma = 0.0;        // code units
  double log10_lambda_s = 0.0;
  CrossingRegime branch = CrossingRegime::InflationCrossing;
};

struct ScanResult {
  std::vector<ExclusionCell> cells;  // r_c-major, lambda fastest
  std::vector<BoundaryPoint> boundary_max;
  std::vector<BoundaryPoint> boundary_min;
  double log10_rc_break_m = 0.0;  // H_end r_c = e^{delta_n}, SI
  int n_joint_allowed = 0;
  bool has_overlay = false;
  std::string verdict;  // "incompatible" | "compatible" | "no-lab-data"
};

// Classify an inclusive n_rc x n_lambda grid over the SI log10 ranges of
// `scan`. Cells are independent and the classification is a pure function of
// the inputs, so the output is identical for any thread count.
ScanResult scan_grid(const ScanConfig& scan, const CosmologyParams& cosmo,
                     const CslParams& csl, const LabOverlay& overlay,
                     const PhysicalConstants& pc, int threads = 0);

}  // namespace cslcosmo
