#include "cslcosmo/exclusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cslcosmo {

namespace {

constexpr double kLog10E = 0.43429448190325182765;

double log10_8pi32() { return std::log10(8.0 * std::pow(3.14159265358979323846, 1.5)); }

int orient_sign(const std::array<double, 2>& a, const std::array<double, 2>& b,
                const std::array<double, 2>& c) {
  const double cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  return (cross > 0.0) - (cross < 0.0);
}

bool on_segment(const std::array<double, 2>& a, const std::array<double, 2>& b,
                const std::array<double, 2>& p) {
  if (orient_sign(a, b, p) != 0) return false;
  return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
         std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
}

bool segments_cross(const std::array<double, 2>& p1, const std::array<double, 2>& p2,
                    const std::array<double, 2>& p3, const std::array<double, 2>& p4) {
  const int o1 = orient_sign(p1, p2, p3);
  const int o2 = orient_sign(p1, p2, p4);
  const int o3 = orient_sign(p3, p4, p1);
  const int o4 = orient_sign(p3, p4, p2);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(p1, p2, p3)) || (o2 == 0 && on_segment(p1, p2, p4)) ||
         (o3 == 0 && on_segment(p3, p4, p1)) || (o4 == 0 && on_segment(p3, p4, p2));
}

void check_simple(const LabPolygon& poly) {
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t i2 = (i + 1) % n;
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t j2 = (j + 1) % n;
      // skip edges sharing a vertex
      if (i == j || i2 == j || i == j2) continue;
      if (segments_cross(poly.vertices[i], poly.vertices[i2], poly.vertices[j],
                         poly.vertices[j2])) {
        std::ostringstream os;
        os << "overlay polygon " << poly.id << ": edges " << i << " and " << j
           << " intersect (polygon must be simple)";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const std::size_t b = f.find_first_not_of(" \t");
    const std::size_t e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return out;
}

}  // namespace

GammaBounds gamma_bounds(double r_c, const CosmologyParams& cosmo,
                         const CslParams& csl, double delta_n) {
  if (!(r_c > 0.0)) throw std::invalid_argument("gamma_bounds: r_c must be positive");
  GammaBounds b;
  b.r_c = r_c;
  b.branch = crossing_regime(cosmo, r_c, delta_n);

  const double p = csl.p_index;
  const double l10_m02 = 2.0 * std::log10(csl.m0);
  const double l10_rho = std::log10(cosmo.rho_end());
  const double l10_eps = std::log10(cosmo.eps1);
  const double l10_hrc = std::log10(cosmo.h_end * r_c);
  const double dn = delta_n * kLog10E;  // log10 e^{delta_n}

  // spectrum bounds: correction < 1
  b.log10_gamma_max_inf =
      l10_m02 - std::log10(448.0 / 3.0) - l10_rho - l10_eps + (2.0 * p - 1.0) * dn;
  b.log10_gamma_max_rad = l10_m02 - std::log10(35408.0 / 429.0) - l10_rho - l10_eps +
                          (4.0 * p - 10.0) * dn + (9.0 - 2.0 * p) * l10_hrc;
  // collapse bounds: 1/R - 1 > 1
  b.log10_gamma_min_inf = l10_m02 - std::log10(1152.0) - l10_rho + (2.0 * p - 7.0) * dn;
  b.log10_gamma_min_rad = l10_m02 - std::log10(7264.0 / 11.0) - l10_rho +
                          (4.0 * p - 14.0) * dn + (7.0 - 2.0 * p) * l10_hrc;

  const bool inf = b.branch == CrossingRegime::InflationCrossing;
  b.log10_gamma_max = inf ? b.log10_gamma_max_inf : b.log10_gamma_max_rad;
  b.log10_gamma_min = inf ? b.log10_gamma_min_inf : b.log10_gamma_min_rad;
  return b;
}

double log10_lambda_of_gamma(double log10_gamma, double r_c) {
  return log10_gamma - log10_8pi32() - 3.0 * std::log10(r_c);
}

double log10_gamma_of_lambda(double log10_lambda, double r_c) {
  return log10_lambda + log10_8pi32() + 3.0 * std::log10(r_c);
}

bool point_in_polygon(const LabPolygon& poly, double x, double y) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  const std::array<double, 2> p{x, y};
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_segment(v[j], v[i], p)) return true;  // boundary counts as inside
    const bool straddles = (v[i][1] > y) != (v[j][1] > y);
    if (straddles) {
      const double x_cross =
          v[j][0] + (y - v[j][1]) / (v[i][1] - v[j][1]) * (v[i][0] - v[j][0]);
      if (x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool LabOverlay::excluded(double log10_rc_m, double log10_lambda_s) const {
  for (const LabPolygon& poly : polygons) {
    const bool in = point_in_polygon(poly, log10_rc_m, log10_lambda_s);
    if (in == poly.excludes_inside) return true;
  }
  return false;
}

LabOverlay load_lab_overlay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open overlay file: " + path);
  LabOverlay overlay;
  LabPolygon cur;
  bool have_cur = false;
  std::vector<int> done_ids;

  auto finish = [&] {
    if (!have_cur) return;
    if (cur.vertices.size() < 3) {
      std::ostringstream os;
      os << "overlay polygon " << cur.id << ": needs >= 3 vertices, got "
         << cur.vertices.size();
      throw std::invalid_argument(os.str());
    }
    check_simple(cur);
    done_ids.push_back(cur.id);
    overlay.polygons.push_back(std::move(cur));
    cur = LabPolygon{};
    have_cur = false;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = line.substr(0, line.find('#'));
    if (s.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<std::string> f = split_csv(s);
    if (line_no == 1 && f.size() >= 4 && f[0] == "polygon-id") continue;  // header
    if (f.size() != 4 && f.size() != 5) {
      std::ostringstream os;
      os << "overlay line " << line_no << ": expected 4 or 5 fields, got " << f.size();
      throw std::invalid_argument(os.str());
    }
    char* end = nullptr;
    const long id = std::strtol(f[0].c_str(), &end, 10);
    if (end != f[0].c_str() + f[0].size())
      throw std::invalid_argument("overlay line " + std::to_string(line_no) +
                                  ": bad polygon-id '" + f[0] + "'");
    const long idx = std::strtol(f[1].c_str(), &end, 10);
    if (end != f[1].c_str() + f[1].size())
      throw std::invalid_argument("overlay line " + std::to_string(line_no) +
                                  ": bad vertex-index '" + f[1] + "'");
    const double rc = std::strtod(f[2].c_str(), &end);
    if (end != f[2].c_str() + f[2].size())
      throw std::invalid_argument("overlay line " + std::to_string(line_no) +
                                  ": bad log10_rc_m '" + f[2] + "'");
    const double lam = std::strtod(f[3].c_str(), &end);
    if (end != f[3].c_str() + f[3].size())
      throw std::invalid_argument("overlay line " + std::to_string(line_no) +
                                  ": bad log10_lambda_s '" + f[3] + "'");

    if (!have_cur || id != cur.id) {
      finish();
      if (std::find(done_ids.begin(), done_ids.end(), id) != done_ids.end())
        throw std::invalid_argument("overlay line " + std::to_string(line_no) +
                                    ": polygon " + std::to_string(id) +
                                    " records are not contiguous");
      have_cur = true;
      cur.id = static_cast<int>(id);
      if (f.size() == 5) {
        if (f[4] == "inside") cur.excludes_inside = true;
        else if (f[4] == "outside") cur.excludes_inside = false;
        else
          throw std::invalid_argument("overlay line " + std::to_string(line_no) +
                                      ": orientation must be inside or outside");
      }
    }
    if (idx != static_cast<long>(cur.vertices.size())) {
      std::ostringstream os;
      os << "overlay line " << line_no << ": polygon " << id << " expected vertex-index "
         << cur.vertices.size() << ", got " << idx;
      throw std::invalid_argument(os.str());
    }
    cur.vertices.push_back({rc, lam});
  }
  finish();
  return overlay;
}

const char* cell_status_name(CellStatus s) {
  switch (s) {
    case CellStatus::CmbAllowed: return "cmb-allowed";
    case CellStatus::CmbExcludedSpectrum: return "cmb-excluded-spectrum";
    case CellStatus::CmbExcludedNoCollapse: return "cmb-excluded-no-collapse";
    case CellStatus::LabExcluded: return "lab-excluded";
    case CellStatus::BothExcluded: return "both-excluded";
  }
  return "?";
}

ScanResult scan_grid(const ScanConfig& scan, const CosmologyParams& cosmo,
                     const CslParams& csl, const LabOverlay& overlay,
                     const PhysicalConstants& pc, int threads) {
  if (scan.n_rc < 2 || scan.n_lambda < 2)
    throw std::invalid_argument("scan grid needs at least 2 points per axis");
  if (!(scan.rc_log10_max > scan.rc_log10_min) ||
      !(scan.lambda_log10_max > scan.lambda_log10_min))
    throw std::invalid_argument("scan ranges must be increasing");

  const double l10_len = std::log10(pc.length_unit_m());
  const double l10_time = std::log10(pc.time_unit_s());
  const double l10_safety = std::log10(scan.safety_factor);

  ScanResult res;
  res.has_overlay = !overlay.empty();
  res.log10_rc_break_m = scan.delta_n * kLog10E - std::log10(cosmo.h_end) + l10_len;
  res.cells.resize(static_cast<std::size_t>(scan.n_rc) * scan.n_lambda);
  res.boundary_max.reserve(scan.n_rc);
  res.boundary_min.reserve(scan.n_rc);

  const double drc = (scan.rc_log10_max - scan.rc_log10_min) / (scan.n_rc - 1);
  const double dlam = (scan.lambda_log10_max - scan.lambda_log10_min) / (scan.n_lambda - 1);

  std::vector<GammaBounds> bounds(scan.n_rc);
  for (int i = 0; i < scan.n_rc; ++i) {
    const double l10_rc_m = scan.rc_log10_min + i * drc;
    const double rc_pl = std::pow(10.0, l10_rc_m - l10_len);
    bounds[i] = gamma_bounds(rc_pl, cosmo, csl, scan.delta_n);
    BoundaryPoint bmax{l10_rc_m, bounds[i].log10_gamma_max,
                       log10_lambda_of_gamma(bounds[i].log10_gamma_max, rc_pl) - l10_time,
                       bounds[i].branch};
    BoundaryPoint bmin{l10_rc_m, bounds[i].log10_gamma_min,
                       log10_lambda_of_gamma(bounds[i].log10_gamma_min, rc_pl) - l10_time,
                       bounds[i].branch};
    res.boundary_max.push_back(bmax);
    res.boundary_min.push_back(bmin);
  }

  auto classify_columns = [&](int i0, int i1) {
    for (int i = i0; i < i1; ++i) {
      const double l10_rc_m = scan.rc_log10_min + i * drc;
      const double l10_rc_pl = l10_rc_m - l10_len;
      for (int j = 0; j < scan.n_lambda; ++j) {
        const double l10_lam_s = scan.lambda_log10_min + j * dlam;
        const double l10_gamma = l10_lam_s + l10_time + log10_8pi32() + 3.0 * l10_rc_pl;
        const bool too_strong = l10_gamma >= bounds[i].log10_gamma_max - l10_safety;
        const bool too_weak = l10_gamma <= bounds[i].log10_gamma_min;
        const bool lab_ex = overlay.excluded(l10_rc_m, l10_lam_s);
        CellStatus st;
        if (!too_strong && !too_weak)
          st = lab_ex ? CellStatus::LabExcluded : CellStatus::CmbAllowed;
        else if (lab_ex)
          st = CellStatus::BothExcluded;
        else
          st = too_strong ? CellStatus::CmbExcludedSpectrum
                          : CellStatus::CmbExcludedNoCollapse;
        res.cells[static_cast<std::size_t>(i) * scan.n_lambda + j] =
            ExclusionCell{l10_rc_m, l10_lam_s, st};
      }
    }
  };

  int n_threads = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, scan.n_rc));
  if (n_threads == 1) {
    classify_columns(0, scan.n_rc);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (scan.n_rc + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const int i0 = t * chunk;
      const int i1 = std::min(scan.n_rc, i0 + chunk);
      if (i0 >= i1) break;
      pool.emplace_back(classify_columns, i0, i1);
    }
    for (auto& th : pool) th.join();
  }

  for (const ExclusionCell& c : res.cells)
    if (c.status == CellStatus::CmbAllowed) ++res.n_joint_allowed;
  res.verdict = !res.has_overlay ? "no-lab-data"
                : res.n_joint_allowed == 0 ? "incompatible"
                                           : "compatible";
  return res;
}

}  // namespace cslcosmo
