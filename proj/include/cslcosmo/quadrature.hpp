#pragma once
#include <cmath>
#include <functional>
#include <vector>

namespace cslcosmo {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_intervals = 2000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

// Adaptive Gauss-Kronrod 7/15 over [a, b]. Subdivides the worst interval
// until the global error estimate meets the tolerance. Additional interior
// break points (where the integrand changes character) can be supplied; the
// initial subdivision is aligned with them.
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        const QuadOptions& opt = {},
                        const std::vector<double>& breaks = {});

}  // namespace cslcosmo
