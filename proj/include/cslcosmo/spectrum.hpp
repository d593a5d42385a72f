#pragma once

#include <vector>

#include "cslcosmo/background.hpp"
#include "cslcosmo/couplings.hpp"
#include "cslcosmo/moments.hpp"
#include "cslcosmo/sde.hpp"
#include "cslcosmo/wavefunction.hpp"

namespace cslcosmo {

// Which era the mode crosses the smearing scale r_c in (a = k r_c). Crossing
// happens during inflation when H_end r_c < e^{delta_n}; the collapse terms
// are only active after crossing, so the two cases produce different
// late-time corrections.
enum class CrossingRegime { InflationCrossing, RadiationCrossing };

CrossingRegime crossing_regime(const CosmologyParams& cosmo, double r_c,
                               double delta_n);

enum class SpectrumRoute {
  Lindblad,    // moment integration (exact in gamma)
  Quadrature,  // Green-function response (first order in gamma)
  Ensemble,    // stochastic unraveling Monte Carlo
  ClosedForm,  // leading-order coefficient formulas
};

// One k-point of the collapse-corrected power spectrum, normalized the way
// the headline formulas are: P_v = k^3 (4 ReOmega0)^{-1} [1 + corr - R]/(2 pi^2)
// with ReOmega0 the free width (continued mode), corr the relative CSL
// distortion of the zeta-matched second moment, and R = ReOmega0/ReOmega the
// collapse criterion. corr and R are dimensionless ratios, identical across
// routes; p_v assembles them on the shared free baseline.
struct SpectrumPoint {
  double k = 0.0;
  double p_v = 0.0;
  double p_vv = 0.0;            // zeta-matched E<v^2> from the route
  double p_vv_free = 0.0;       // |g|^2 of the matched free mode
  double correction_rel = 0.0;  // (p_vv - p_vv_free)/p_vv_free
  double stderr_correction = 0.0;  // Monte-Carlo only, 0 otherwise
  double r_value = 1.0;
  CrossingRegime regime = CrossingRegime::InflationCrossing;
  SpectrumRoute route = SpectrumRoute::Quadrature;
  bool clipped = false;  // p_v fell below 0 (statistical noise) and was clipped
};

struct SpectrumOptions {
  SpectrumRoute route = SpectrumRoute::Quadrature;
  EvolveOptions evolve{};       // n_rad_efolds sets the evaluation time
  QuadOptions quad{};
  EnsembleOptions ensemble{};   // Ensemble route only
  CouplingOrder order = CouplingOrder::Full;
};

SpectrumPoint power_spectrum(const ModeBackground& bg, const CslParams& csl,
                             const SpectrumOptions& opt = {});

// Collapse criterion through the chosen route at the evaluation time of opt.
double collapse_r_numeric(const ModeBackground& bg, const CslParams& csl,
                          const SpectrumOptions& opt = {});

// --- closed forms ------------------------------------------------------
//
// Leading-order coefficient formulas, evaluated in log10 space so that
// delta_n = 50 stays representable. Exact rational prefactors; the density
// contrast index p of the csl block shifts the exponents:
//   inflation crossing: corr = (448/3) (gamma/m0^2) rho_end eps1 x_e^{2p-1}
//   radiation crossing: corr = (35408/429) (gamma/m0^2) rho_end eps1
//                              x_e^{4p-10} (H_end r_c)^{2p-9}
// with x_e = e^{-delta_n}. The exponent shifts are the published
// generalization; the rational prefactors are the p = 0 values.
double log10_correction_closed(CrossingRegime regime,
                               const CosmologyParams& cosmo,
                               const CslParams& csl, double delta_n);

// End-of-inflation correction (before the transition):
//   corr = 12 (gamma/m0^2) rho_inf eps1^3 x_e^{2p-1}
// (equivalently 36 Gamma H^2 eps1^3 x_e^{2p-1}).
double log10_correction_end_of_inflation(const CosmologyParams& cosmo,
                                         const CslParams& csl, double delta_n);

// Collapse deviation 1/R - 1:
//   inflation crossing: 1152 (gamma/m0^2) rho_end x_e^{2p-7}
//   radiation crossing: (7264/11) (gamma/m0^2) rho_end x_e^{4p-14} (H_end r_c)^{2p-7}
double log10_collapse_deviation_closed(CrossingRegime regime,
                                       const CosmologyParams& cosmo,
                                       const CslParams& csl, double delta_n);

// Linear-space convenience wrappers (may overflow at large delta_n; the
// exclusion scanner works from the log10 forms directly).
double correction_closed(CrossingRegime regime, const CosmologyParams& cosmo,
                         const CslParams& csl, double delta_n);
double collapse_r_closed(CrossingRegime regime, const CosmologyParams& cosmo,
                         const CslParams& csl, double delta_n);

// --- spectral-index fits ------------------------------------------------

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;   // at log(x) = 0
  double residual_rms = 0.0;
};

// Log-log least squares of |y| against x > 0.
PowerFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Slope of correction_rel against k over a single-regime set of points.
// Requires >= 5 points spanning at least one decade of k, all in the same
// regime; throws std::invalid_argument otherwise. For p = 0 the expected
// slopes are -1 (inflation crossing) and -10 (radiation crossing); the
// published generalization is 2p-1 and 4p-10.
PowerFit fit_correction_index(const std::vector<SpectrumPoint>& pts);

}  // namespace cslcosmo
