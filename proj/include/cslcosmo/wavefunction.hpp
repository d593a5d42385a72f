#pragma once

#include <complex>
#include <vector>

#include "cslcosmo/background.hpp"
#include "cslcosmo/couplings.hpp"
#include "cslcosmo/moments.hpp"
#include "cslcosmo/ode.hpp"
#include "cslcosmo/quadrature.hpp"

namespace cslcosmo {

// Gaussian wavefunction width parameter Omega for a single mode,
// psi ~ N exp(-Omega (v - vbar)^2 + i ...); ReOmega > 0.
//
// Omega obeys a Riccati equation sourced by the collapse couplings:
//   Omega' = -2(i + 2 Gamma C) Omega^2 + 4 i Gamma B Omega
//            + i omega^2 / 2 + Gamma A.
// The deterministic part of the collapse dynamics is entirely contained in
// Omega; the stochastic part only moves the mean (see sde.hpp).

enum class OmegaBackend {
  DirectRiccati,   // integrate ReOmega, ImOmega directly
  LinearizedMode,  // integrate the associated linear mode g and map back
};

struct OmegaSample {
  double n = 0.0;    // e-folds from end of accelerated expansion
  double eta = 0.0;  // conformal time
  std::complex<double> omega;
};

struct OmegaRun {
  std::vector<OmegaSample> samples;
  std::complex<double> omega_final;
  double n_ini = 0.0;
  double n_final = 0.0;
  // number of times the linearized backend rescaled its mode to step over a
  // near-zero of g (a pole of the Riccati variable); 0 for the direct backend
  int representation_switches = 0;
  // chunks the direct backend advanced on the quasi-static (attracting)
  // root because the width relaxation outpaced explicit stepping
  int quasi_static_chunks = 0;
  // set when the requested backend failed and the run fell back to the other
  bool backend_switched = false;
  // dense output per era for the direct backend: (ReOmega, ImOmega)
  DenseOutput<2> dense_inf;
  DenseOutput<2> dense_rad;
  bool has_dense = false;

  // Direct-backend lookups at e-fold n (n <= 0: inflation segment).
  std::complex<double> omega_at(double n) const;
  // ln|N| from the exact normalization |N| = (2 ReOmega / pi)^{1/4}
  double log_norm_at(double n) const;
};

// Bunch-Davies width at conformal time eta (collapse-free), g0'/(2 i g0).
std::complex<double> bunch_davies_omega(const ModeBackground& bg, double eta);

// Right-hand side of the width equation, dOmega/d eta =
//   -2 (i + 2 Gamma C) Omega^2 + 4 i Gamma B Omega + Gamma A + i omega^2 / 2.
// At gamma = 0 this is the free flow dOmega/d eta = -2 i Omega^2 + i omega^2/2.
std::complex<double> riccati_rhs(std::complex<double> omega,
                                 const ModeBackground& bg, const CslParams& csl,
                                 double eta,
                                 CouplingOrder order = CouplingOrder::Full);

// Evolve Omega from deep inside the Hubble radius (x = opts.x_ini) through
// the era transition to opts.n_rad_efolds past it. Omega is continuous at the
// transition: the wavefunction sector stays in the undilated v variable, and
// its free reference is the Continued mode (see modes.hpp).
OmegaRun integrate_omega(const ModeBackground& bg, const CslParams& csl,
                         const EvolveOptions& opts,
                         const std::vector<double>& sample_n = {},
                         OmegaBackend backend = OmegaBackend::DirectRiccati);

// Coefficients of the linear second-order equation equivalent to the Riccati
// flow, g'' + C1 g' + C2 g = 0 with Omega = (g'/g - C1/2) / (2(i + 2 Gamma C)),
// and the induced complex frequency shift
//   delta_omega2 = C2 - C1'/2 - C1^2/4 - omega^2  (= -i S + O(Gamma^2)).
struct LinearizedCoeffs {
  std::complex<double> c1;
  std::complex<double> c1_prime;
  std::complex<double> c2;
  std::complex<double> delta_omega2;
};

LinearizedCoeffs linearized_coeffs(const ModeBackground& bg,
                                   const CslParams& csl, double eta,
                                   CouplingOrder order = CouplingOrder::Full);

// First-order (in the collapse rate) width: the width flow linearized around
// the free solution. The homogeneous propagator exp(-4i Int Omega0) is the
// squared ratio of free modes, so
//   Omega = Omega0(eta) + Int_{eta_ini}^{eta} F1(s) (g0(s)/g0(eta))^2 ds,
//   F1 = Gamma (A + 4i B Omega0 - 4 C Omega0^2)
// with F1 the exact Gamma-linear part of riccati_rhs at Omega0. Agrees with
// integrate_omega to O(Gamma^2) whenever both start from the same state.
std::complex<double> omega_perturbative(const ModeBackground& bg,
                                        const CslParams& csl, double eta,
                                        double eta_ini,
                                        const QuadOptions& quad = {},
                                        CouplingOrder order = CouplingOrder::Full);

// Collapse criterion: R = ReOmega_free / ReOmega at equal times. The state
// is sharper than the free vacuum (macro-objectification proceeds) when
// R < 1; R ~ 1 means the collapse terms had no effect on the width.
double collapse_r(const ModeBackground& bg, double eta,
                  std::complex<double> omega);

}  // namespace cslcosmo
