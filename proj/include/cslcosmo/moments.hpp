#pragma once
#include <vector>

#include "cslcosmo/couplings.hpp"
#include "cslcosmo/modes.hpp"
#include "cslcosmo/ode.hpp"
#include "cslcosmo/quadrature.hpp"

namespace cslcosmo {

// Second moments of the state in the v representation:
//   P_vv = <v^2>, P_cross = <vp + pv>, P_pp = <p^2>.
struct MomentState {
  double p_vv = 0.0;
  double p_cross = 0.0;
  double p_pp = 0.0;
};

struct EvolveOptions {
  double x_ini = 100.0;       // -k eta at the start of integration (sub-Hubble)
  double n_rad_efolds = 7.0;  // e-folds of radiation era to integrate (0: stop at eta_end)
  OdeOptions ode{};
  CouplingOrder order = CouplingOrder::Full;
};

// Bunch-Davies initial moments at conformal time eta (inflation era).
MomentState bunch_davies_moments(const ModeBackground& bg, double eta);

struct MomentSample {
  double n = 0.0;    // e-fold clock ln(a/a_end)
  double eta = 0.0;
  MomentState m{};
};

// Result of a moment integration through the era schedule. Dense output is
// kept per era; the radiation segment starts from the dilated state (the v
// moments jump by s^2 = 6/eps1 at the transition, from continuity of zeta).
struct MomentRun {
  std::vector<MomentSample> samples;
  MomentState final_state{};
  double n_ini = 0.0, n_final = 0.0;
  DenseOutput<3> dense_inf;
  DenseOutput<3> dense_rad;

  MomentState at_n(double n) const;
};

// Integrate the Lindblad moment system
//   P_vv'    = P_cross + (gamma/m0^2) a^4 beta^2
//   P_cross' = 2 P_pp - 2 omega^2 P_vv - 2 (gamma/m0^2) a^4 alpha beta
//   P_pp'    = -omega^2 P_cross + (gamma/m0^2) a^4 alpha^2
// in the e-fold clock, from x_ini through the end of inflation and
// n_rad_efolds of radiation. sample_n values (e-fold clock) are read from the
// dense output; n <= 0 samples come from the inflation segment.
MomentRun integrate_moments(const ModeBackground& bg, const CslParams& csl,
                            const EvolveOptions& opt,
                            const std::vector<double>& sample_n = {});

// Quadrature route for the same quantity. The source terms inject covariance
// that propagates with the value response u1 = -dG/d etabar and the momentum
// response G; integrating the u1 ladder by parts twice leaves
//   P_vv(eta) = |g0(eta)|^2 + (1/2) Int_{eta_ini}^{eta} S(etabar) G^2(eta, etabar) d etabar
//             + boundary terms at eta_ini and at the era transition.
// With boundary_terms the result equals the moment integration (both starting
// from Bunch-Davies data at eta_ini) to integrator tolerance. Without them the
// bulk integral alone is the smooth-segment approximation behind the
// closed-form spectrum limits.
struct QuadraturePvv {
  double p_vv_free = 0.0;
  double correction = 0.0;
  double p_vv() const { return p_vv_free + correction; }
};

QuadraturePvv quadrature_pvv(const ModeBackground& bg, const CslParams& csl, double eta,
                             double eta_ini, const QuadOptions& qopt = {},
                             CouplingOrder order = CouplingOrder::Full,
                             bool boundary_terms = true);

}  // namespace cslcosmo
