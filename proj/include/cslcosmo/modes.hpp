#pragma once
#include <complex>

#include "cslcosmo/background.hpp"

namespace cslcosmo {

// A free (gamma = 0) mode function value: g, g' and the conserved Wronskian
// W = g' g* - g g*' of the pair (g, g*).
struct ModeValue {
  std::complex<double> g;
  std::complex<double> gp;
  std::complex<double> wronskian;
};

enum class ModeForm {
  MatchedExact,  // Bunch-Davies during inflation, exact s-scaled continuation after
  Continued,     // same continuation without the s dilation (W = i throughout)
  LeadingOrder,  // radiation era: the leading-order zeta-matched growing mode (zero at eta_r)
};

// Free mode function. During inflation this is the Bunch-Davies solution
//   g0 = e^{ik eta} (1 + i/(k eta)) / sqrt(2k),  W = i.
// In the radiation era the MatchedExact form continues s * g0 through eta_end
// with s = z_rad/z_inf = sqrt(6/eps1) (continuity of zeta and Phi), W = i s^2;
// it feeds the moment and quadrature routes, whose second moments dilate by
// s^2 at the transition. The Continued form is the same solution without the
// dilation: it is the mode the wavefunction sector (Omega, R) evolves against,
// since a normalised Gaussian state cannot absorb the s^2 moment jump.
// The LeadingOrder form is the truncated growing mode
//   g0 = -3i sin[k (eta - eta_r)/sqrt(3)] / (sqrt(k eps1) (k eta_end)^2)
// whose own Wronskian vanishes (it is a single real profile times a phase).
ModeValue free_mode(const ModeBackground& bg, double eta,
                    ModeForm form = ModeForm::MatchedExact);

// Retarded Green function of g'' + omega^2 g = 0 for the piecewise background.
// etabar <= eta. Both arguments in inflation use the closed trigonometric
// form; both in radiation use (sqrt(3)/k) sin[k (eta - etabar)/sqrt(3)];
// mixed arguments are built from the continued mode pair, times the dilation
// s for the MatchedExact form (the kernel the moment routes respond with).
double green_function(const ModeBackground& bg, double eta, double etabar,
                      ModeForm form = ModeForm::MatchedExact);

// d/d eta of the Green function (needed by the perturbative Omega route)
double green_function_deta(const ModeBackground& bg, double eta, double etabar,
                           ModeForm form = ModeForm::MatchedExact);

// d/d etabar of the Green function (source-time derivative). The covariance
// propagation responds to an initial value with u1(eta, etabar) = -dG/d etabar,
// which the boundary terms of the quadrature route need at the segment ends.
double green_function_dsource(const ModeBackground& bg, double eta, double etabar,
                              ModeForm form = ModeForm::MatchedExact);

// Free width parameter of the wavefunction sector, Omega0 = g'/(2 i g) for
// the Continued mode: continuous through the era transition.
std::complex<double> omega_free(const ModeBackground& bg, double eta);

// Re Omega0 = 1 / (4 |g|^2) for the Continued mode (exact, no cancellation).
double re_omega_free(const ModeBackground& bg, double eta);

}  // namespace cslcosmo
