#pragma once
#include "cslcosmo/couplings.hpp"

namespace cslcosmo {

// Source of the third-order equation for P_vv:
//   S = (gamma/m0^2) [ 2 a^4 (alpha^2 + omega^2 beta^2) - 2 (a^4 alpha beta)' + (a^4 beta^2)'' ]
// evaluated with exact derivatives of the coupling products.
double source_s(const ModeBackground& bg, const CslParams& csl, double eta,
                CouplingOrder order = CouplingOrder::Full);

// same, reusing an already-computed coupling set
double source_s(const ModeBackground& bg, const CslParams& csl, double eta,
                const CouplingSet& cs);

// Closed-form inflationary source (10-term bracket in u = k/(aH) and
// w = r_c k/a). Truncated at leading slow-roll order per monomial; valid for
// p_index = 0 and eta < eta_end.
double source_inflation_closed(const ModeBackground& bg, const CslParams& csl, double eta);

// Closed-form radiation-era source (bracket in u = k/(aH), f = a_end/a and
// w_e = (r_c k/a)_end). Valid for p_index = 0 and eta > eta_end.
double source_radiation_closed(const ModeBackground& bg, const CslParams& csl, double eta);

}  // namespace cslcosmo
