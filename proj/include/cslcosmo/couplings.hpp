#pragma once
#include "cslcosmo/background.hpp"
#include "cslcosmo/jet.hpp"

namespace cslcosmo {

// Collapse-model parameters in reduced Planck units.
struct CslParams {
  double gamma = 0.0;    // collapse strength
  double r_c = 1.0;      // smearing length
  double m0 = 3.85275e-19;  // reference mass (nucleon by default)
  double p_index = 0.0;  // exponent of the (k/aH)^p density-contrast generalization

  double gamma_over_m0sq() const { return gamma / (m0 * m0); }

  // CSL collapse rate lambda = gamma / (8 pi^{3/2} r_c^3)
  double lambda_rate() const;
  static double gamma_from_lambda(double lambda, double r_c);
};

enum class CouplingOrder {
  Full,             // brackets as printed, including eps2 terms
  LeadingSlowRoll,  // eps2 contributions dropped
};

// Collapse-operator couplings and the products entering the Lindblad terms,
// with first and second conformal-time derivatives carried as jets:
//   A = a^4 alpha^2,  B = a^4 alpha beta,  C = a^4 beta^2.
struct CouplingSet {
  Jet2 alpha;  // coefficient of v in the collapse operator
  Jet2 beta;   // coefficient of p
  Jet2 A;
  Jet2 B;
  Jet2 C;
  double smear = 1.0;  // e^{-k^2 r_c^2 / (2 a^2)}
};

CouplingSet couplings_at(const ModeBackground& bg, const CslParams& csl, double eta,
                         CouplingOrder order = CouplingOrder::Full);

}  // namespace cslcosmo
