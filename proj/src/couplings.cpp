#include "cslcosmo/couplings.hpp"

#include <cmath>

namespace cslcosmo {

double CslParams::lambda_rate() const {
  return gamma / (8.0 * std::pow(M_PI, 1.5) * r_c * r_c * r_c);
}

double CslParams::gamma_from_lambda(double lambda, double r_c) {
  return lambda * 8.0 * std::pow(M_PI, 1.5) * r_c * r_c * r_c;
}

CouplingSet couplings_at(const ModeBackground& bg, const CslParams& csl, double eta,
                         CouplingOrder order) {
  const CosmologyParams& c = bg.cosmo();
  const double k = bg.k();
  const Jet2 e = Jet2::variable(eta);

  Jet2 a, H, aH_over_k, z, alpha, beta;
  if (bg.era_at(eta) == Era::Inflation) {
    a = -1.0 / (c.h_end * e);
    H = Jet2::constant(c.h_end);
    aH_over_k = -1.0 / (k * e);
    z = std::sqrt(2.0 * c.eps1) * a;
    const double eps2 = (order == CouplingOrder::LeadingSlowRoll) ? 0.0 : c.eps2;
    const Jet2 smear = exp(-(k * k * csl.r_c * csl.r_c / 2.0) / (a * a));
    const Jet2 br_a = (-8.0 - eps2) + 6.0 * c.eps1 * (1.0 + eps2 / 2.0) * aH_over_k * aH_over_k;
    const Jet2 br_b = 1.0 - 3.0 * c.eps1 * aH_over_k * aH_over_k;
    alpha = (c.eps1 * (H * H) / z) * smear * br_a;
    beta = (2.0 * c.eps1 * H / (a * z)) * smear * br_b;
  } else {
    const Jet2 d = e - c.eta_r();
    a = c.a_r_slope() * d;
    H = 1.0 / (c.a_r_slope() * d * d);
    aH_over_k = 1.0 / (k * d);
    z = 2.0 * std::sqrt(3.0) * a;
    const Jet2 smear = exp(-(k * k * csl.r_c * csl.r_c / 2.0) / (a * a));
    alpha = (24.0 * (H * H) / z) * smear * (3.0 * aH_over_k * aH_over_k - 1.0);
    beta = (12.0 * H / (a * z)) * smear * (1.0 - 6.0 * aH_over_k * aH_over_k);
  }

  if (csl.p_index != 0.0) {
    const Jet2 fac = pow(1.0 / aH_over_k, csl.p_index);
    alpha = alpha * fac;
    beta = beta * fac;
  }

  CouplingSet out;
  out.alpha = alpha;
  out.beta = beta;
  const Jet2 a4 = sq(sq(a));
  out.A = a4 * alpha * alpha;
  out.B = a4 * alpha * beta;
  out.C = a4 * beta * beta;
  out.smear = std::exp(-(k * k * csl.r_c * csl.r_c / 2.0) / (a.f * a.f));
  return out;
}

}  // namespace cslcosmo
