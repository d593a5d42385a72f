#include "cslcosmo/source.hpp"

#include <cmath>

namespace cslcosmo {

double source_s(const ModeBackground& bg, const CslParams& csl, double eta,
                const CouplingSet& cs) {
  const double w2 = bg.omega2(eta);
  return csl.gamma_over_m0sq() *
         (2.0 * cs.A.f + 2.0 * w2 * cs.C.f - 2.0 * cs.B.d1 + cs.C.d2);
}

double source_s(const ModeBackground& bg, const CslParams& csl, double eta,
                CouplingOrder order) {
  return source_s(bg, csl, eta, couplings_at(bg, csl, eta, order));
}

double source_inflation_closed(const ModeBackground& bg, const CslParams& csl, double eta) {
  const CosmologyParams& c = bg.cosmo();
  const double k = bg.k();
  const double u = bg.k_over_ah(eta);              // -k eta
  const double w = bg.rc_over_lambda(eta, csl.r_c);
  const double e1 = c.eps1;
  const double u2 = u * u, w2 = w * w;
  const double bracket = 126.0 * e1 * e1 - 75.0 * e1 * u2 + 81.0 * e1 * e1 * w2 +
                         18.0 * u2 * u2 - 48.0 * e1 * u2 * w2 + 18.0 * e1 * e1 * w2 * w2 +
                         u2 * u2 * u2 + 7.0 * u2 * u2 * w2 - 12.0 * u2 * w2 * w2 +
                         2.0 * u2 * u2 * w2 * w2;
  return 4.0 * csl.gamma_over_m0sq() * e1 * c.h_end * c.h_end * k * k *
         std::exp(-w2) * bracket / (u2 * u2 * u2);
}

double source_radiation_closed(const ModeBackground& bg, const CslParams& csl, double eta) {
  const CosmologyParams& c = bg.cosmo();
  const double k = bg.k();
  const double u = bg.k_over_ah(eta);  // k (eta - eta_r)
  const double f = c.a_end() / bg.a_of_eta(eta);
  const double we = k * csl.r_c / c.a_end();
  const double u2 = u * u, f2 = f * f, we2 = we * we;
  const double bracket = 3024.0 - 414.0 * u2 + u2 * u2 * u2 - 1836.0 * f2 * we2 +
                         216.0 * f2 * f2 * we2 * we2 - 72.0 * f2 * f2 * u2 * we2 * we2 +
                         432.0 * f2 * u2 * we2 + 6.0 * f2 * u2 * we2 * we2 -
                         21.0 * f2 * u2 * u2 * we2;
  return 8.0 * csl.gamma_over_m0sq() * c.h_end * c.h_end * k * k *
         std::exp(-f2 * we2) * f2 * f2 * bracket / (u2 * u2 * u2);
}

}  // namespace cslcosmo
