#include "cslcosmo/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cslcosmo/modes.hpp"

namespace cslcosmo {

namespace {

constexpr double kLog10E = 0.43429448190325182765;  // log10(e)
constexpr double kTwoPi2 = 19.739208802178716;      // 2 pi^2

double observation_n(const EvolveOptions& evolve) {
  return evolve.n_rad_efolds > 0.0 ? evolve.n_rad_efolds : 0.0;
}

}  // namespace

CrossingRegime crossing_regime(const CosmologyParams& cosmo, double r_c,
                               double delta_n) {
  // a = k r_c before a_end <=> H_end r_c < e^{delta_n}; compare in logs
  return std::log(cosmo.h_end * r_c) < delta_n ? CrossingRegime::InflationCrossing
                                               : CrossingRegime::RadiationCrossing;
}

SpectrumPoint power_spectrum(const ModeBackground& bg, const CslParams& csl,
                             const SpectrumOptions& opt) {
  const double n_obs = observation_n(opt.evolve);
  const double eta_obs = bg.eta_of_n(n_obs);
  const double eta_ini = -opt.evolve.x_ini / bg.k();

  SpectrumPoint pt;
  pt.k = bg.k();
  pt.route = opt.route;
  pt.regime = crossing_regime(bg.cosmo(), csl.r_c, bg.delta_n());
  pt.p_vv_free = std::norm(free_mode(bg, eta_obs, ModeForm::MatchedExact).g);

  switch (opt.route) {
    case SpectrumRoute::Lindblad: {
      MomentRun run = integrate_moments(bg, csl, opt.evolve, {n_obs});
      pt.p_vv = run.samples.back().m.p_vv;
      pt.correction_rel = (pt.p_vv - pt.p_vv_free) / pt.p_vv_free;
      OmegaRun orun = integrate_omega(bg, csl, opt.evolve, {n_obs});
      pt.r_value = collapse_r(bg, eta_obs, orun.samples.back().omega);
      break;
    }
    case SpectrumRoute::Quadrature: {
      QuadraturePvv q = quadrature_pvv(bg, csl, eta_obs, eta_ini, opt.quad, opt.order);
      pt.p_vv = q.p_vv();
      pt.correction_rel = q.correction / q.p_vv_free;
      pt.r_value = collapse_r(
          bg, eta_obs, omega_perturbative(bg, csl, eta_obs, eta_ini, opt.quad, opt.order));
      break;
    }
    case SpectrumRoute::Ensemble: {
      EnsembleOptions eopt = opt.ensemble;
      eopt.evolve = opt.evolve;
      EnsembleRun run = run_ensemble(bg, csl, eopt, {n_obs});
      const EnsembleStat& st = run.stats.back();
      pt.p_vv = st.p_vv;
      pt.correction_rel = (st.p_vv - pt.p_vv_free) / pt.p_vv_free;
      pt.stderr_correction = st.stderr_v2 / pt.p_vv_free;
      pt.r_value = st.collapse_r_det;
      break;
    }
    case SpectrumRoute::ClosedForm: {
      pt.correction_rel = correction_closed(pt.regime, bg.cosmo(), csl, bg.delta_n());
      pt.r_value = collapse_r_closed(pt.regime, bg.cosmo(), csl, bg.delta_n());
      pt.p_vv = pt.p_vv_free * (1.0 + pt.correction_rel);
      break;
    }
  }

  const double base_v = 1.0 / (4.0 * re_omega_free(bg, eta_obs));
  pt.p_v = pt.k * pt.k * pt.k / kTwoPi2 * base_v *
           (1.0 + pt.correction_rel - pt.r_value);
  if (pt.p_v < 0.0) {
    pt.p_v = 0.0;
    pt.clipped = true;
  }
  return pt;
}

double collapse_r_numeric(const ModeBackground& bg, const CslParams& csl,
                          const SpectrumOptions& opt) {
  const double n_obs = observation_n(opt.evolve);
  const double eta_obs = bg.eta_of_n(n_obs);
  switch (opt.route) {
    case SpectrumRoute::Quadrature:
      return collapse_r(bg, eta_obs,
                        omega_perturbative(bg, csl, eta_obs,
                                           -opt.evolve.x_ini / bg.k(), opt.quad,
                                           opt.order));
    case SpectrumRoute::ClosedForm:
      return collapse_r_closed(crossing_regime(bg.cosmo(), csl.r_c, bg.delta_n()),
                               bg.cosmo(), csl, bg.delta_n());
    default: {
      OmegaRun run = integrate_omega(bg, csl, opt.evolve, {n_obs});
      return collapse_r(bg, eta_obs, run.samples.back().omega);
    }
  }
}

double log10_correction_closed(CrossingRegime regime,
                               const CosmologyParams& cosmo,
                               const CslParams& csl, double delta_n) {
  const double p = csl.p_index;
  double v = std::log10(csl.gamma_over_m0sq()) + std::log10(cosmo.rho_end()) +
             std::log10(cosmo.eps1);
  if (regime == CrossingRegime::InflationCrossing) {
    v += std::log10(448.0 / 3.0) - (2.0 * p - 1.0) * delta_n * kLog10E;
  } else {
    v += std::log10(35408.0 / 429.0) - (4.0 * p - 10.0) * delta_n * kLog10E +
         (2.0 * p - 9.0) * std::log10(cosmo.h_end * csl.r_c);
  }
  return v;
}

double log10_correction_end_of_inflation(const CosmologyParams& cosmo,
                                         const CslParams& csl, double delta_n) {
  return std::log10(12.0) + std::log10(csl.gamma_over_m0sq()) +
         std::log10(cosmo.rho_end()) + 3.0 * std::log10(cosmo.eps1) -
         (2.0 * csl.p_index - 1.0) * delta_n * kLog10E;
}

double log10_collapse_deviation_closed(CrossingRegime regime,
                                       const CosmologyParams& cosmo,
                                       const CslParams& csl, double delta_n) {
  const double p = csl.p_index;
  double v = std::log10(csl.gamma_over_m0sq()) + std::log10(cosmo.rho_end());
  if (regime == CrossingRegime::InflationCrossing) {
    v += std::log10(1152.0) - (2.0 * p - 7.0) * delta_n * kLog10E;
  } else {
    v += std::log10(7264.0 / 11.0) - (4.0 * p - 14.0) * delta_n * kLog10E +
         (2.0 * p - 7.0) * std::log10(cosmo.h_end * csl.r_c);
  }
  return v;
}

double correction_closed(CrossingRegime regime, const CosmologyParams& cosmo,
                         const CslParams& csl, double delta_n) {
  if (csl.gamma == 0.0) return 0.0;
  return std::pow(10.0, log10_correction_closed(regime, cosmo, csl, delta_n));
}

double collapse_r_closed(CrossingRegime regime, const CosmologyParams& cosmo,
                         const CslParams& csl, double delta_n) {
  if (csl.gamma == 0.0) return 1.0;
  const double l10 = log10_collapse_deviation_closed(regime, cosmo, csl, delta_n);
  if (l10 > 300.0) return 0.0;
  return 1.0 / (1.0 + std::pow(10.0, l10));
}

PowerFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog needs >= 2 matched points");
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || y[i] == 0.0)
      throw std::invalid_argument("fit_loglog needs x > 0 and y != 0");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::fabs(y[i]));
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_loglog: degenerate abscissae");
  PowerFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

PowerFit fit_correction_index(const std::vector<SpectrumPoint>& pts) {
  if (pts.size() < 5)
    throw std::invalid_argument("correction-index fit needs >= 5 points");
  std::vector<double> k, corr;
  k.reserve(pts.size());
  corr.reserve(pts.size());
  for (const SpectrumPoint& pt : pts) {
    if (pt.regime != pts.front().regime)
      throw std::invalid_argument("correction-index fit requires a single crossing regime");
    k.push_back(pt.k);
    corr.push_back(pt.correction_rel);
  }
  const auto [kmin, kmax] = std::minmax_element(k.begin(), k.end());
  if (*kmax < 10.0 * (1.0 - 1e-12) * *kmin)
    throw std::invalid_argument("correction-index fit requires >= 1 decade of k");
  return fit_loglog(k, corr);
}

}  // namespace cslcosmo
