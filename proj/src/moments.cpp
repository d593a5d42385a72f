#include "cslcosmo/moments.hpp"

#include <algorithm>
#include <cmath>

#include "cslcosmo/source.hpp"

namespace cslcosmo {

MomentState bunch_davies_moments(const ModeBackground& bg, double eta) {
  const ModeValue m = free_mode(bg, eta, ModeForm::MatchedExact);
  MomentState s;
  s.p_vv = std::norm(m.g);
  s.p_cross = 2.0 * std::real(std::conj(m.g) * m.gp);
  s.p_pp = std::norm(m.gp);
  return s;
}

MomentState MomentRun::at_n(double n) const {
  const bool use_inf = n <= 0.0 || dense_rad.empty();
  const DenseOutput<3>& d = use_inf ? dense_inf : dense_rad;
  const auto y = d.eval(n);
  return {y[0], y[1], y[2]};
}

namespace {

struct MomentRhs {
  const ModeBackground& bg;
  const CslParams& csl;
  CouplingOrder order;

  void operator()(double n, const std::array<double, 3>& y, std::array<double, 3>& dydn) const {
    const double eta = bg.eta_of_n(n);
    const double calh = bg.cal_h(eta);
    const double w2 = bg.omega2(eta);
    double ga = 0.0, gb = 0.0, gc = 0.0;
    if (csl.gamma != 0.0) {
      const CouplingSet cs = couplings_at(bg, csl, eta, order);
      const double g = csl.gamma_over_m0sq();
      ga = g * cs.A.f;
      gb = g * cs.B.f;
      gc = g * cs.C.f;
    }
    dydn[0] = (y[1] + gc) / calh;
    dydn[1] = (2.0 * y[2] - 2.0 * w2 * y[0] - 2.0 * gb) / calh;
    dydn[2] = (-w2 * y[1] + ga) / calh;
  }
};

}  // namespace

MomentRun integrate_moments(const ModeBackground& bg, const CslParams& csl,
                            const EvolveOptions& opt,
                            const std::vector<double>& sample_n) {
  MomentRun run;
  const double n_ini = -std::log(opt.x_ini / bg.x_end());
  run.n_ini = n_ini;
  const double eta_ini = bg.eta_of_n(n_ini);

  const MomentState ini = bunch_davies_moments(bg, eta_ini);
  std::array<double, 3> y{ini.p_vv, ini.p_cross, ini.p_pp};

  MomentRhs rhs{bg, csl, opt.order};
  integrate_dopri5<3>(rhs, n_ini, 0.0, y, opt.ode, run.dense_inf);

  if (opt.n_rad_efolds > 0.0) {
    const double s2 = bg.matching_s() * bg.matching_s();
    for (double& v : y) v *= s2;
    integrate_dopri5<3>(rhs, 0.0, opt.n_rad_efolds, y, opt.ode, run.dense_rad);
    run.n_final = opt.n_rad_efolds;
  } else {
    run.n_final = 0.0;
  }
  run.final_state = {y[0], y[1], y[2]};

  for (double n : sample_n) {
    const double nc = std::clamp(n, n_ini, run.n_final);
    run.samples.push_back({nc, bg.eta_of_n(nc), run.at_n(nc)});
  }
  return run;
}

QuadraturePvv quadrature_pvv(const ModeBackground& bg, const CslParams& csl, double eta,
                             double eta_ini, const QuadOptions& qopt, CouplingOrder order,
                             bool boundary_terms) {
  QuadraturePvv out;
  out.p_vv_free = std::norm(free_mode(bg, eta, ModeForm::MatchedExact).g);
  if (csl.gamma == 0.0) return out;

  const double n_lo = bg.n_of_eta(eta_ini);
  const double n_hi = bg.n_of_eta(eta);

  // break points: era transition, Hubble crossings, smearing-scale crossing
  std::vector<double> breaks{0.0, std::log(bg.x_end()), -std::log(bg.x_end())};
  const double we = bg.k() * csl.r_c / bg.cosmo().a_end();
  if (we > 0.0) breaks.push_back(std::log(we));

  const auto integrand = [&](double nbar) {
    const double etabar = bg.eta_of_n(nbar);
    const double s = source_s(bg, csl, etabar, order);
    if (s == 0.0) return 0.0;
    const double g = green_function(bg, eta, etabar);
    return 0.5 * s * g * g / bg.cal_h(etabar);
  };

  const QuadResult q = integrate_gk(integrand, n_lo, n_hi, qopt, breaks);
  out.correction = q.value;

  if (boundary_terms) {
    // segment-boundary terms of the integration by parts,
    //   F(etabar) = C G dG/d etabar + (B - C'/2) G^2,
    // summed over the smooth segments. The coincidence end etabar = eta
    // vanishes with G; the start contributes -F(eta_ini); an era transition
    // inside the range contributes F(eta_end^-) - F(eta_end^+), where the
    // moment dilation scales the inflation-side response by s^2.
    const auto F = [](const CouplingSet& cs, double g, double dg) {
      return cs.C.f * g * dg + (cs.B.f - 0.5 * cs.C.d1) * g * g;
    };
    const double eta_end = bg.cosmo().eta_end;
    double eta_lo = eta_ini;
    if (!(eta_lo < eta_end) && bg.era_at(eta_lo) == Era::Inflation && eta > eta_end)
      eta_lo = std::nextafter(eta_end, 0.0);  // start exactly at the junction
    const CouplingSet ci = couplings_at(bg, csl, eta_lo, order);
    const double g0 = green_function(bg, eta, eta_lo);
    const double dg0 = green_function_dsource(bg, eta, eta_lo);
    double boundary = -F(ci, g0, dg0);
    if (eta > eta_end && eta_ini < eta_end) {
      const double s2 = bg.matching_s() * bg.matching_s();
      const CouplingSet cm = couplings_at(bg, csl, eta_end, order);
      const CouplingSet cp = couplings_at(bg, csl, std::nextafter(eta_end, 0.0), order);
      const double kappa = bg.k() / std::sqrt(3.0);
      const double arg = kappa * (eta - eta_end);
      const double gc = std::sin(arg) / kappa;
      const double dgc = -std::cos(arg);
      boundary += s2 * F(cm, gc, dgc) - F(cp, gc, dgc);
    }
    out.correction += csl.gamma_over_m0sq() * boundary;
  }
  return out;
}

}  // namespace cslcosmo
