#include "cslcosmo/wavefunction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cslcosmo/modes.hpp"
#include "cslcosmo/source.hpp"

namespace cslcosmo {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

// Width flow in the e-fold clock for y = (ReOmega, ImOmega). The norm is not
// carried as a state: d ln|N| / d eta = (d ReOmega / d eta) / (4 ReOmega)
// integrates exactly to |N| = (2 ReOmega / pi)^{1/4}, and as an ODE channel
// the division by a squeezed ReOmega amplifies the roundoff of the
// (alpha - 2 beta ImOmega)^2 cancellation in ReOmega' into the step control.
struct RiccatiEfoldRhs {
  const ModeBackground& bg;
  const CslParams& csl;
  CouplingOrder order;

  void operator()(double n, const std::array<double, 2>& y,
                  std::array<double, 2>& dydn) const {
    const double eta = bg.eta_of_n(n);
    const std::complex<double> dom =
        riccati_rhs({y[0], y[1]}, bg, csl, eta, order);
    const double calh = bg.cal_h(eta);
    dydn[0] = dom.real() / calh;
    dydn[1] = dom.imag() / calh;
  }
};

// Linearized-mode right-hand side for y = (Re g, Im g, Re g', Im g'),
// g'' = -(omega^2 + delta_omega2) g - ... written via the full C1, C2:
// g'' + C1 g' + C2 g = 0.
struct LinearRhs {
  const ModeBackground& bg;
  const CslParams& csl;
  CouplingOrder order;

  void operator()(double n, const std::array<double, 4>& y,
                  std::array<double, 4>& dydn) const {
    const double eta = bg.eta_of_n(n);
    const LinearizedCoeffs lc = linearized_coeffs(bg, csl, eta, order);
    const std::complex<double> g{y[0], y[1]};
    const std::complex<double> gp{y[2], y[3]};
    const std::complex<double> gpp = -lc.c1 * gp - lc.c2 * g;
    const double calh = bg.cal_h(eta);
    dydn[0] = gp.real() / calh;
    dydn[1] = gp.imag() / calh;
    dydn[2] = gpp.real() / calh;
    dydn[3] = gpp.imag() / calh;
  }
};

std::complex<double> omega_from_g(const ModeBackground& bg,
                                  const CslParams& csl, double eta,
                                  std::complex<double> g,
                                  std::complex<double> gp,
                                  CouplingOrder order) {
  const LinearizedCoeffs lc = linearized_coeffs(bg, csl, eta, order);
  const CouplingSet cs = couplings_at(bg, csl, eta, order);
  const double gm = csl.gamma_over_m0sq();
  const std::complex<double> denom = 2.0 * (I + 2.0 * gm * cs.C.f);
  return (gp / g - 0.5 * lc.c1) / denom;
}

std::complex<double> g_prime_from_omega(const ModeBackground& bg,
                                        const CslParams& csl, double eta,
                                        std::complex<double> omega,
                                        CouplingOrder order) {
  const LinearizedCoeffs lc = linearized_coeffs(bg, csl, eta, order);
  const CouplingSet cs = couplings_at(bg, csl, eta, order);
  const double gm = csl.gamma_over_m0sq();
  const std::complex<double> denom = 2.0 * (I + 2.0 * gm * cs.C.f);
  // with g = 1: g' = denom * Omega + C1/2
  return denom * omega + 0.5 * lc.c1;
}

// Attracting root of the width flow (rhs = 0). Where the relaxation rate
// dwarfs the coefficient drift the true width sits on this root up to
// O(drift/relaxation), which is far below the ODE tolerance exactly in the
// regime where explicit stepping becomes hopeless.
std::complex<double> omega_quasi_static(const ModeBackground& bg,
                                        const CslParams& csl, double eta,
                                        CouplingOrder order) {
  const double w2 = bg.omega2(eta);
  const double gm = csl.gamma_over_m0sq();
  std::complex<double> a2 = -2.0 * I, a1 = 0.0, a0 = 0.5 * I * w2;
  if (csl.gamma != 0.0) {
    const CouplingSet cs = couplings_at(bg, csl, eta, order);
    a2 = -2.0 * (I + 2.0 * gm * cs.C.f);
    a1 = 4.0 * I * gm * cs.B.f;
    a0 = gm * cs.A.f + 0.5 * I * w2;
  }
  const std::complex<double> disc = std::sqrt(a1 * a1 - 4.0 * a2 * a0);
  // d rhs / d omega = 2 a2 omega + a1 equals -disc at (-a1 - disc)/(2 a2)
  // and +disc at the other root; the principal sqrt has Re >= 0, so the
  // first root is the attracting (or adiabatically followed) one
  std::complex<double> om = (-a1 - disc) / (2.0 * a2);
  if (!(om.real() > 0.0)) {
    const std::complex<double> other = (-a1 + disc) / (2.0 * a2);
    if (other.real() > 0.0) om = other;
  }
  return om;
}

// Width relaxation rate in the e-fold clock, |d rhs / d omega| / (aH).
double riccati_rate(const ModeBackground& bg, const CslParams& csl, double eta,
                    std::complex<double> omega, CouplingOrder order) {
  std::complex<double> fp = -4.0 * I * omega;
  if (csl.gamma != 0.0) {
    const double gm = csl.gamma_over_m0sq();
    const CouplingSet cs = couplings_at(bg, csl, eta, order);
    fp = -4.0 * (I + 2.0 * gm * cs.C.f) * omega + 4.0 * I * gm * cs.B.f;
  }
  return std::abs(fp) / bg.cal_h(eta);
}

// Integrate the width flow over one era segment. Chunks whose relaxation
// rate stays below kStiffRate go through the explicit integrator; above it
// the state advances on the quasi-static root (relative error ~ 1/rate),
// with cubic-Hermite dense segments so sampling and downstream consumers see
// a continuous path.
void march_riccati(const ModeBackground& bg, const CslParams& csl,
                   const EvolveOptions& opts, double n0, double n1,
                   std::array<double, 2>& y, DenseOutput<2>& dense,
                   int& quasi_static_chunks) {
  if (!(n1 > n0)) return;
  RiccatiEfoldRhs rhs{bg, csl, opts.order};
  constexpr double kStiffRate = 1e4;
  constexpr double kChunk = 1.0 / 16.0;
  constexpr int kSub = 8;
  OdeOptions chunk_ode = opts.ode;
  chunk_ode.max_steps = std::min<std::size_t>(chunk_ode.max_steps, 500'000);

  auto qs_at = [&](double n) {
    return omega_quasi_static(bg, csl, bg.eta_of_n(n), opts.order);
  };
  auto rate_at = [&](double n, std::complex<double> om) {
    return riccati_rate(bg, csl, bg.eta_of_n(n), om, opts.order);
  };
  // slope of the quasi-static root in the e-fold clock, one-sided at the
  // segment edges (couplings are era-discontinuous)
  auto qs_slope = [&](double n) {
    const double d = 1e-4;
    const double lo = std::max(n0, n - d), hi = std::min(n1, n + d);
    return (qs_at(hi) - qs_at(lo)) / (hi - lo);
  };

  double n = n0;
  const double n_eps = 1e-12 * std::max({1.0, std::abs(n0), std::abs(n1)});
  while (n < n1 - n_eps) {
    const double nc = std::min(n + kChunk, n1);
    const std::complex<double> om_here{y[0], y[1]};
    const bool stiff = rate_at(n, om_here) > kStiffRate ||
                       rate_at(nc, qs_at(nc)) > kStiffRate;

    if (!stiff) {
      try {
        integrate_dopri5<2>(rhs, n, nc, y, chunk_ode, dense);
        n = nc;
        continue;
      } catch (const std::runtime_error&) {
        // the rate spiked inside the chunk; fill the remainder from the
        // quasi-static root, restarting at the last accepted time
        if (!dense.empty()) n = std::min(dense.t_back(), nc);
        if (!(n < nc - n_eps)) {
          n = nc;
          continue;
        }
      }
    }

    ++quasi_static_chunks;
    std::complex<double> om_a{y[0], y[1]};
    const double h_sub = (nc - n) / kSub;
    for (int s = 0; s < kSub; ++s) {
      const double na = n + s * h_sub;
      const double nb = s + 1 == kSub ? nc : n + (s + 1) * h_sub;
      const std::complex<double> om_b = qs_at(nb);
      if (!(om_b.real() > 0.0))
        throw std::runtime_error(
            "march_riccati: quasi-static width root lost positivity");
      const std::complex<double> f_a = qs_slope(na);
      const std::complex<double> f_b = qs_slope(nb);

      DenseSegment<2> seg;
      seg.t0 = na;
      seg.h = nb - na;
      const std::array<double, 2> y0{om_a.real(), om_a.imag()};
      const std::array<double, 2> y1{om_b.real(), om_b.imag()};
      const std::array<double, 2> f0{f_a.real(), f_a.imag()};
      const std::array<double, 2> f1{f_b.real(), f_b.imag()};
      for (std::size_t i = 0; i < 2; ++i) {
        const double ydiff = y1[i] - y0[i];
        const double bspl = seg.h * f0[i] - ydiff;
        seg.cont[0][i] = y0[i];
        seg.cont[1][i] = ydiff;
        seg.cont[2][i] = bspl;
        seg.cont[3][i] = ydiff - seg.h * f1[i] - bspl;
        seg.cont[4][i] = 0.0;
      }
      dense.push(seg);
      om_a = om_b;
    }
    y = {om_a.real(), om_a.imag()};
    n = nc;
  }
}

}  // namespace

std::complex<double> bunch_davies_omega(const ModeBackground& bg, double eta) {
  const ModeValue m = free_mode(bg, eta, ModeForm::Continued);
  return m.gp / (2.0 * I * m.g);
}

std::complex<double> riccati_rhs(std::complex<double> omega,
                                 const ModeBackground& bg, const CslParams& csl,
                                 double eta, CouplingOrder order) {
  const double w2 = bg.omega2(eta);
  if (csl.gamma == 0.0)
    return -2.0 * I * omega * omega + 0.5 * I * w2;
  const CouplingSet cs = couplings_at(bg, csl, eta, order);
  const double g = csl.gamma_over_m0sq();
  return -2.0 * (I + 2.0 * g * cs.C.f) * omega * omega +
         4.0 * I * g * cs.B.f * omega + g * cs.A.f + 0.5 * I * w2;
}

std::complex<double> OmegaRun::omega_at(double n) const {
  if (!has_dense) throw std::logic_error("omega_at: no dense output stored");
  const bool use_inf = n <= 0.0 || dense_rad.empty();
  const auto y = (use_inf ? dense_inf : dense_rad).eval(use_inf ? std::min(n, 0.0) : n);
  return {y[0], y[1]};
}

double OmegaRun::log_norm_at(double n) const {
  return 0.25 * std::log(2.0 * omega_at(n).real() / M_PI);
}

namespace {

OmegaRun integrate_omega_impl(const ModeBackground& bg, const CslParams& csl,
                              const EvolveOptions& opts,
                              const std::vector<double>& sample_n,
                              OmegaBackend backend) {
  OmegaRun run;
  const double x_end = bg.x_end();
  run.n_ini = -std::log(opts.x_ini / x_end);
  run.n_final = opts.n_rad_efolds;
  if (run.n_ini >= 0.0)
    throw std::invalid_argument("integrate_omega: x_ini must exceed x_end");

  const double eta_ini = bg.eta_of_n(run.n_ini);

  std::vector<double> wanted(sample_n);
  std::sort(wanted.begin(), wanted.end());
  auto in_range = [&](double n) {
    return n >= run.n_ini - 1e-12 && n <= run.n_final + 1e-12;
  };

  if (backend == OmegaBackend::DirectRiccati) {
    const std::complex<double> om0 = bunch_davies_omega(bg, eta_ini);
    std::array<double, 2> y{om0.real(), om0.imag()};

    march_riccati(bg, csl, opts, run.n_ini, 0.0, y, run.dense_inf,
                  run.quasi_static_chunks);
    if (run.n_final > 0.0)
      march_riccati(bg, csl, opts, 0.0, run.n_final, y, run.dense_rad,
                    run.quasi_static_chunks);
    run.has_dense = true;
    run.omega_final = {y[0], y[1]};
    for (double n : wanted) {
      if (!in_range(n)) continue;
      const double nc = std::clamp(n, run.n_ini, run.n_final);
      run.samples.push_back({nc, bg.eta_of_n(nc), run.omega_at(nc)});
    }
    return run;
  }

  // LinearizedMode: integrate g piecewise, rescaling g -> 1 at checkpoints
  // (Omega is invariant under constant rescalings of g). A representation
  // switch is recorded whenever |g| collapsed by more than 1e3 within a
  // chunk, which is the signature of stepping over a Riccati pole.
  LinearRhs rhs{bg, csl, opts.order};
  const std::complex<double> om0 = bunch_davies_omega(bg, eta_ini);

  // chunk boundaries: uniform grid merged with requested sample times and
  // the era transition
  std::vector<double> knots;
  const int n_chunks = 512;
  for (int i = 0; i <= n_chunks; ++i)
    knots.push_back(run.n_ini +
                    (run.n_final - run.n_ini) * static_cast<double>(i) /
                        static_cast<double>(n_chunks));
  knots.push_back(0.0);
  for (double n : wanted)
    if (in_range(n)) knots.push_back(std::clamp(n, run.n_ini, run.n_final));
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [](double a, double b) {
                            return std::abs(a - b) < 1e-13;
                          }),
              knots.end());

  std::complex<double> omega = om0;
  std::complex<double> g = 1.0;
  std::complex<double> gp =
      g_prime_from_omega(bg, csl, eta_ini, omega, opts.order);
  std::array<double, 4> y{g.real(), g.imag(), gp.real(), gp.imag()};

  auto emit = [&](double n) {
    auto it = std::lower_bound(wanted.begin(), wanted.end(), n - 1e-12);
    if (it != wanted.end() && std::abs(*it - n) < 1e-12)
      run.samples.push_back({n, bg.eta_of_n(n), omega});
  };
  emit(run.n_ini);

  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double n0 = knots[i];
    const double n1 = knots[i + 1];
    if (n1 - n0 < 1e-13) continue;
    integrate_dopri5<4>(rhs, n0, n1, y, opts.ode);
    g = {y[0], y[1]};
    gp = {y[2], y[3]};
    const double eta1 = bg.eta_of_n(n1);
    omega = omega_from_g(bg, csl, eta1, g, gp, opts.order);
    if (std::abs(g) < 1e-3) ++run.representation_switches;
    emit(n1);
    // restart the linear representation from the current Omega (Omega is
    // invariant under constant rescalings of g, so this also keeps |g| ~ 1)
    g = 1.0;
    gp = g_prime_from_omega(bg, csl, eta1, omega, opts.order);
    y = {g.real(), g.imag(), gp.real(), gp.imag()};
  }
  run.omega_final = omega;
  return run;
}

}  // namespace

OmegaRun integrate_omega(const ModeBackground& bg, const CslParams& csl,
                         const EvolveOptions& opts,
                         const std::vector<double>& sample_n,
                         OmegaBackend backend) {
  try {
    return integrate_omega_impl(bg, csl, opts, sample_n, backend);
  } catch (const std::runtime_error&) {
    // the requested representation broke down (step collapse at a Riccati
    // pole or step budget): retry with the other one and flag the switch
    const OmegaBackend other = backend == OmegaBackend::DirectRiccati
                                   ? OmegaBackend::LinearizedMode
                                   : OmegaBackend::DirectRiccati;
    OmegaRun run = integrate_omega_impl(bg, csl, opts, sample_n, other);
    run.backend_switched = true;
    return run;
  }
}

LinearizedCoeffs linearized_coeffs(const ModeBackground& bg,
                                   const CslParams& csl, double eta,
                                   CouplingOrder order) {
  const CouplingSet cs = couplings_at(bg, csl, eta, order);
  const double gm = csl.gamma_over_m0sq();
  const double w2 = bg.omega2(eta);

  const std::complex<double> D = 1.0 - 2.0 * I * gm * cs.C.f;
  const std::complex<double> Dp = -2.0 * I * gm * cs.C.d1;

  LinearizedCoeffs lc;
  lc.c1 = -2.0 * I * gm * (2.0 * cs.B.f - cs.C.d1 / D);
  lc.c1_prime =
      -2.0 * I * gm * (2.0 * cs.B.d1 - (cs.C.d2 * D - cs.C.d1 * Dp) / (D * D));
  lc.c2 = D * (w2 - 2.0 * I * gm * cs.A.f);
  lc.delta_omega2 = lc.c2 - 0.5 * lc.c1_prime - 0.25 * lc.c1 * lc.c1 - w2;
  return lc;
}

std::complex<double> omega_perturbative(const ModeBackground& bg,
                                        const CslParams& csl, double eta,
                                        double eta_ini, const QuadOptions& quad,
                                        CouplingOrder order) {
  const double n_lo = bg.n_of_eta(eta_ini);
  const double n_hi = bg.n_of_eta(eta);
  // assemble Omega0 with the cancellation-free real part: at squeezed times
  // Re[g'/(2ig)] loses ~|Omega|/ReOmega in relative accuracy
  const std::complex<double> om0{re_omega_free(bg, eta),
                                 omega_free(bg, eta).imag()};
  if (csl.gamma == 0.0) return om0;

  // delta Omega(eta) = Int F1(s) (g0(s)/g0(eta))^2 ds in the e-fold clock,
  // with F1 the Gamma-linear part of the width flow at the free width. The
  // mode ratio keeps |g0(s)| <= O(|g0(eta)|) for s <= eta, so the kernel
  // never overflows; everything lives in the undilated wavefunction frame.
  const double gm = csl.gamma_over_m0sq();
  const ModeValue m = free_mode(bg, eta, ModeForm::Continued);
  auto integrand = [&](double nb, bool imag_part) {
    const double etab = bg.eta_of_n(nb);
    const ModeValue mb = free_mode(bg, etab, ModeForm::Continued);
    const std::complex<double> om_b = mb.gp / (2.0 * I * mb.g);
    const CouplingSet cs = couplings_at(bg, csl, etab, order);
    const std::complex<double> f1 =
        gm * (cs.A.f + 4.0 * I * cs.B.f * om_b - 4.0 * cs.C.f * om_b * om_b);
    const std::complex<double> ratio = (mb.g * mb.g) / (m.g * m.g);
    const std::complex<double> val = f1 * ratio / bg.cal_h(etab);
    return imag_part ? val.imag() : val.real();
  };

  std::vector<double> breaks;
  if (n_lo < 0.0 && n_hi > 0.0) breaks.push_back(0.0);
  const double re =
      integrate_gk([&](double nb) { return integrand(nb, false); }, n_lo, n_hi,
                   quad, breaks)
          .value;
  const double im =
      integrate_gk([&](double nb) { return integrand(nb, true); }, n_lo, n_hi,
                   quad, breaks)
          .value;
  return om0 + std::complex<double>{re, im};
}

double collapse_r(const ModeBackground& bg, double eta,
                  std::complex<double> omega) {
  return re_omega_free(bg, eta) / omega.real();
}

}  // namespace cslcosmo
