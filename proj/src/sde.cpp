#include "cslcosmo/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "cslcosmo/modes.hpp"
#include "cslcosmo/ode.hpp"

namespace cslcosmo {

namespace {

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

// per-node coefficients shared by every trajectory
struct StepCache {
  double n = 0.0;
  double eta = 0.0;
  double deta = 0.0;  // to the next node (0 at the last node)
  double re = 0.0, im = 0.0;
  double a2alpha = 0.0, a2beta = 0.0;
};

}  // namespace

bool sde_step(WavefunctionState& st, double dw, const ModeBackground& bg,
              const CslParams& csl, double eta, double deta,
              CouplingOrder order) {
  const CouplingSet cs = couplings_at(bg, csl, eta, order);
  const double gm = csl.gamma_over_m0sq();
  const double sg = std::sqrt(gm);
  const double w2 = bg.omega2(eta);
  const double a = bg.a_of_eta(eta);
  const double a2 = a * a;
  const double re = st.re_omega, im = st.im_omega;

  const double re2mim2 = re * re - im * im;
  const double dre = gm * cs.A.f - 4.0 * gm * cs.C.f * re2mim2 +
                     4.0 * re * im - 4.0 * gm * cs.B.f * im;
  const double dim = 0.5 * w2 - 2.0 * re2mim2 - 8.0 * gm * cs.C.f * re * im +
                     4.0 * gm * cs.B.f * re;
  const double re_new = re + dre * deta;
  if (!(re_new > 0.0)) return false;

  const double a2al = a2 * cs.alpha.f;
  const double a2be = a2 * cs.beta.f;
  const double am = a2al - 2.0 * a2be * im;  // a^2 (alpha - 2 beta Im Omega)
  const double v = st.v_bar, chi = st.chi;

  st.v_bar += (chi - 2.0 * v * im) * deta + sg / (2.0 * re) * am * dw;
  st.chi += (2.0 * im * chi - 4.0 * re * re * v +
             8.0 * gm * a2be * re * v * am) *
                deta +
            2.0 * sg * a2be * re * dw;
  st.sigma += (-re + 2.0 * re * re * v * v - 0.5 * chi * chi +
               0.5 * gm * a2be * am * (1.0 - 8.0 * re * v * v)) *
                  deta -
              2.0 * sg * a2be * re * v * dw;
  st.log_norm += dre * deta / (4.0 * re);
  st.re_omega = re_new;
  st.im_omega = im + dim * deta;
  return true;
}

EnsembleRun run_ensemble(const ModeBackground& bg, const CslParams& csl,
                         const EnsembleOptions& opts,
                         const std::vector<double>& sample_n) {
  if (opts.n_traj < 2)
    throw std::invalid_argument("run_ensemble: n_traj must be at least 2");

  EnsembleRun run;
  run.n_traj = opts.n_traj;
  run.seed = opts.seed;
  run.omega = integrate_omega(bg, csl, opts.evolve, {},
                              OmegaBackend::DirectRiccati);
  const double n_ini = run.omega.n_ini;
  const double n_final = run.omega.n_final;

  const double gm = csl.gamma_over_m0sq();
  const double sg = std::sqrt(gm);
  const double s_match = bg.matching_s();

  // e-fold time the noise amplitude becomes representable: the couplings all
  // carry exp(-k^2 r_c^2 / (2 a^2)), so before a = k r_c / sqrt(-2 floor)
  // every kick is below ~1e-20 of scale and the centre stays at zero
  double n_on = n_final;
  if (csl.gamma > 0.0) {
    const double a_on =
        bg.k() * csl.r_c / std::sqrt(-2.0 * opts.noise_log_floor);
    n_on = std::clamp(std::log(a_on / bg.cosmo().a_end()), n_ini, n_final);
  }
  run.n_noise_on = n_on;

  // deterministic global-phase prefix along the shared path (v_bar = chi = 0)
  const double sigma_det_end = csl.gamma > 0.0 ? n_on : n_final;
  DenseOutput<1> sigma_det;
  {
    auto rhs = [&](double n, const std::array<double, 1>&,
                   std::array<double, 1>& d) {
      const double eta = bg.eta_of_n(n);
      const std::complex<double> om = run.omega.omega_at(std::min(n, n_final));
      double drift = -om.real();
      if (csl.gamma > 0.0) {
        const CouplingSet cs = couplings_at(bg, csl, eta, opts.evolve.order);
        const double a2 = bg.a_of_eta(eta) * bg.a_of_eta(eta);
        const double a2be = a2 * cs.beta.f;
        const double am = a2 * cs.alpha.f - 2.0 * a2be * om.imag();
        drift += 0.5 * gm * a2be * am;
      }
      d[0] = drift / bg.cal_h(eta);
    };
    std::array<double, 1> y{0.0};
    if (sigma_det_end > n_ini)
      integrate_dopri5<1>(rhs, n_ini, sigma_det_end, y, opts.evolve.ode,
                          sigma_det);
  }
  auto sigma_det_at = [&](double n) {
    if (sigma_det.empty()) return 0.0;
    return sigma_det.eval(std::clamp(n, n_ini, sigma_det_end))[0];
  };

  // requested output times, clamped and deduplicated
  std::vector<double> out_n;
  for (double n : sample_n) out_n.push_back(std::clamp(n, n_ini, n_final));
  std::sort(out_n.begin(), out_n.end());
  out_n.erase(std::unique(out_n.begin(), out_n.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-13; }),
              out_n.end());

  // Euler-Maruyama grid: dense-path segment boundaries in [n_on, n_final],
  // the era transition, and the output times, refined to the step caps
  std::vector<double> knots{n_on, n_final};
  if (n_on < 0.0 && n_final > 0.0) knots.push_back(0.0);
  for (double n : out_n)
    if (n >= n_on) knots.push_back(n);
  auto harvest = [&](const DenseOutput<2>& d) {
    for (const auto& seg : d.segments()) {
      const double t = seg.t0;
      if (t > n_on && t < n_final) knots.push_back(t);
    }
  };
  harvest(run.omega.dense_inf);
  if (!run.omega.dense_rad.empty()) harvest(run.omega.dense_rad);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-13; }),
              knots.end());

  std::vector<double> grid;
  grid.reserve(knots.size() * 4);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    grid.push_back(a);
    const double x = bg.k_over_ah(bg.eta_of_n(a));
    const double cap = std::min(opts.dn_max, opts.osc_cap / std::max(x, 1.0));
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / cap)));
    for (int p = 1; p < pieces; ++p)
      grid.push_back(a + (b - a) * static_cast<double>(p) / pieces);
  }
  if (!knots.empty()) grid.push_back(knots.back());

  const std::size_t n_nodes = grid.size();
  run.n_steps = n_nodes > 0 ? n_nodes - 1 : 0;

  // shared per-node coefficients
  std::vector<StepCache> cache(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    StepCache& c = cache[i];
    c.n = grid[i];
    c.eta = bg.eta_of_n(c.n);
    const std::complex<double> om = run.omega.omega_at(c.n);
    c.re = om.real();
    c.im = om.imag();
    if (csl.gamma > 0.0) {
      const CouplingSet cs = couplings_at(bg, csl, c.eta, opts.evolve.order);
      const double a2 = bg.a_of_eta(c.eta) * bg.a_of_eta(c.eta);
      c.a2alpha = a2 * cs.alpha.f;
      c.a2beta = a2 * cs.beta.f;
    }
  }
  for (std::size_t i = 0; i + 1 < n_nodes; ++i)
    cache[i].deta = cache[i + 1].eta - cache[i].eta;

  // map output times to grid indices (and the junction, if present)
  std::vector<std::ptrdiff_t> out_idx(out_n.size(), -1);
  std::ptrdiff_t junction_idx = -1;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    for (std::size_t j = 0; j < out_n.size(); ++j)
      if (std::abs(grid[i] - out_n[j]) < 1e-12) out_idx[j] = static_cast<std::ptrdiff_t>(i);
    if (std::abs(grid[i]) < 1e-12) junction_idx = static_cast<std::ptrdiff_t>(i);
  }

  const std::size_t n_out = out_n.size();
  const std::size_t n_traj = static_cast<std::size_t>(opts.n_traj);
  // per-trajectory records in trajectory-major order
  std::vector<double> rec_v(n_out * n_traj, 0.0);
  std::vector<double> rec_chi(n_out * n_traj, 0.0);
  std::vector<double> rec_sigma(n_out * n_traj, 0.0);
  std::vector<double> junc_v(n_traj, 0.0), junc_p(n_traj, 0.0);

  auto worker = [&](std::size_t t0, std::size_t t1) {
    for (std::size_t t = t0; t < t1; ++t) {
      NoiseStream noise(opts.seed, t);
      double v = 0.0, chi = 0.0, sigma = 0.0;
      std::size_t next_out = 0;
      // outputs before the grid starts: centre still exactly zero
      while (next_out < n_out && out_n[next_out] < n_on - 1e-12) {
        rec_sigma[next_out * n_traj + t] = sigma_det_at(out_n[next_out]);
        ++next_out;
      }
      for (std::size_t i = 0; i < n_nodes; ++i) {
        const StepCache& c = cache[i];
        if (static_cast<std::ptrdiff_t>(i) == junction_idx) {
          junc_v[t] = v;
          junc_p[t] = chi - 2.0 * c.im * v;
        }
        if (next_out < n_out &&
            out_idx[next_out] == static_cast<std::ptrdiff_t>(i)) {
          rec_v[next_out * n_traj + t] = v;
          rec_chi[next_out * n_traj + t] = chi;
          rec_sigma[next_out * n_traj + t] = sigma_det_at(n_on) + sigma;
          ++next_out;
        }
        if (i + 1 == n_nodes || csl.gamma == 0.0) continue;
        const double dw = noise.dw(i, c.deta);
        const double am = c.a2alpha - 2.0 * c.a2beta * c.im;
        const double dv = (chi - 2.0 * v * c.im) * c.deta +
                          sg / (2.0 * c.re) * am * dw;
        const double dchi = (2.0 * c.im * chi - 4.0 * c.re * c.re * v +
                             8.0 * gm * c.a2beta * c.re * v * am) *
                                c.deta +
                            2.0 * sg * c.a2beta * c.re * dw;
        const double dsig = (-c.re + 2.0 * c.re * c.re * v * v -
                             0.5 * chi * chi +
                             0.5 * gm * c.a2beta * am * (1.0 - 8.0 * c.re * v * v)) *
                                c.deta -
                            2.0 * sg * c.a2beta * c.re * v * dw;
        v += dv;
        chi += dchi;
        sigma += dsig;
      }
    }
  };

  if (csl.gamma > 0.0) {
    unsigned hw = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                   : std::thread::hardware_concurrency();
    hw = std::max(1u, std::min<unsigned>(hw, static_cast<unsigned>(n_traj)));
    if (hw == 1) {
      worker(0, n_traj);
    } else {
      std::vector<std::thread> pool;
      const std::size_t block = (n_traj + hw - 1) / hw;
      for (unsigned w = 0; w < hw; ++w) {
        const std::size_t t0 = w * block;
        const std::size_t t1 = std::min(n_traj, t0 + block);
        if (t0 < t1) pool.emplace_back(worker, t0, t1);
      }
      for (auto& th : pool) th.join();
    }
  } else {
    // no noise: centres stay at zero, only the deterministic phase moves
    for (std::size_t j = 0; j < n_out; ++j)
      for (std::size_t t = 0; t < n_traj; ++t)
        rec_sigma[j * n_traj + t] = sigma_det_at(out_n[j]);
  }

  // junction moments in the undilated frame (means + width)
  double pj_vv = 0.0, pj_x = 0.0, pj_pp = 0.0;
  bool have_junction = n_on <= 1e-12 && n_final > 0.0;
  if (have_junction) {
    KahanSum sv2, svp, sp2;
    for (std::size_t t = 0; t < n_traj; ++t) {
      sv2.add(junc_v[t] * junc_v[t]);
      svp.add(junc_v[t] * junc_p[t]);
      sp2.add(junc_p[t] * junc_p[t]);
    }
    const std::complex<double> om_j = run.omega.omega_at(0.0);
    const double re_j = om_j.real(), im_j = om_j.imag();
    pj_vv = sv2.value() / static_cast<double>(n_traj) + 1.0 / (4.0 * re_j);
    pj_x = 2.0 * svp.value() / static_cast<double>(n_traj) - im_j / re_j;
    pj_pp = sp2.value() / static_cast<double>(n_traj) +
            (re_j * re_j + im_j * im_j) / re_j;
  } else if (n_final > 0.0) {
    // noise never switched on before the transition: junction state is the
    // free width (centre exactly zero)
    const std::complex<double> om_j = run.omega.omega_at(0.0);
    const double re_j = om_j.real(), im_j = om_j.imag();
    pj_vv = 1.0 / (4.0 * re_j);
    pj_x = -im_j / re_j;
    pj_pp = (re_j * re_j + im_j * im_j) / re_j;
    have_junction = true;
  }

  // ordered reduction
  const double nt = static_cast<double>(n_traj);
  for (std::size_t j = 0; j < n_out; ++j) {
    EnsembleStat st;
    st.n = out_n[j];
    st.eta = bg.eta_of_n(st.n);
    KahanSum sv, sv2, sv4, schi, ssig;
    for (std::size_t t = 0; t < n_traj; ++t) {
      const double v = rec_v[j * n_traj + t];
      sv.add(v);
      sv2.add(v * v);
      sv4.add(v * v * v * v);
      schi.add(rec_chi[j * n_traj + t]);
      ssig.add(rec_sigma[j * n_traj + t]);
    }
    st.mean_v = sv.value() / nt;
    st.mean_v2 = sv2.value() / nt;
    st.mean_chi = schi.value() / nt;
    st.mean_sigma = ssig.value() / nt;
    const double var_v = std::max(0.0, sv2.value() / nt - st.mean_v * st.mean_v);
    const double var_v2 = std::max(0.0, sv4.value() / nt - st.mean_v2 * st.mean_v2);
    st.stderr_v = std::sqrt(var_v / std::max(1.0, nt - 1.0));
    st.stderr_v2 = std::sqrt(var_v2 / std::max(1.0, nt - 1.0));

    const std::complex<double> om = run.omega.omega_at(st.n);
    st.re_omega = om.real();
    st.im_omega = om.imag();
    st.log_norm = run.omega.log_norm_at(st.n);
    st.var_re_omega = 0.0;  // the width path is shared by construction

    const double width = 1.0 / (4.0 * st.re_omega);
    st.p_vv = st.mean_v2 + width;
    if (st.n > 0.0 && have_junction) {
      const double kappa = bg.k() / std::sqrt(3.0);
      const double arg = kappa * (st.eta - bg.cosmo().eta_end);
      const double cc = std::cos(arg);
      const double ss = std::sin(arg) / kappa;
      st.p_vv += (s_match * s_match - 1.0) *
                 (cc * cc * pj_vv + cc * ss * pj_x + ss * ss * pj_pp);
    }
    st.collapse_r_det = re_omega_free(bg, st.eta) / st.re_omega;
    st.collapse_r_mc = st.mean_v2 > 0.0
                           ? width / st.mean_v2
                           : std::numeric_limits<double>::infinity();
    run.stats.push_back(st);
  }
  return run;
}

}  // namespace cslcosmo
