#pragma once

#include <cstdint>
#include <vector>

#include "cslcosmo/background.hpp"
#include "cslcosmo/couplings.hpp"
#include "cslcosmo/rng.hpp"
#include "cslcosmo/wavefunction.hpp"

namespace cslcosmo {

// Gaussian-ansatz parameters for one stochastic trajectory. The width block
// (re_omega, im_omega) receives no noise and is shared by all trajectories;
// v_bar (wavepacket centre), chi (linear phase) and sigma (global phase) are
// driven by one Wiener process per trajectory. log_norm is redundant with
// |N| = (2 ReOmega / pi)^{1/4} but integrated as a cross-check.
struct WavefunctionState {
  double re_omega = 0.0;
  double im_omega = 0.0;
  double v_bar = 0.0;
  double chi = 0.0;
  double sigma = 0.0;
  double log_norm = 0.0;
};

// Wiener increments as a pure function of (seed, stream, step): variance
// d eta per step, reproducible and order-independent. Distinct stream indices
// serve distinct trajectories (and, when both quadratures of a mode are
// evolved, the real and imaginary parts take separate streams).
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double dw(std::uint64_t step, double deta) const {
    return std::sqrt(deta) * rng_.normal(step);
  }

 private:
  CounterRng rng_;
};

// One Euler-Maruyama update of the six-equation system at fixed background
// time eta over the increment deta, with Wiener increment dw. Returns false
// (state untouched) if the resulting re_omega is not positive; the caller is
// expected to halve deta and retry with a fresh increment.
bool sde_step(WavefunctionState& state, double dw, const ModeBackground& bg,
              const CslParams& csl, double eta, double deta,
              CouplingOrder order = CouplingOrder::Full);

struct EnsembleOptions {
  int n_traj = 1024;
  std::uint64_t seed = 1;
  int threads = 0;            // 0: hardware concurrency
  double dn_max = 1e-3;       // Euler-Maruyama cap, e-folds
  double osc_cap = 0.05;      // additional cap dn <= osc_cap / max(x, 1)
  double noise_log_floor = -45.0;  // noise switches on once the smearing
                                   // exponent -k^2 r_c^2/(2 a^2) exceeds this
  EvolveOptions evolve{};
};

// Ensemble statistics at one output time. Means and standard errors are over
// trajectories; the reduction runs in trajectory-index order with compensated
// summation, so results do not depend on the thread count.
struct EnsembleStat {
  double n = 0.0;
  double eta = 0.0;
  double mean_v = 0.0;
  double stderr_v = 0.0;
  double mean_v2 = 0.0;      // E[v_bar^2]
  double stderr_v2 = 0.0;
  double mean_chi = 0.0;
  double mean_sigma = 0.0;
  double re_omega = 0.0;     // deterministic width (shared path)
  double im_omega = 0.0;
  double log_norm = 0.0;
  double var_re_omega = 0.0;  // sample variance across trajectories
  // E[v^2] in the dilated (zeta-matched) frame of the moment routes: equals
  // E[v_bar^2] + (4 ReOmega)^{-1} before the transition and picks up the
  // free-evolved (s^2 - 1) image of the transition-time moments after it.
  double p_vv = 0.0;
  double collapse_r_det = 0.0;  // ReOmega_free / ReOmega (deterministic)
  double collapse_r_mc = 0.0;   // (4 ReOmega)^{-1} / E[v_bar^2]
};

struct EnsembleRun {
  std::vector<EnsembleStat> stats;
  OmegaRun omega;  // the shared deterministic width path
  int n_traj = 0;
  std::uint64_t seed = 0;
  double n_noise_on = 0.0;  // e-fold time the Euler-Maruyama grid starts
  std::size_t n_steps = 0;  // grid steps per trajectory
};

// Monte-Carlo integration of the stochastic sector. The deterministic width
// is integrated once to tight tolerance; trajectories advance (v_bar, chi,
// sigma) by Euler-Maruyama on a fixed grid slaved to that path. Before the
// noise amplitude is representable (smearing exponent below noise_log_floor)
// the centre stays exactly at zero, so the grid starts there.
EnsembleRun run_ensemble(const ModeBackground& bg, const CslParams& csl,
                         const EnsembleOptions& opts,
                         const std::vector<double>& sample_n);

}  // namespace cslcosmo
