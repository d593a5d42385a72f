#pragma once
#include <cmath>
#include <stdexcept>

#include "cslcosmo/jet.hpp"

namespace cslcosmo {

enum class Era { Inflation, Radiation };

// Background cosmology in reduced Planck units (M_Pl = 1, c = hbar = 1).
// Inflation is de Sitter at leading order, a = -1/(H eta) for eta < eta_end < 0.
// Radiation follows instantaneously: a = a_r (eta - eta_r) with eta_r = 2 eta_end,
// a_r = 1/(H_end eta_end^2), so a and a' are continuous at eta_end.
struct CosmologyParams {
  double h_end = 1e-5;    // Hubble rate during inflation (constant at leading order)
  double eps1 = 0.005;    // first Hubble-flow parameter
  double eps2 = 0.0;      // second Hubble-flow parameter (enters couplings only)
  double eta_end = -1.0;  // conformal time at the end of inflation, < 0

  double a_end() const { return -1.0 / (h_end * eta_end); }
  double eta_r() const { return 2.0 * eta_end; }
  double a_r_slope() const { return 1.0 / (h_end * eta_end * eta_end); }
  double rho_end() const { return 3.0 * h_end * h_end; }

  void validate() const {
    if (!(h_end > 0.0)) throw std::invalid_argument("h_end must be positive");
    if (!(eta_end < 0.0)) throw std::invalid_argument("eta_end must be negative");
    if (!(eps1 > 0.0 && eps1 < 1.0)) throw std::invalid_argument("eps1 must lie in (0,1)");
  }
};

// Geometry seen by a single comoving Fourier mode k. Provides the background
// quantities the dynamics needs as functions of conformal time or of the
// e-fold clock n = ln(a / a_end) (n < 0 during inflation, n > 0 in radiation).
class ModeBackground {
 public:
  ModeBackground(const CosmologyParams& cosmo, double k) : c_(cosmo), k_(k) {
    c_.validate();
    if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  }

  // Convenience constructor: pick k so that the mode sits delta_n e-folds
  // outside the Hubble radius at the end of inflation, k/(aH)|_end = exp(-delta_n).
  static ModeBackground from_delta_n(const CosmologyParams& cosmo, double delta_n) {
    return ModeBackground(cosmo, std::exp(-delta_n) / (-cosmo.eta_end));
  }

  const CosmologyParams& cosmo() const { return c_; }
  double k() const { return k_; }

  double x_end() const { return -k_ * c_.eta_end; }        // -k eta_end = k/(aH)|_end
  double delta_n() const { return -std::log(x_end()); }    // e-folds of super-Hubble evolution

  Era era_at(double eta) const { return eta <= c_.eta_end ? Era::Inflation : Era::Radiation; }
  Era era_at_n(double n) const { return n <= 0.0 ? Era::Inflation : Era::Radiation; }

  // e-fold clock <-> conformal time
  double n_of_eta(double eta) const {
    return std::log(a_of_eta(eta) / c_.a_end());
  }
  double eta_of_n(double n) const {
    if (n <= 0.0) return c_.eta_end * std::exp(-n);                       // x = x_end e^{-n}
    return c_.eta_r() + (-c_.eta_end) * std::exp(n);                      // y = x_end e^{n}
  }

  double a_of_eta(double eta) const {
    if (eta <= c_.eta_end) return -1.0 / (c_.h_end * eta);
    return c_.a_r_slope() * (eta - c_.eta_r());
  }

  double hubble(double eta) const {  // H(eta)
    if (eta <= c_.eta_end) return c_.h_end;
    const double d = eta - c_.eta_r();
    return 1.0 / (c_.a_r_slope() * d * d);
  }

  double cal_h(double eta) const {  // conformal Hubble aH
    if (eta <= c_.eta_end) return -1.0 / eta;
    return 1.0 / (eta - c_.eta_r());
  }

  // k/(aH): the paper's l_H/lambda ratio (e^{-delta_n} at the end of inflation)
  double k_over_ah(double eta) const { return k_ / cal_h(eta); }

  // r_c/lambda = k r_c / a for a given smearing length (Planck units)
  double rc_over_lambda(double eta, double r_c) const { return k_ * r_c / a_of_eta(eta); }

  double omega2(double eta) const {
    if (eta <= c_.eta_end) return k_ * k_ - 2.0 / (eta * eta);
    return k_ * k_ / 3.0;
  }

  double omega2_prime(double eta) const {
    if (eta <= c_.eta_end) return 4.0 / (eta * eta * eta);
    return 0.0;
  }

  // Mukhanov-Sasaki z: sqrt(2 eps1) a during inflation (c_s = 1),
  // 2 sqrt(3) a during radiation (c_s^2 = 1/3).
  double z_ms(double eta) const {
    if (eta <= c_.eta_end) return std::sqrt(2.0 * c_.eps1) * a_of_eta(eta);
    return 2.0 * std::sqrt(3.0) * a_of_eta(eta);
  }

  // Amplitude dilation of the v variable at the era transition, from
  // continuity of zeta = v/z and of the Bardeen potential: s = z_rad/z_inf
  // at eta_end. Second moments of v jump by s^2, Omega by 1/s^2.
  double matching_s() const { return std::sqrt(6.0 / c_.eps1); }

  // conformal time at which the mode crosses the smearing scale (a = k r_c)
  double eta_rc_cross(double r_c) const {
    const double a_cross = k_ * r_c;
    if (a_cross <= c_.a_end())  // during inflation
      return -1.0 / (c_.h_end * a_cross);
    return c_.eta_r() + a_cross / c_.a_r_slope();
  }

  // scale factor as a jet in conformal time (for coupling derivatives)
  Jet2 a_jet(double eta) const {
    const Jet2 e = Jet2::variable(eta);
    if (eta <= c_.eta_end) return -1.0 / (c_.h_end * e);
    return c_.a_r_slope() * (e - c_.eta_r());
  }

 private:
  CosmologyParams c_;
  double k_;
};

}  // namespace cslcosmo
