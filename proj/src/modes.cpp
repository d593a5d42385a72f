#include "cslcosmo/modes.hpp"

#include <cmath>

namespace cslcosmo {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

// Bunch-Davies mode during inflation
ModeValue bd_mode(double k, double eta) {
  const double norm = 1.0 / std::sqrt(2.0 * k);
  const cd phase = std::exp(I * k * eta);
  ModeValue m;
  m.g = phase * (1.0 + I / (k * eta)) * norm;
  m.gp = phase * (I * k - 1.0 / eta - I / (k * eta * eta)) * norm;
  m.wronskian = I;
  return m;
}

// Green function of the inflationary mode equation and its eta-derivative,
// written to avoid cancellation at small k(eta - etabar).
double g_inf(double k, double eta, double etabar) {
  const double d = k * (eta - etabar);
  const double P = k * k * eta * etabar;
  if (std::abs(d) < 1e-3) {
    const double d2 = d * d;
    const double trig = 1.0 - d2 / 6.0 + d2 * d2 / 120.0;
    return (eta - etabar) * trig + (d * d2 / 3.0 - d2 * d2 * d / 30.0 + d2 * d2 * d2 * d / 840.0) / (k * P);
  }
  return ((1.0 + P) * std::sin(d) - d * std::cos(d)) / (k * P);
}

double g_inf_deta(double k, double eta, double etabar) {
  const double d = k * (eta - etabar);
  const double P = k * k * eta * etabar;
  if (std::abs(d) < 1e-3) {
    const double d2 = d * d;
    const double s3 = d * d2 / 3.0 - d2 * d2 * d / 30.0 + d2 * d2 * d2 * d / 840.0;
    return std::cos(d) + (d2 / P) * (1.0 - d2 / 6.0 + d2 * d2 / 120.0) - k * etabar * s3 / (P * P);
  }
  const double num = (1.0 + P) * std::sin(d) - d * std::cos(d);
  return std::cos(d) + k * eta * std::sin(d) / P - k * etabar * num / (P * P);
}

// mixed derivative d^2 g_inf / (d eta d etabar), grouped to avoid the
// cancellation between -k d cos(d)/P and k^2 g_inf/P at small d
double g_inf_deta_dsource(double k, double eta, double etabar) {
  const double d = k * (eta - etabar);
  const double P = k * k * eta * etabar;
  const double q = k * k * k * (eta * eta + etabar * etabar) / (P * P);
  if (std::abs(d) < 1e-3) {
    const double d2 = d * d;
    const double s3 = d * d2 / 3.0 - d2 * d2 * d / 30.0 + d2 * d2 * d2 * d / 840.0;
    return (k - q) * std::sin(d) + (k * d / P) * (d2 / 3.0 - d2 * d2 / 30.0) + k * s3 / (P * P);
  }
  return (k - q) * std::sin(d) - k * d * std::cos(d) / P + k * k * g_inf(k, eta, etabar) / P;
}

}  // namespace

ModeValue free_mode(const ModeBackground& bg, double eta, ModeForm form) {
  const double k = bg.k();
  const CosmologyParams& c = bg.cosmo();
  if (bg.era_at(eta) == Era::Inflation) return bd_mode(k, eta);

  if (form == ModeForm::LeadingOrder) {
    const double xe = bg.x_end();
    const double kappa = k / std::sqrt(3.0);
    const double amp = 3.0 / (std::sqrt(k * c.eps1) * xe * xe);
    const double arg = kappa * (eta - c.eta_r());
    ModeValue m;
    m.g = -I * amp * std::sin(arg);
    m.gp = -I * amp * kappa * std::cos(arg);
    m.wronskian = 0.0;
    return m;
  }

  const ModeValue me = bd_mode(k, c.eta_end);
  const double s = form == ModeForm::Continued ? 1.0 : bg.matching_s();
  const double kappa = k / std::sqrt(3.0);
  const double arg = kappa * (eta - c.eta_end);
  const double cs = std::cos(arg), sn = std::sin(arg);
  ModeValue m;
  m.g = s * (me.g * cs + me.gp * (sn / kappa));
  m.gp = s * (-me.g * kappa * sn + me.gp * cs);
  m.wronskian = I * s * s;
  return m;
}

double green_function(const ModeBackground& bg, double eta, double etabar,
                      ModeForm form) {
  if (etabar > eta) return 0.0;
  const double k = bg.k();
  const CosmologyParams& c = bg.cosmo();
  const bool bar_inf = bg.era_at(etabar) == Era::Inflation;
  const bool obs_inf = bg.era_at(eta) == Era::Inflation;
  if (bar_inf && obs_inf) return g_inf(k, eta, etabar);
  const double kappa = k / std::sqrt(3.0);
  if (!bar_inf) return (1.0 / kappa) * std::sin(kappa * (eta - etabar));
  // source in inflation, response in radiation: continue the inflationary
  // Green function through the transition
  const double s = form == ModeForm::Continued ? 1.0 : bg.matching_s();
  const double ge = g_inf(k, c.eta_end, etabar);
  const double gpe = g_inf_deta(k, c.eta_end, etabar);
  const double arg = kappa * (eta - c.eta_end);
  return s * (ge * std::cos(arg) + gpe * std::sin(arg) / kappa);
}

double green_function_deta(const ModeBackground& bg, double eta, double etabar,
                           ModeForm form) {
  if (etabar > eta) return 0.0;
  const double k = bg.k();
  const CosmologyParams& c = bg.cosmo();
  const bool bar_inf = bg.era_at(etabar) == Era::Inflation;
  const bool obs_inf = bg.era_at(eta) == Era::Inflation;
  if (bar_inf && obs_inf) return g_inf_deta(k, eta, etabar);
  const double kappa = k / std::sqrt(3.0);
  if (!bar_inf) return std::cos(kappa * (eta - etabar));
  const double s = form == ModeForm::Continued ? 1.0 : bg.matching_s();
  const double ge = g_inf(k, c.eta_end, etabar);
  const double gpe = g_inf_deta(k, c.eta_end, etabar);
  const double arg = kappa * (eta - c.eta_end);
  return s * (-ge * kappa * std::sin(arg) + gpe * std::cos(arg));
}

double green_function_dsource(const ModeBackground& bg, double eta, double etabar,
                              ModeForm form) {
  if (etabar > eta) return 0.0;
  const double k = bg.k();
  const CosmologyParams& c = bg.cosmo();
  const bool bar_inf = bg.era_at(etabar) == Era::Inflation;
  const bool obs_inf = bg.era_at(eta) == Era::Inflation;
  // antisymmetry G(eta, etabar) = -G(etabar, eta) turns the source derivative
  // into the (cancellation-safe) observation derivative with swapped arguments
  if (bar_inf && obs_inf) return -g_inf_deta(k, etabar, eta);
  const double kappa = k / std::sqrt(3.0);
  if (!bar_inf) return -std::cos(kappa * (eta - etabar));
  const double s = form == ModeForm::Continued ? 1.0 : bg.matching_s();
  const double dge = -g_inf_deta(k, etabar, c.eta_end);
  const double dgpe = g_inf_deta_dsource(k, c.eta_end, etabar);
  const double arg = kappa * (eta - c.eta_end);
  return s * (dge * std::cos(arg) + dgpe * std::sin(arg) / kappa);
}

std::complex<double> omega_free(const ModeBackground& bg, double eta) {
  const ModeValue m = free_mode(bg, eta, ModeForm::Continued);
  return m.gp / (2.0 * I * m.g);
}

double re_omega_free(const ModeBackground& bg, double eta) {
  const ModeValue m = free_mode(bg, eta, ModeForm::Continued);
  return 1.0 / (4.0 * std::norm(m.g));
}

}  // namespace cslcosmo
