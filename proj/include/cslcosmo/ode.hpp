#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cslcosmo {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double h_init = 1e-6;
  double h_max = 0.0;  // 0: no cap
  std::size_t max_steps = 20'000'000;
};

// One accepted Dormand-Prince step with the Hairer continuous extension.
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0, h = 0.0;
  std::array<std::array<double, N>, 5> cont{};

  std::array<double, N> eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    std::array<double, N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = cont[0][i] +
             th * (cont[1][i] + th1 * (cont[2][i] + th * (cont[3][i] + th1 * cont[4][i])));
    return y;
  }
};

// Dense output over a full integration: ordered accepted segments.
template <std::size_t N>
class DenseOutput {
 public:
  void push(const DenseSegment<N>& s) { segs_.push_back(s); }
  bool empty() const { return segs_.empty(); }
  double t_front() const { return segs_.front().t0; }
  double t_back() const { return segs_.back().t0 + segs_.back().h; }

  std::array<double, N> eval(double t) const {
    if (segs_.empty()) throw std::runtime_error("dense output is empty");
    const bool fwd = segs_.back().h > 0.0;
    std::size_t lo = 0, hi = segs_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const double tend = segs_[mid].t0 + segs_[mid].h;
      if (fwd ? (tend >= t) : (tend <= t))
        hi = mid;
      else
        lo = mid + 1;
    }
    return segs_[lo].eval(t);
  }

  const std::vector<DenseSegment<N>>& segments() const { return segs_; }

 private:
  std::vector<DenseSegment<N>> segs_;
};

// Adaptive embedded Runge-Kutta pair (Dormand-Prince 5(4)) with FSAL and the
// standard order-4 continuous extension. RHS signature:
//   void rhs(double t, const std::array<double,N>& y, std::array<double,N>& dydt)
// The observer receives each accepted DenseSegment; pass nullptr-like no-op if
// dense output is not needed.
template <std::size_t N, class RHS, class Observer>
void integrate_dopri5(RHS&& rhs, double t0, double t1, std::array<double, N>& y,
                      const OdeOptions& opt, Observer&& observe) {
  if (t1 == t0) return;
  using State = std::array<double, N>;

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const double dir = (t1 > t0) ? 1.0 : -1.0;
  double t = t0;
  double h = dir * std::abs(opt.h_init);
  const double hmax = opt.h_max > 0.0 ? opt.h_max : std::abs(t1 - t0);

  State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  rhs(t, y, k1);

  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if (dir * (t - t1) >= 0.0) return;
    if (std::abs(h) > hmax) h = dir * hmax;
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t);
    if (std::abs(h) < hmin) h = dir * hmin;

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk =
          opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
      err += (ei / sk) * (ei / sk);
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (err <= 1.0 || std::abs(h) <= hmin * 1.0001) {
      DenseSegment<N> seg;
      seg.t0 = t;
      seg.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.cont[0][i] = y[i];
        seg.cont[1][i] = ydiff;
        seg.cont[2][i] = bspl;
        seg.cont[3][i] = ydiff - h * k7[i] - bspl;
        seg.cont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                              d7 * k7[i]);
      }
      observe(seg);
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      const double fac =
          std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
  }
  throw std::runtime_error("integrate_dopri5: step budget exhausted");
}

template <std::size_t N, class RHS>
void integrate_dopri5(RHS&& rhs, double t0, double t1, std::array<double, N>& y,
                      const OdeOptions& opt) {
  integrate_dopri5<N>(std::forward<RHS>(rhs), t0, t1, y, opt,
                      [](const DenseSegment<N>&) {});
}

template <std::size_t N, class RHS>
void integrate_dopri5(RHS&& rhs, double t0, double t1, std::array<double, N>& y,
                      const OdeOptions& opt, DenseOutput<N>& dense) {
  integrate_dopri5<N>(std::forward<RHS>(rhs), t0, t1, y, opt,
                      [&dense](const DenseSegment<N>& s) { dense.push(s); });
}

}  // namespace cslcosmo
