#pragma once
#include <cmath>

namespace cslcosmo {

// Second-order forward-mode dual number: carries a value together with its
// first and second derivatives with respect to one independent variable
// (conformal time throughout this code). Lets the source function use exact
// derivatives of the coupling products instead of finite differences.
struct Jet2 {
  double f = 0.0;   // value
  double d1 = 0.0;  // first derivative
  double d2 = 0.0;  // second derivative

  static Jet2 variable(double x) { return {x, 1.0, 0.0}; }
  static Jet2 constant(double c) { return {c, 0.0, 0.0}; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet2 operator-(const Jet2& a) { return {-a.f, -a.d1, -a.d2}; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.f * b.f,
          a.d1 * b.f + a.f * b.d1,
          a.d2 * b.f + 2.0 * a.d1 * b.d1 + a.f * b.d2};
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  const double q = a.f / b.f;
  const double q1 = (a.d1 - q * b.d1) / b.f;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.f;
  return {q, q1, q2};
}

inline Jet2 operator+(const Jet2& a, double c) { return {a.f + c, a.d1, a.d2}; }
inline Jet2 operator+(double c, const Jet2& a) { return a + c; }
inline Jet2 operator-(const Jet2& a, double c) { return {a.f - c, a.d1, a.d2}; }
inline Jet2 operator-(double c, const Jet2& a) { return {c - a.f, -a.d1, -a.d2}; }
inline Jet2 operator*(const Jet2& a, double c) { return {a.f * c, a.d1 * c, a.d2 * c}; }
inline Jet2 operator*(double c, const Jet2& a) { return a * c; }
inline Jet2 operator/(const Jet2& a, double c) { return {a.f / c, a.d1 / c, a.d2 / c}; }
inline Jet2 operator/(double c, const Jet2& a) { return Jet2::constant(c) / a; }

// chain rule helper: g(f) with g', g'' evaluated at f
inline Jet2 lift(const Jet2& x, double g, double dg, double d2g) {
  return {g, dg * x.d1, d2g * x.d1 * x.d1 + dg * x.d2};
}

inline Jet2 exp(const Jet2& x) {
  const double e = std::exp(x.f);
  return lift(x, e, e, e);
}

inline Jet2 sqrt(const Jet2& x) {
  const double s = std::sqrt(x.f);
  return lift(x, s, 0.5 / s, -0.25 / (s * x.f));
}

inline Jet2 pow(const Jet2& x, double p) {
  const double v = std::pow(x.f, p);
  return lift(x, v, p * v / x.f, p * (p - 1.0) * v / (x.f * x.f));
}

inline Jet2 sin(const Jet2& x) {
  const double s = std::sin(x.f), c = std::cos(x.f);
  return lift(x, s, c, -s);
}

inline Jet2 cos(const Jet2& x) {
  const double s = std::sin(x.f), c = std::cos(x.f);
  return lift(x, c, -s, -c);
}

inline Jet2 log(const Jet2& x) {
  return lift(x, std::log(x.f), 1.0 / x.f, -1.0 / (x.f * x.f));
}

inline Jet2 sq(const Jet2& x) { return x * x; }

}  // namespace cslcosmo
