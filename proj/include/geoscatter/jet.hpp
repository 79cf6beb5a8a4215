#pragma once

#include <cmath>

#include "geoscatter/linalg.hpp"

namespace geoscatter {

// First-order forward-mode value: f and its gradient in chart coordinates.
struct Jet {
  double v = 0.0;
  Vec d;

  static Jet constant(double c, int n) {
    Jet j;
    j.v = c;
    j.d = Vec::Zero(n);
    return j;
  }
  static Jet variable(double x, int index, int n) {
    Jet j = constant(x, n);
    j.d[index] = 1.0;
    return j;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d}; }
inline Jet operator*(const Jet& a, const Jet& b) { return {a.v * b.v, b.v * a.d + a.v * b.d}; }
inline Jet operator/(const Jet& a, const Jet& b) {
  return {a.v / b.v, (b.v * a.d - a.v * b.d) / (b.v * b.v)};
}
inline Jet sin(const Jet& a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Jet cos(const Jet& a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
inline Jet log(const Jet& a) { return {std::log(a.v), a.d / a.v}; }
inline Jet sqrt(const Jet& a) {
  const double r = std::sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}
inline Jet pow(const Jet& a, const Jet& b) {
  // Integer exponents with no gradient keep negative bases valid.
  if (b.d.isZero(0.0) && b.v == std::round(b.v)) {
    const double p = std::pow(a.v, b.v);
    const double dp = b.v == 0.0 ? 0.0 : b.v * std::pow(a.v, b.v - 1.0);
    return {p, dp * a.d};
  }
  const double p = std::pow(a.v, b.v);
  return {p, p * (b.v / a.v * a.d + std::log(a.v) * b.d)};
}

}  // namespace geoscatter
