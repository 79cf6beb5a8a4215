#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace geoscatter {

// Chart dimension is runtime but bounded; storage stays on the stack.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline constexpr double kPi = 3.14159265358979323846;

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline double inner(const Mat& g, const Vec& a, const Vec& b) { return a.dot(g * b); }

inline double norm_g(const Mat& g, const Vec& a) { return std::sqrt(inner(g, a, a)); }

// Wrap to [0, period).
inline double wrap_periodic(double s, double period) {
  double r = std::fmod(s, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

// Shortest signed difference a - b on a circle of the given period.
inline double periodic_diff(double a, double b, double period) {
  double d = std::fmod(a - b, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

// Symmetric square root and inverse square root of an SPD matrix.
struct SpdRoots {
  Mat sqrt;
  Mat inv_sqrt;
};
SpdRoots spd_roots(const Mat& g);

}  // namespace geoscatter
