#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace geoscatter {

// Large enough for a geodesic plus n Jacobi fields at n = kMaxDim.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 48, 1>;

// One accepted Dormand-Prince step with its continuous extension.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State, 5> c;

  double t1() const { return t0 + h; }
  State eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return c[0] + th * (c[1] + th1 * (c[2] + th * (c[3] + th1 * c[4])));
  }
};

struct OdeOptions {
  double atol = 1e-10;
  double rtol = 1e-10;
  double h_init = 0.0;  // 0: automatic
  double h_max = 0.0;   // 0: unbounded
  long max_steps = 1000000;
};

enum class OdeStop { ReachedEnd, Stopped, StepUnderflow, TooManySteps };

struct OdeResult {
  OdeStop stop = OdeStop::ReachedEnd;
  double t = 0.0;
  State y;
  long accepted = 0;
  long rejected = 0;
};

namespace dopri {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dopri

// Single Dormand-Prince 5(4) step from (t, y) with derivative k1 = f(t, y).
// Fills the dense-output coefficients and the FSAL derivative k7.
template <typename Rhs>
void dopri_step(Rhs& f, double t, const State& y, const State& k1, double h, State& y_new, State& k7,
                State& err, DenseStep* dense) {
  using namespace dopri;
  const State k2 = f(t + c2 * h, State(y + h * a21 * k1));
  const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
  const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
  y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  k7 = f(t + h, y_new);
  err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  if (dense) {
    dense->t0 = t;
    dense->h = h;
    dense->c[0] = y;
    dense->c[1] = y_new - y;
    dense->c[2] = h * k1 - dense->c[1];
    dense->c[3] = dense->c[1] - h * k7 - dense->c[2];
    dense->c[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
  }
}

// Adaptive integration from t0 towards t_end (t_end > t0). on_step receives
// each accepted DenseStep and returns false to stop.
template <typename Rhs, typename OnStep>
OdeResult dopri5(Rhs&& f, double t0, const State& y0, double t_end, const OdeOptions& opt, OnStep&& on_step) {
  OdeResult res;
  res.t = t0;
  res.y = y0;
  const Eigen::Index m = y0.size();
  State k1 = f(t0, y0);

  auto scale_of = [&](const State& a, const State& b) {
    return State((opt.atol + opt.rtol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix());
  };
  auto rms = [&](const State& v, const State& sc) {
    return std::sqrt((v.array() / sc.array()).square().sum() / static_cast<double>(m));
  };

  double h = opt.h_init;
  const double span = t_end - t0;
  if (h <= 0.0) {
    const State sc = scale_of(y0, y0);
    const double d0 = rms(y0, sc), d1n = rms(k1, sc);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, span);
    const State y1 = y0 + h0 * k1;
    const State k2 = f(t0 + h0, y1);
    const double d2 = rms(State(k2 - k1), sc) / h0;
    const double big = std::max(d1n, d2);
    const double h1 = big <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / big, 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }
  if (opt.h_max > 0.0) h = std::min(h, opt.h_max);

  State y_new, k7, err;
  DenseStep dense;
  while (res.t < t_end) {
    if (res.accepted + res.rejected >= opt.max_steps) {
      res.stop = OdeStop::TooManySteps;
      return res;
    }
    bool last = false;
    if (res.t + h >= t_end) {
      h = t_end - res.t;
      last = true;
    }
    if (h <= 1e-14 * (1.0 + std::abs(res.t))) {
      res.stop = OdeStop::StepUnderflow;
      return res;
    }
    dopri_step(f, res.t, res.y, k1, h, y_new, k7, err, &dense);
    const double e = rms(err, scale_of(res.y, y_new));
    if (!(e <= 1.0)) {
      ++res.rejected;
      const double fac = std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.2;
      h *= fac;
      continue;
    }
    ++res.accepted;
    res.t = last ? t_end : res.t + h;
    res.y = y_new;
    k1 = k7;
    if (!on_step(static_cast<const DenseStep&>(dense))) {
      res.stop = OdeStop::Stopped;
      return res;
    }
    const double fac = e == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(e, -0.2)));
    h *= fac;
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
  }
  res.stop = OdeStop::ReachedEnd;
  return res;
}

// Fixed-grid integration through the given node times (increasing).
template <typename Rhs, typename OnStep>
State dopri5_on_grid(Rhs&& f, const State& y0, const std::vector<double>& nodes, OnStep&& on_step) {
  State y = y0;
  State k1 = f(nodes.front(), y);
  State y_new, k7, err;
  DenseStep dense;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    if (h <= 0.0) continue;
    dopri_step(f, nodes[i], y, k1, h, y_new, k7, err, &dense);
    y = y_new;
    k1 = k7;
    on_step(static_cast<const DenseStep&>(dense));
  }
  return y;
}

}  // namespace geoscatter
