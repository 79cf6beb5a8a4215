#pragma once

#include <cmath>
#include <functional>

namespace geoscatter {

struct LineMinimum {
  double x;
  double f;
  int evaluations;
};

// Golden-section search for a minimum of f on [a, b]; stops when the bracket
// is narrower than tol.
template <typename F>
LineMinimum golden_section_minimize(F&& f, double a, double b, double tol, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc <= fd ? LineMinimum{c, fc, evals} : LineMinimum{d, fd, evals};
}

}  // namespace geoscatter
