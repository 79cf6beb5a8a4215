#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "geoscatter/catalog.hpp"
#include "geoscatter/config.hpp"
#include "geoscatter/error.hpp"

using namespace geoscatter;

namespace {

Manifold from_text(const std::string& text) {
  std::istringstream in(text);
  return build_manifold(KeyValueConfig::parse(in));
}

// Christoffel symbols straight from the textbook formula, with metric
// derivatives by a wide central difference on g itself.
double gamma_reference(const MetricField& g, const Vec& x, int k, int i, int j) {
  const double h = 1e-4;
  auto dg = [&](int l, int a, int b) {
    Vec xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    return (g.eval(xp)(a, b) - g.eval(xm)(a, b)) / (2 * h);
  };
  const Mat ginv = g.eval(x).inverse();
  double s = 0.0;
  for (int l = 0; l < 2; ++l) s += 0.5 * ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
  return s;
}

}  // namespace

TEST_CASE("flat christoffels vanish") {
  const Manifold m = catalog::flat_disk();
  const Christoffel G = christoffel(*m.metric, vec2(0.3, -0.7));
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(G(k, i, j) == 0.0);
}

TEST_CASE("conformal christoffels with phi = x1") {
  const Manifold m = from_text("metric = conformal\nphi_expr = x1\nboundary = circle(1)\n");
  const Christoffel G = christoffel(*m.metric, vec2(0.2, 0.4));
  CHECK(G(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(G(0, 1, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(G(1, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(G(1, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(G(1, 0, 0)) < 1e-12);
  CHECK(std::abs(G(1, 1, 1)) < 1e-12);
  CHECK(std::abs(G(0, 0, 1)) < 1e-12);
}

TEST_CASE("christoffels match the reference formula on every bundled metric") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (const auto& [name, m] : catalog::bundled()) {
    CAPTURE(name);
    for (int n = 0; n < 20; ++n) {
      const Vec x = vec2(u(rng), u(rng));
      const Christoffel G = christoffel(*m.metric, x);
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            CHECK(G(k, i, j) == G(k, j, i));
            const double ref = gamma_reference(*m.metric, x, k, i, j);
            CHECK(std::abs(G(k, i, j) - ref) < 1e-6 * (1.0 + std::abs(ref)));
          }
    }
  }
}

TEST_CASE("analytic and finite-difference christoffels agree") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (const auto& [name, m] : catalog::bundled()) {
    const FiniteDifferenceMetric fd(m.metric);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const Vec x = vec2(u(rng), u(rng));
      const Christoffel a = christoffel(*m.metric, x), b = christoffel(fd, x);
      double scale = 0.0, diff = 0.0;
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            scale = std::max(scale, std::abs(a(k, i, j)));
            diff = std::max(diff, std::abs(a(k, i, j) - b(k, i, j)));
          }
      worst = std::max(worst, diff / std::max(scale, 1e-3));
    }
    CAPTURE(name);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("degenerate metric is reported") {
  const Manifold m = from_text("metric = matrix_expr\ng11 = x1\ng12 = 0\ng22 = 1\nboundary = circle(0.5, 1, 0)\n"
                               "bbox = [0.2..1.8, -0.8..0.8]\n");
  CHECK_THROWS_AS(christoffel(*m.metric, vec2(-0.1, 0.0)), Error);
}

TEST_CASE("shape operator of flat disks is 1/R") {
  for (double R : {1.0, 0.5, 2.0}) {
    const Manifold m = catalog::flat_disk(R);
    const BoundaryChart& c = m.boundary();
    for (int k = 0; k < 8; ++k) {
      const Mat S = shape_operator(c, c.length() * k / 8);
      CHECK(S(0, 0) == doctest::Approx(1.0 / R).epsilon(1e-6));
    }
  }
}

TEST_CASE("shape operator agrees with finite-difference transport of the normal") {
  // On a conformal disk the normal is nu = e^{-phi} x/|x| and nabla_T nu in
  // the g-unit tangent follows from d nu/ds + Gamma(T, nu).
  const Manifold m = catalog::conformal_disk();
  const BoundaryChart& c = m.boundary();
  const double h = 1e-5;
  for (int k = 0; k < 6; ++k) {
    const double s = c.length() * (k + 0.3) / 6;
    const BoundaryFrame f = c.frame(s);
    const Vec dnu = (c.frame(s + h).normal - c.frame(s - h).normal) / (2 * h);
    const Vec cov = dnu - christoffel(*m.metric, f.x).contract(f.tangent, f.normal);
    const double ref = inner(m.metric->eval(f.x), cov, f.tangent);
    CHECK(shape_operator(c, s)(0, 0) == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("convexity certification") {
  const ConvexityReport flat = is_strictly_convex(catalog::flat_disk().boundary(), 64);
  CHECK(flat.strictly_convex);
  CHECK(flat.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-6));

  const ConvexityReport pea = is_strictly_convex(catalog::peanut().boundary(), 256);
  CHECK_FALSE(pea.strictly_convex);
  CHECK(pea.min_eigenvalue < 0.0);

  try {
    is_strictly_convex(catalog::flat_disk().boundary(), 8);
    FAIL("grid 8 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Precondition);
  }
}

TEST_CASE("boundary frame is g-orthonormal and outward") {
  for (const auto& [name, m] : catalog::bundled()) {
    const BoundaryChart& c = m.boundary();
    for (int k = 0; k < 32; ++k) {
      const BoundaryFrame f = c.frame(c.length() * k / 32);
      const Mat g = m.metric->eval(f.x);
      CHECK(std::abs(inner(g, f.normal, f.normal) - 1.0) < 1e-10);
      CHECK(std::abs(inner(g, f.tangent, f.tangent) - 1.0) < 1e-10);
      CHECK(std::abs(inner(g, f.normal, f.tangent)) < 1e-10);
      CHECK(m.domain->b(f.x + 1e-4 * f.normal) > 0.0);
    }
  }
}

TEST_CASE("boundary parametrization is arclength and anchored at max x1") {
  const Manifold m = catalog::conformal_disk();
  const BoundaryChart& c = m.boundary();
  // Length of the unit circle under e^{2(0.3 + 0.1 cos t)}.
  double ref = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) ref += std::exp(0.3 + 0.1 * std::cos(2 * kPi * (k + 0.5) / n)) * 2 * kPi / n;
  CHECK(c.length() == doctest::Approx(ref).epsilon(1e-9));
  const Vec a = c.point(0.0);
  CHECK(std::abs(a[0] - 1.0) < 1e-9);
  CHECK(std::abs(a[1]) < 1e-9);
  CHECK(c.point(0.1)[1] > 0.0);
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const double s = c.length() * k / 50;
    const Vec d = (c.point(s + h) - c.point(s - h)) / (2 * h);
    CHECK(std::abs(norm_g(m.metric->eval(c.point(s)), d) - 1.0) < 1e-8);
  }
}

TEST_CASE("boundary metric") {
  const Manifold flat = catalog::flat_disk();
  CHECK(boundary_metric(flat.boundary(), 0.7)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(boundary_metric(flat.boundary(), 0.7, TangentFrame::Euclidean)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // phi = 0.3 on the circle x1 = 0.
  const Manifold m = catalog::conformal_disk();
  const BoundaryChart& c = m.boundary();
  CHECK(boundary_metric(c, 1.1)(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  double lo = 0.0, hi = 0.5 * c.length();
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (c.point(mid)[0] > 0.0 ? lo : hi) = mid;
  }
  CHECK(boundary_metric(c, lo, TangentFrame::Euclidean)(0, 0) == doctest::Approx(std::exp(0.6)).epsilon(1e-8));
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(from_text("metric = flat\nboundary = circle(1)\nbbox = [-1..1, -1..1]\n"), Error);
  const Manifold m = from_text("metric = flat\nboundary = x1^2/4 + x2^2 - 1\nbbox = [-3..3, -2..2]\n");
  CHECK(is_strictly_convex(m.boundary(), 64).strictly_convex);
  // Ellipse curvature at the anchor (2, 0) is a/b^2 = 2.
  CHECK(shape_operator(m.boundary(), 0.0)(0, 0) == doctest::Approx(2.0).epsilon(1e-5));
}
