#include <doctest.h>

#include <cmath>

#include "geoscatter/catalog.hpp"
#include "geoscatter/charts.hpp"
#include "geoscatter/error.hpp"

using namespace geoscatter;

TEST_CASE("theta chart on the flat disk") {
  const Manifold m = catalog::flat_disk();
  const ThetaChart t(m, vec2(1, 0));
  CHECK((t(vec2(0, 0)) - vec2(-1, 0)).norm() < 1e-10);
  CHECK((t(vec2(0, 0.5)) - vec2(-1, 0.5).normalized()).norm() < 1e-10);
  CHECK(t.eval(vec2(0, 0.5)).length == doctest::Approx(std::hypot(1.0, 0.5)).epsilon(1e-10));
  // Slightly outside M is still reachable in the ambient chart.
  CHECK((t(vec2(1.01, 0.1)) - vec2(0.01, 0.1).normalized()).norm() < 1e-8);
}

TEST_CASE("theta chart kernel is the geodesic direction") {
  for (const auto& [name, m] : catalog::bundled()) {
    CAPTURE(name);
    const Vec q = m.boundary().point(0.4);
    const Vec p = vec2(0.1, -0.2);
    const ThetaChart t(m, q);
    const Vec dir = t(p);
    const GeodesicRecord r = integrate_geodesic(m, {q, dir}, 0.0, true);
    const double len = t.eval(p).length;
    const Vec xi = r.at(len).v;
    const Mat D = t.derivative(p);
    CHECK((D * xi).norm() < 1e-5);
    const Vec perp = vec2(-xi[1], xi[0]);
    CHECK((D * perp).norm() > 0.1 * perp.norm());
  }
}

TEST_CASE("theta chart certification") {
  const Manifold m = catalog::flat_disk();
  const std::vector<Vec> region = {vec2(0, 0), vec2(0.2, 0.3), vec2(-0.4, -0.1)};
  CHECK_NOTHROW(theta_chart(m, vec2(1, 0), region, 180));
}

TEST_CASE("interior chart at the center of the flat disk") {
  const Manifold m = catalog::flat_disk();
  const ChartCandidate c = interior_chart_with(m, vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(1, 0));
  CHECK(c.jacobian_ok);
  CHECK(std::abs(c.det) > 0.1);
  // First row: d angle / dz = (0, -1/1) rotated frame; second: d/dz <v, Theta_qt>.
  CHECK(std::abs(c.jacobian(0, 0)) < 1e-8);
  CHECK(std::abs(std::abs(c.jacobian(0, 1)) - 1.0) < 1e-6);
  CHECK(std::abs(std::abs(c.jacobian(1, 0)) - 1.0) < 1e-6);
}

TEST_CASE("degenerate v gives a singular interior chart") {
  // v along Theta_qt(p) is orthogonal to every variation of Theta_qt at p.
  const Manifold m = catalog::flat_disk();
  const ChartCandidate c = interior_chart_with(m, vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(0, -1));
  CHECK_FALSE(c.jacobian_ok);
  CHECK(std::abs(c.det) < 1e-8);
}

TEST_CASE("automatic interior charts") {
  for (const Manifold& m : {catalog::flat_disk(), catalog::bump_disk()}) {
    for (const Vec& p : {vec2(0, 0), vec2(0.3, 0.2), vec2(-0.9, 0.1), vec2(0.2, -0.93)}) {
      const ChartCandidate c = interior_chart(m, p);
      CHECK(c.jacobian_ok);
      CHECK(std::abs(c.det) > kInteriorDetMin);
    }
  }
}

TEST_CASE("interior chart is injective and inverted by shooting") {
  const Manifold m = catalog::bump_disk();
  const Vec p = vec2(0.25, 0.05);
  const ChartCandidate c = interior_chart(m, p);
  REQUIRE(c.jacobian_ok);
  const InteriorChart chart(m, c.q, c.qt, c.v, p);
  std::vector<Vec> seen;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      const Vec z = p + vec2(0.02 * i, 0.02 * j);
      const Vec u = chart.coords(z);
      for (const Vec& w : seen) CHECK((u - w).norm() > 1e-9);
      seen.push_back(u);
      CHECK((chart.inverse(u) - z).norm() < 1e-6);
    }
}

TEST_CASE("boundary chart pieces on the flat disk") {
  const Manifold m = catalog::flat_disk();
  const Vec p = vec2(1, 0);
  const ChartCandidate c = boundary_chart(m, p);
  REQUIRE(c.jacobian_ok);
  CHECK(std::abs(c.det) > kBoundaryDetMin);
  CHECK(c.w_angle == 0.0);

  const BoundaryCoordChart bc(m, c.w_angle, c.q, c.v, p);
  for (const Vec& x : {vec2(0.95, 0.05), vec2(1.03, -0.04), vec2(0.9, 0.1)})
    CHECK(std::abs(std::remainder(bc.project(x) - std::atan2(x[1], x[0]), 2.0 * kPi)) < 1e-9);
  for (double s : {-0.1, -0.05, 0.0, 0.05, 0.1}) CHECK(std::abs(bc.q_tilde(m.boundary().point(s))) < 1e-8);
  for (const Vec& z : {vec2(0.95, 0.0), vec2(0.9, 0.05), vec2(0.97, -0.08)}) CHECK(bc.q_tilde(z) > 0.0);
}

TEST_CASE("boundary charts on every bundled metric") {
  for (const auto& [name, m] : catalog::bundled()) {
    CAPTURE(name);
    for (int k = 0; k < 4; ++k) {
      const ChartCandidate c = boundary_chart(m, m.boundary().point(m.boundary().length() * k / 4));
      CHECK(c.jacobian_ok);
    }
  }
  CHECK_THROWS_AS(boundary_chart(catalog::flat_disk(), vec2(0.5, 0)), Error);
}
