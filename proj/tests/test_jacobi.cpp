#include <doctest.h>

#include <cmath>
#include <random>

#include "geoscatter/catalog.hpp"
#include "geoscatter/error.hpp"
#include "geoscatter/jacobi.hpp"

using namespace geoscatter;

namespace {

GeodesicRecord ambient(const Manifold& m, const Vec& p, const Vec& v, double T) {
  FlowOptions o;
  o.stop_at_boundary = false;
  o.t_end = T;
  o.keep_dense = true;
  return solve_geodesic(m, {p, v}, o);
}

}  // namespace

TEST_CASE("flat jacobi fields are linear") {
  const Manifold m = catalog::flat_disk();
  const GeodesicRecord r = integrate_geodesic(m, {vec2(0.1, 0.2), vec2(0.6, 0.8)}, 0.0, true);
  const Vec w = vec2(-0.3, 0.7);
  const JacobiSolution J = jacobi_field(m, r, Vec::Zero(2), w);
  for (double t : {0.1, 0.4, 0.9 * r.exit.t_exit}) {
    CHECK((J.J(t) - t * w).norm() < 1e-9);
    CHECK((J.DJ(t) - w).norm() < 1e-9);
  }
}

TEST_CASE("jacobi field needs dense output") {
  const Manifold m = catalog::flat_disk();
  const GeodesicRecord r = integrate_geodesic(m, {vec2(0, 0), vec2(1, 0)});
  try {
    jacobi_field(m, r, Vec::Zero(2), vec2(0, 1));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Usage);
  }
}

TEST_CASE("constant curvature jacobi field has length sin t") {
  const Manifold m = catalog::sphere_cap();
  const Vec p = vec2(0.1, -0.2);
  const MetricField& g = *m.metric;
  const Vec xi = unit_direction(g, p, 0.4);
  const Vec w = unit_direction(g, p, 0.4 + kPi / 2);
  const GeodesicRecord r = ambient(m, p, xi, 3.0);
  const JacobiSolution J = jacobi_field(m, r, Vec::Zero(2), w);
  for (int k = 1; k <= 30; ++k) {
    const double t = 0.1 * k;
    const GeodesicState st = J.geodesic(t);
    CHECK(std::abs(norm_g(g.eval(st.x), J.J(t)) - std::abs(std::sin(t))) < 1e-6);
  }
}

TEST_CASE("jacobi fields match finite-difference variations") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (const auto& [name, m] : catalog::bundled()) {
    CAPTURE(name);
    const Vec p = vec2(0.15, -0.25);
    const Vec xi = unit_direction(*m.metric, p, 2.0);
    const double T = 0.8 * exit_time(m, p, xi);
    const Vec J0 = vec2(nd(rng), nd(rng)), DJ0 = vec2(nd(rng), nd(rng));
    const Vec J = jacobi_field(m, ambient(m, p, xi, T), J0, DJ0).J(T);
    // Initial velocity of the varied family: D_s v = dv/ds + Gamma(J0, v).
    const Vec dv = DJ0 + christoffel(*m.metric, p).contract(J0, xi);
    const double h = 1e-5;
    FlowOptions o;
    o.stop_at_boundary = false;
    o.t_end = T;
    o.ode.atol = o.ode.rtol = 1e-13;
    const Vec xp = solve_geodesic(m, {p + h * J0, xi + h * dv}, o).y_final.head(2);
    const Vec xm = solve_geodesic(m, {p - h * J0, xi - h * dv}, o).y_final.head(2);
    const Vec fd = (xp - xm) / (2 * h);
    CHECK((J - fd).norm() < 1e-4 * fd.norm());
  }
}

TEST_CASE("wronskian is conserved") {
  const Manifold m = catalog::focus_disk();
  const Vec p = vec2(-0.4, 0.1);
  const Vec xi = unit_direction(*m.metric, p, 0.3);
  const GeodesicRecord r = ambient(m, p, xi, exit_time(m, p, xi));
  const JacobiSolution a = jacobi_field(m, r, vec2(0.2, 0.1), vec2(-0.3, 0.5));
  const JacobiSolution b = jacobi_field(m, r, vec2(-0.1, 0.4), vec2(0.7, 0.2));
  auto w = [&](double t) {
    const Mat g = m.metric->eval(a.geodesic(t).x);
    return inner(g, a.DJ(t), b.J(t)) - inner(g, a.J(t), b.DJ(t));
  };
  const double w0 = w(0.0);
  for (double t = 0.1; t < r.t_final; t += 0.1) CHECK(std::abs(w(t) - w0) < 1e-7);
}

TEST_CASE("d_exp") {
  const Manifold flat = catalog::flat_disk();
  CHECK((d_exp(flat, vec2(0.1, 0.2), vec2(0.3, -0.4)) - Mat::Identity(2, 2)).norm() < 1e-8);

  const Manifold s = catalog::sphere_cap();
  const Vec q = vec2(0.2, 0.1);
  const Vec xi = unit_direction(*s.metric, q, 1.1);
  {
    const Vec w = (kPi / 2) * xi;
    const Mat D = d_exp(s, q, w);
    FlowOptions o;
    o.stop_at_boundary = false;
    o.t_end = 1.0;
    const Vec x = solve_geodesic(s, {q, w}, o).y_final.head(2);
    const Vec sv = g_singular_values(*s.metric, q, x, D);
    CHECK(sv[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sv[1] == doctest::Approx(2 / kPi).epsilon(1e-4));
  }
  {
    const Vec w = kPi * xi;
    FlowOptions o;
    o.stop_at_boundary = false;
    o.t_end = 1.0;
    const Vec x = solve_geodesic(s, {q, w}, o).y_final.head(2);
    const Vec sv = g_singular_values(*s.metric, q, x, d_exp(s, q, w));
    CHECK(sv[1] < 1e-3);
  }
}

TEST_CASE("gauss lemma") {
  const Manifold m = catalog::conformal_disk();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> a(0, 2 * kPi), f(0.2, 0.9);
  for (int k = 0; k < 10; ++k) {
    const Vec q = vec2(0.1, 0.2);
    const double th = a(rng);
    const Vec xi = unit_direction(*m.metric, q, th);
    const Vec u = unit_direction(*m.metric, q, th + 1.0);
    const Mat gq = m.metric->eval(q);
    const Vec perp = u - inner(gq, u, xi) * xi;
    const Vec w = f(rng) * exit_time(m, q, xi) * xi;
    const Mat D = d_exp(m, q, w);
    const Vec x = exponential_map(m, q, w);
    CHECK(std::abs(inner(m.metric->eval(x), D * w, D * perp)) < 1e-6 * perp.norm() * w.norm() + 1e-12);
  }
}

TEST_CASE("classification") {
  SUBCASE("flat disk has only good directions") {
    const auto c = classify_directions(catalog::flat_disk(), vec2(0.3, -0.2), 64);
    REQUIRE(c.size() == 64);
    for (const auto& d : c) CHECK(d.tag == DirectionTag::Good);
  }
  SUBCASE("small sphere cap has only good directions") {
    for (const auto& d : classify_directions(catalog::sphere_cap(0.8), vec2(0.5, 0.1), 64))
      CHECK(d.tag == DirectionTag::Good);
  }
  SUBCASE("focusing lens has conjugate directions and good ones") {
    const Manifold m = catalog::focus_disk();
    // Directions whose perpendicular Jacobi field changes sign at the exit
    // bracket a conjugate exit; bisect to it.
    const Vec p = vec2(0.3, 0.0);
    auto perp = [&](double th) {
      const Vec xi = unit_direction(*m.metric, p, th);
      const GeodesicRecord r = solve_geodesic(m, {p, xi}, FlowOptions{}, {Variation{Vec::Zero(2), vec2(-xi[1], xi[0])}});
      const Vec J = r.field_x(r.y_final, 0), v = r.exit.v_exit;
      return v[0] * J[1] - v[1] * J[0];
    };
    double lo = -1, hi = -1;
    const int n = 180;
    for (int k = 0; k < n && lo < 0; ++k) {
      const double a = 2 * kPi * k / n, b = 2 * kPi * (k + 1) / n;
      if ((perp(a) > 0) != (perp(b) > 0)) lo = a, hi = b;
    }
    REQUIRE(lo >= 0);
    const bool neg = perp(lo) < 0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((perp(mid) < 0) == neg ? lo : hi) = mid;
    }
    const DirectionClass c = classify_direction(m, p, unit_direction(*m.metric, p, lo));
    CHECK(c.tag == DirectionTag::Conjugate);
    const VariationalResult v = conjugate_variational_test(m, p, c.exit.x_exit, c.exit.v_exit);
    CHECK(v.conjugate);

    int good = 0;
    for (const auto& d : classify_directions(m, p, 64)) good += d.tag == DirectionTag::Good;
    CHECK(good > 0);
    const DirectionClass g = classify_direction(m, p, unit_direction(*m.metric, p, 0.0));
    REQUIRE(g.tag == DirectionTag::Good);
    CHECK_FALSE(conjugate_variational_test(m, p, g.exit.x_exit, g.exit.v_exit).conjugate);
  }
  SUBCASE("boundary points have tangential directions") {
    const Manifold m = catalog::flat_disk();
    int tangential = 0;
    for (const auto& d : classify_directions(m, m.boundary().point(1.0), 64))
      tangential += d.tag == DirectionTag::Tangential;
    CHECK(tangential == 2);
  }
  CHECK_THROWS_AS(classify_directions(catalog::flat_disk(), vec2(0, 0), 32), Error);
}

TEST_CASE("variational test on the flat disk") {
  const Manifold m = catalog::flat_disk();
  const Vec p = vec2(0.2, 0.3);
  for (double th : {0.0, 1.0, 2.0, 4.0}) {
    const Vec xi = vec2(std::cos(th), std::sin(th));
    const GeodesicRecord r = integrate_geodesic(m, {p, xi});
    const VariationalResult v = conjugate_variational_test(m, p, r.exit.x_exit, r.exit.v_exit);
    CHECK_FALSE(v.conjugate);
    // Exit displacement of a pencil from p: t / cos(exit angle).
    CHECK(v.exit_speed * v.eta_nu == doctest::Approx(r.exit.t_exit).epsilon(1e-6));
  }
  CHECK_THROWS_AS(conjugate_variational_test(m, vec2(0.5, 0.5), vec2(1, 0), vec2(1, 0)), Error);
}
