#include "geoscatter/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "geoscatter/error.hpp"
#include "geoscatter/jacobi.hpp"
#include "geoscatter/reconstruction.hpp"

namespace geoscatter {

std::vector<Vec> sample_interior(const Manifold& m, int count, std::mt19937_64& rng, double margin) {
  const DomainSpec& d = *m.domain;
  std::vector<std::uniform_real_distribution<double>> axis;
  for (int i = 0; i < d.dim(); ++i) axis.emplace_back(d.lo()[i], d.hi()[i]);
  std::vector<Vec> out;
  long tries = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++tries > 1000L * (count + 10)) throw Error(ErrorCode::Domain, "could not sample interior points");
    Vec x(d.dim());
    for (int i = 0; i < d.dim(); ++i) x[i] = axis[i](rng);
    if (d.b(x) < -margin) out.push_back(x);
  }
  return out;
}

std::vector<Vec> lattice_points(const Manifold& m, double h, double margin) {
  if (h <= 0.0) throw Error(ErrorCode::Usage, "lattice spacing must be positive");
  const DomainSpec& d = *m.domain;
  if (d.dim() != 2) throw Error(ErrorCode::Usage, "lattice sources are implemented for n = 2");
  std::vector<Vec> out;
  const long i0 = static_cast<long>(std::ceil(d.lo()[0] / h)), i1 = static_cast<long>(std::floor(d.hi()[0] / h));
  const long j0 = static_cast<long>(std::ceil(d.lo()[1] / h)), j1 = static_cast<long>(std::floor(d.hi()[1] / h));
  for (long j = j0; j <= j1; ++j)
    for (long i = i0; i <= i1; ++i) {
      const Vec x = vec2(i * h, j * h);
      if (d.b(x) < -margin) out.push_back(x);
    }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"convexity", "conservation", "jacobi", "hausdorff", "i0"};
  return names;
}

namespace {

using Results = std::vector<PropertyResult>;

void add(Results& out, const std::string& suite, const std::string& name, double measured, double tol,
         const VerifyOptions& opt, bool lower_bound = false) {
  PropertyResult r;
  r.suite = suite;
  r.name = name;
  r.measured = measured;
  r.tolerance = opt.tol_override ? *opt.tol_override : tol;
  r.lower_bound = lower_bound;
  r.pass = lower_bound ? measured > r.tolerance : measured < r.tolerance;
  out.push_back(r);
}

Vec random_direction(const Manifold& m, const Vec& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0.0, 2.0 * kPi);
  return unit_direction(*m.metric, p, a(rng));
}

void convexity_suite(const Manifold& m, const VerifyOptions& opt, Results& out) {
  const BoundaryChart& chart = m.boundary();
  const ConvexityReport rep = is_strictly_convex(chart, 256);
  add(out, "convexity", "min_shape_eigenvalue", rep.min_eigenvalue, 1e-8, opt, true);
  double worst = 0.0;
  const double L = chart.length(), h = 1e-5 * L;
  for (int k = 0; k < 256; ++k) {
    const double s = L * k / 256;
    const Vec d = (chart.point(s + h) - chart.point(s - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(norm_g(m.metric->eval(chart.point(s)), d) - 1.0));
  }
  add(out, "convexity", "arclength_speed_defect", worst, 1e-8, opt);
}

void conservation_suite(const Manifold& m, const VerifyOptions& opt, Results& out) {
  std::mt19937_64 rng(opt.seed);
  const auto pts = sample_interior(m, opt.samples, rng);
  double drift = 0.0, drift10 = 0.0, round_trip = 0.0;
  for (const Vec& p : pts) {
    const Vec xi = random_direction(m, p, rng);
    const GeodesicRecord rec = integrate_geodesic(m, {p, xi});
    const Mat ge = m.metric->eval(rec.exit.x_exit);
    drift = std::max(drift, std::abs(inner(ge, rec.exit.v_exit, rec.exit.v_exit) - 1.0));

    FlowOptions back;
    back.stop_at_boundary = false;
    back.t_end = rec.exit.t_exit;
    const GeodesicRecord r2 = solve_geodesic(m, {rec.exit.x_exit, -rec.exit.v_exit}, back);
    const Vec xb = r2.y_final.head(2), vb = r2.y_final.segment(2, 2);
    round_trip = std::max(round_trip, std::max((xb - p).norm(), (vb + xi).norm()));

    FlowOptions amb;
    amb.stop_at_boundary = false;
    amb.t_end = 10.0;
    amb.keep_dense = true;
    const GeodesicRecord r10 = solve_geodesic(m, {p, xi}, amb);
    for (int k = 1; k <= 100; ++k) {
      const GeodesicState st = r10.at(10.0 * k / 100);
      drift10 = std::max(drift10, std::abs(inner(m.metric->eval(st.x), st.v, st.v) - 1.0));
    }
  }
  add(out, "conservation", "speed_drift_to_exit", drift, 1e-7, opt);
  add(out, "conservation", "speed_drift_t10", drift10, 1e-7, opt);
  add(out, "conservation", "reversibility", round_trip, 1e-6, opt);
}

void jacobi_suite(const Manifold& m, const VerifyOptions& opt, Results& out) {
  std::mt19937_64 rng(opt.seed + 1);
  std::normal_distribution<double> nd;
  const auto pts = sample_interior(m, opt.samples, rng);
  double worst = 0.0;
  for (const Vec& p : pts) {
    const Vec xi = random_direction(m, p, rng);
    const double T = 0.8 * exit_time(m, p, xi);
    const Vec J0 = vec2(nd(rng), nd(rng)), DJ0 = vec2(nd(rng), nd(rng));
    FlowOptions o;
    o.stop_at_boundary = false;
    o.t_end = T;
    o.keep_dense = true;
    const GeodesicRecord rec = solve_geodesic(m, {p, xi}, o);
    const Vec J = jacobi_field(m, rec, J0, DJ0).J(T);

    // Family of geodesics with the same initial data to first order.
    const double eps = 1e-6;
    const Vec dv0 = DJ0 + christoffel(*m.metric, p).contract(J0, xi);
    FlowOptions fo = o;
    fo.keep_dense = false;
    fo.ode.atol = fo.ode.rtol = 1e-13;
    const Vec xp = solve_geodesic(m, {p + eps * J0, xi + eps * dv0}, fo).y_final.head(2);
    const Vec xm = solve_geodesic(m, {p - eps * J0, xi - eps * dv0}, fo).y_final.head(2);
    const Vec fd = (xp - xm) / (2.0 * eps);
    worst = std::max(worst, (J - fd).norm() / std::max(fd.norm(), 1e-12));
  }
  add(out, "jacobi", "jacobi_vs_variation_rel", worst, 1e-4, opt);
}

void hausdorff_suite(const VerifyOptions& opt, Results& out) {
  std::mt19937_64 rng(opt.seed + 2);
  std::uniform_real_distribution<double> s(0.0, 2.0 * kPi), a(-0.5 * kPi, 0.5 * kPi);
  std::uniform_int_distribution<int> size(1, 20);
  auto make = [&] {
    PhaseSet ps;
    ps.length = 2.0 * kPi;
    ps.grid = 64;
    const int k = size(rng);
    for (int i = 0; i < k; ++i) ps.pts.push_back({s(rng), a(rng)});
    std::sort(ps.pts.begin(), ps.pts.end(), [](const PhasePoint& x, const PhasePoint& y) { return x.s < y.s; });
    return ps;
  };
  auto brute = [](const PhaseSet& x, const PhaseSet& y) {
    auto directed = [](const PhaseSet& u, const PhaseSet& w) {
      double sup = 0.0;
      for (const auto& p : u.pts) {
        double inf = std::numeric_limits<double>::infinity();
        for (const auto& q : w.pts) inf = std::min(inf, phase_distance(p, q, u.length));
        sup = std::max(sup, inf);
      }
      return sup;
    };
    return std::max(directed(x, y), directed(y, x));
  };
  double sym = 0.0, tri = 0.0, exact = 0.0;
  for (int k = 0; k < 100; ++k) {
    const PhaseSet A = make(), B = make(), C = make();
    const double ab = hausdorff(A, B).value, ba = hausdorff(B, A).value;
    const double bc = hausdorff(B, C).value, ac = hausdorff(A, C).value;
    sym = std::max(sym, std::abs(ab - ba));
    tri = std::max(tri, ac - ab - bc);
    exact = std::max(exact, std::abs(ab - brute(A, B)));
  }
  add(out, "hausdorff", "symmetry_violation", sym, 1e-12, opt);
  add(out, "hausdorff", "triangle_violation", std::max(tri, 0.0), 1e-12, opt);
  add(out, "hausdorff", "brute_force_mismatch", exact, 1e-12, opt);
}

void i0_suite(const Manifold& m, const VerifyOptions& opt, Results& out) {
  std::mt19937_64 rng(opt.seed + 3);
  const auto pts = sample_interior(m, std::max(1, opt.samples / 4), rng);
  const double c = 2.5;
  const ScaledMetric scaled(m.metric, c);
  double var_equal = 0.0, dev_scaled = 0.0;
  for (const Vec& p : pts) {
    FlowOptions o;
    o.keep_dense = true;
    o.ode.atol = o.ode.rtol = 1e-12;
    const GeodesicRecord rec = solve_geodesic(m, {p, random_direction(m, p, rng)}, o);
    var_equal = std::max(var_equal, i0_invariant(*m.metric, *m.metric, rec).max_rel_variation);
    for (double v : i0_invariant(*m.metric, scaled, rec).values)
      dev_scaled = std::max(dev_scaled, std::abs(v - std::pow(c, -1.0 / 3.0)));
  }
  add(out, "i0", "equal_metric_variation", var_equal, 1e-9, opt);
  add(out, "i0", "scaled_metric_deviation", dev_scaled, 1e-8, opt);
}

}  // namespace

std::vector<PropertyResult> run_suite(const Manifold& m, const std::string& suite, const VerifyOptions& opt) {
  Results out;
  const bool all = suite == "all";
  bool known = all;
  for (const auto& n : suite_names()) known = known || n == suite;
  if (!known) throw Error(ErrorCode::Usage, "unknown suite '" + suite + "'");
  if (all || suite == "convexity") convexity_suite(m, opt, out);
  if (all || suite == "conservation") conservation_suite(m, opt, out);
  if (all || suite == "jacobi") jacobi_suite(m, opt, out);
  if (all || suite == "hausdorff") hausdorff_suite(opt, out);
  if (all || suite == "i0") i0_suite(m, opt, out);
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<PropertyResult>& rows) {
  out << "suite,property,measured,tolerance,kind,result\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%s,%s\n", r.suite.c_str(), r.name.c_str(), r.measured,
                  r.tolerance, r.lower_bound ? "min" : "max", r.pass ? "pass" : "fail");
    out << buf;
  }
}

}  // namespace geoscatter
