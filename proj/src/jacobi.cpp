#include "geoscatter/jacobi.hpp"

#include <cstdio>
#include <limits>

#include "geoscatter/error.hpp"
#include "geoscatter/parallel.hpp"

namespace geoscatter {

namespace {

Vec gamma_contract(const MetricField& metric, const Vec& x, const Vec& a, const Vec& b) {
  // +Gamma^k_ij a^i b^j
  return -christoffel(metric, x).contract(a, b);
}

}  // namespace

Vec JacobiSolution::J(double t) const { return joint_.field_x(joint_.state_at(t), 0); }

Vec JacobiSolution::DJ(double t) const {
  const State y = joint_.state_at(t);
  const int n = joint_.n;
  const Vec x = y.head(n), v = y.segment(n, n);
  return joint_.field_v(y, 0) + gamma_contract(*metric_, x, joint_.field_x(y, 0), v);
}

JacobiSolution jacobi_field(const Manifold& m, const GeodesicRecord& record, const Vec& J0, const Vec& DJ0) {
  if (!record.has_dense()) throw Error(ErrorCode::Usage, "jacobi_field needs a record with dense output");
  const int n = record.n;
  const MetricField& metric = *m.metric;
  const Vec x0 = record.start.x, v0 = record.start.v;

  std::vector<double> nodes;
  nodes.reserve(record.dense.size() + 1);
  for (const DenseStep& d : record.dense)
    if (d.t0 < record.t_final) nodes.push_back(d.t0);
  nodes.push_back(record.t_final);

  GeodesicRecord joint;
  joint.n = n;
  joint.fields = 1;
  joint.start = record.start;
  joint.t_final = record.t_final;
  State y0(4 * n);
  y0.head(n) = x0;
  y0.segment(n, n) = v0;
  y0.segment(2 * n, n) = J0;
  y0.segment(3 * n, n) = DJ0 - gamma_contract(metric, x0, J0, v0);
  auto rhs = [&](double, const State& y) { return geodesic_rhs(metric, y, n, 1); };
  joint.y_final = dopri5_on_grid(rhs, y0, nodes, [&](const DenseStep& d) { joint.dense.push_back(d); });
  if (joint.dense.empty()) {
    // Zero-length record: a single degenerate step keeps evaluation uniform.
    DenseStep d;
    d.t0 = 0.0;
    d.h = 1.0;
    d.c.fill(State::Zero(y0.size()));
    d.c[0] = y0;
    joint.dense.push_back(d);
  }
  return JacobiSolution(std::move(joint), m.metric);
}

Mat d_exp(const Manifold& m, const Vec& q, const Vec& w) {
  const int n = m.dim();
  std::vector<Variation> vars;
  for (int i = 0; i < n; ++i) vars.push_back({Vec::Zero(n), Vec::Unit(n, i)});
  FlowOptions opt;
  opt.t_end = 1.0;
  opt.stop_at_boundary = false;
  Mat D(n, n);
  if (w.norm() == 0.0) return Mat::Identity(n, n);
  const GeodesicRecord rec = solve_geodesic(m, {q, w}, opt, vars);
  for (int i = 0; i < n; ++i) D.col(i) = rec.field_x(rec.y_final, i);
  return D;
}

Vec g_singular_values(const MetricField& metric, const Vec& q, const Vec& x, const Mat& D) {
  const Mat A = spd_roots(metric.eval(x)).sqrt * D * spd_roots(metric.eval(q)).inv_sqrt;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues();
}

const char* tag_name(DirectionTag tag) {
  switch (tag) {
    case DirectionTag::SelfIntersecting:
      return "self_intersecting";
    case DirectionTag::Good:
      return "good";
    case DirectionTag::Conjugate:
      return "conjugate";
    case DirectionTag::Tangential:
      return "tangential";
  }
  return "?";
}

DirectionClass classify_direction(const Manifold& m, const Vec& p, const Vec& xi) {
  const int n = m.dim();
  const MetricField& metric = *m.metric;
  const Mat gp = metric.eval(p);
  DirectionClass out;
  out.xi = xi;

  if (m.on_boundary(p)) {
    const Vec grad = m.domain->grad_b(p);
    const Vec up = gp.llt().solve(grad);
    const Vec nu = up / std::sqrt(grad.dot(up));
    if (std::abs(inner(gp, xi, nu)) < kEpsTangent) {
      out.tag = DirectionTag::Tangential;
      out.exit.x_exit = p;
      out.exit.v_exit = xi;
      out.exit.tangential = true;
      if (m.chart) out.exit.s_exit = m.chart->param_of(p);
      return out;
    }
  }

  std::vector<Variation> vars;
  for (int i = 0; i < n; ++i) vars.push_back({Vec::Zero(n), Vec::Unit(n, i)});
  FlowOptions opt;
  opt.keep_dense = true;
  const GeodesicRecord fwd = solve_geodesic(m, {p, xi}, opt, vars);
  out.exit = fwd.exit;
  if (fwd.exit.t_exit > 0.0) {
    Mat D(n, n);
    for (int i = 0; i < n; ++i) D.col(i) = fwd.field_x(fwd.y_final, i) / fwd.exit.t_exit;
    const Vec sv = g_singular_values(metric, p, fwd.exit.x_exit, D);
    out.smin_ratio = sv[n - 1] / sv[0];
  }

  FlowOptions back_opt;
  back_opt.keep_dense = true;
  const GeodesicRecord bwd = solve_geodesic(m, {p, -xi}, back_opt);
  double closest = std::numeric_limits<double>::infinity();
  for (const GeodesicRecord* rec : {&fwd, &bwd})
    for (const Approach& a : closest_approaches(*rec, p, kInjFloor))
      closest = std::min(closest, norm_g(gp, a.x - p));
  out.self_distance = closest;

  if (closest < kEpsSelf) out.tag = DirectionTag::SelfIntersecting;
  else if (out.smin_ratio < kEpsConj) out.tag = DirectionTag::Conjugate;
  else out.tag = DirectionTag::Good;
  return out;
}

std::vector<DirectionClass> classify_directions(const Manifold& m, const Vec& p, int grid, int workers) {
  if (grid < 64) throw Error(ErrorCode::Precondition, "direction grid must be at least 64");
  const std::vector<Vec> dirs = source_directions(m, p, grid);
  std::vector<DirectionClass> out(dirs.size());
  parallel_for(dirs.size(), workers, [&](std::size_t k) {
    out[k] = classify_direction(m, p, dirs[k]);
    out[k].angle = 2.0 * kPi * static_cast<double>(k) / grid;
  });
  return out;
}

void write_classification_csv(std::ostream& out, const std::vector<DirectionClass>& rows) {
  out << "dir_angle,tag,t_exit,smin_ratio\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g\n", r.angle, tag_name(r.tag), r.exit.t_exit, r.smin_ratio);
    out << buf;
  }
}

VariationalResult conjugate_variational_test(const Manifold& m, const Vec& p, const Vec& x_exit, const Vec& eta) {
  if (m.dim() != 2 || !m.chart) throw Error(ErrorCode::Usage, "variational test is implemented for n = 2");
  const MetricField& metric = *m.metric;
  const BoundaryChart& chart = *m.chart;
  const Vec eta_u = eta / norm_g(metric.eval(x_exit), eta);

  FlowOptions back_opt;
  back_opt.keep_dense = true;
  const GeodesicRecord back = solve_geodesic(m, {x_exit, -eta_u}, back_opt);
  const auto approaches = closest_approaches(back, p, 0.0);
  const Approach* hit = nullptr;
  for (const Approach& a : approaches)
    if (!hit || (a.x - p).norm() < (hit->x - p).norm()) hit = &a;
  if (!hit || (hit->x - p).norm() > 1e-6 * (1.0 + p.norm()))
    throw Error(ErrorCode::Precondition, "backward geodesic of the exit sample does not pass through p");

  VariationalResult res;
  res.t_source = hit->t;
  if (res.t_source <= kInjFloor) throw Error(ErrorCode::Inconclusive, "source lies on the boundary at the exit point");
  const Mat gp = metric.eval(p);
  const Vec xi = -hit->v / norm_g(gp, hit->v);
  const SpdRoots roots = spd_roots(gp);
  const Vec u = roots.sqrt * xi;
  const Vec w = roots.inv_sqrt * vec2(-u[1], u[0]);

  FlowOptions opt;
  opt.ode.atol = 1e-12;
  opt.ode.rtol = 1e-12;
  struct Shot {
    double s;
    double eta_t;
    double eta_nu;
  };
  auto shoot = [&](double h) {
    Vec dir = xi + h * w;
    dir /= norm_g(gp, dir);
    const GeodesicRecord rec = solve_geodesic(m, {p, dir}, opt);
    if (rec.exit.tangential) throw Error(ErrorCode::Inconclusive, "shooting family grazes the boundary");
    const double a = outward_angle(chart, {rec.exit.s_exit, rec.exit.x_exit, rec.exit.v_exit});
    return Shot{rec.exit.s_exit, std::sin(a), std::cos(a)};
  };

  const double h = 1e-3;
  const Shot c = shoot(0.0);
  res.eta_nu = c.eta_nu;
  if (c.eta_nu < 1e-3) throw Error(ErrorCode::Inconclusive, "exit direction is nearly tangential");
  const Shot p1 = shoot(h), m1 = shoot(-h), p2 = shoot(h / 2), m2 = shoot(-h / 2);
  const double L = chart.length();
  auto richardson = [&](double fp1, double fm1, double fp2, double fm2) {
    const double d1 = (fp1 - fm1) / (2 * h), d2 = (fp2 - fm2) / h;
    return (4.0 * d2 - d1) / 3.0;
  };
  res.exit_speed = std::abs(richardson(periodic_diff(p1.s, c.s, L), periodic_diff(m1.s, c.s, L),
                                       periodic_diff(p2.s, c.s, L), periodic_diff(m2.s, c.s, L)));
  res.d_eta_t = richardson(p1.eta_t, m1.eta_t, p2.eta_t, m2.eta_t);

  // In two dimensions the perpendicular Jacobi field at the exit has length
  // |dq/ds| * eta_nu, and the radial singular value of D exp is 1.
  const double a = res.exit_speed * res.eta_nu / res.t_source;
  res.ratio = std::min(a, 1.0) / std::max(a, 1.0);
  res.conjugate = res.ratio < kEpsConj && std::abs(res.d_eta_t) > 1e-3;
  return res;
}

}  // namespace geoscatter
