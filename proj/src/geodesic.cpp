#include "geoscatter/geodesic.hpp"

#include <algorithm>
#include <cstdio>

#include "geoscatter/error.hpp"

namespace geoscatter {

namespace {

constexpr int kEventSamples = 8;

Vec outward_normal(const Mat& g, const Vec& grad_b) {
  const Vec up = g.llt().solve(grad_b);
  return up / std::sqrt(grad_b.dot(up));
}

double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

bool on_boundary_tol(const Jet& b) { return std::abs(b.v) <= 1e-9 * std::max(1.0, b.d.norm()); }

}  // namespace

State geodesic_rhs(const MetricField& metric, const State& y, int n, int fields) {
  State dy(y.size());
  const Vec x = y.head(n);
  const Vec v = y.segment(n, n);
  dy.head(n) = v;
  dy.segment(n, n) = metric.geodesic_acceleration(x, v);
  for (int i = 0; i < fields; ++i) {
    const int off = 2 * n + 2 * n * i;
    const Vec dx = y.segment(off, n);
    const Vec dv = y.segment(off + n, n);
    dy.segment(off, n) = dv;
    const double size = std::sqrt(dx.squaredNorm() + dv.squaredNorm());
    if (size == 0.0) {
      dy.segment(off + n, n).setZero();
      continue;
    }
    // Directional central difference of the acceleration.
    const double eps = 1e-5 / size;
    const Vec ap = metric.geodesic_acceleration(x + eps * dx, v + eps * dv);
    const Vec am = metric.geodesic_acceleration(x - eps * dx, v - eps * dv);
    dy.segment(off + n, n) = (ap - am) / (2.0 * eps);
  }
  return dy;
}

State GeodesicRecord::state_at(double t) const {
  if (dense.empty()) throw Error(ErrorCode::Usage, "geodesic record has no dense output");
  t = std::clamp(t, 0.0, t_final);
  auto it = std::upper_bound(dense.begin(), dense.end(), t, [](double tt, const DenseStep& d) { return tt < d.t0; });
  if (it != dense.begin()) --it;
  return it->eval(t);
}

GeodesicState GeodesicRecord::at(double t) const {
  const State y = state_at(t);
  return {y.head(n), y.segment(n, n)};
}

GeodesicRecord solve_geodesic(const Manifold& m, const GeodesicState& start, const FlowOptions& opt,
                              const std::vector<Variation>& variations) {
  const int n = m.dim();
  if (start.x.size() != n || start.v.size() != n) throw Error(ErrorCode::Usage, "state dimension mismatch");
  const int fields = static_cast<int>(variations.size());
  if (2 * n + 2 * n * fields > State::MaxRowsAtCompileTime)
    throw Error(ErrorCode::Usage, "too many variation fields");

  GeodesicRecord rec;
  rec.n = n;
  rec.fields = fields;
  rec.start = start;
  State y0(2 * n + 2 * n * fields);
  y0.head(n) = start.x;
  y0.segment(n, n) = start.v;
  for (int i = 0; i < fields; ++i) {
    y0.segment(2 * n + 2 * n * i, n) = variations[i].dx;
    y0.segment(2 * n + 2 * n * i + n, n) = variations[i].dv;
  }
  rec.y_final = y0;

  const DomainSpec& dom = *m.domain;
  const MetricField& metric = *m.metric;
  const double t_end = opt.t_end > 0.0 ? opt.t_end : m.default_t_max();

  auto finish_exit = [&](double t, const State& y) {
    rec.exited = true;
    rec.t_final = t;
    rec.y_final = y;
    ExitRecord& e = rec.exit;
    e.t_exit = t;
    e.x_exit = y.head(n);
    e.v_exit = y.segment(n, n);
    if (m.chart) e.s_exit = m.chart->param_of(e.x_exit);
    const Mat g = metric.eval(e.x_exit);
    const Vec nu = outward_normal(g, dom.grad_b(e.x_exit));
    const double speed = norm_g(g, e.v_exit);
    e.tangential = speed == 0.0 || std::abs(inner(g, e.v_exit, nu)) / speed < kEpsTangent;
  };

  const Jet b0 = dom.level(start.x);
  if (opt.stop_at_boundary) {
    if (b0.v > 1e-9 * std::max(1.0, b0.d.norm()))
      throw Error(ErrorCode::Precondition, "start point lies outside closure(M)");
    if (on_boundary_tol(b0)) {
      const Mat g = metric.eval(start.x);
      const double speed = norm_g(g, start.v);
      const double vn = speed > 0.0 ? inner(g, start.v, outward_normal(g, b0.d)) / speed : 0.0;
      if (vn >= -kEpsTangent) {
        finish_exit(0.0, y0);
        return rec;
      }
    }
  }

  auto rhs = [&](double, const State& y) { return geodesic_rhs(metric, y, n, fields); };
  OdeOptions ode = opt.ode;
  // Capped so a step started where g is exactly flat cannot skip a
  // compactly supported feature of the metric.
  if (ode.h_max <= 0.0) ode.h_max = 0.1 * m.diameter;

  bool armed = b0.v < 0.0;
  double prev_t = 0.0, prev_b = b0.v;
  auto bvalue = [&](const DenseStep& d, double t) { return dom.b(d.eval(t).head(n)); };

  auto on_step = [&](const DenseStep& d) {
    if (opt.keep_dense) rec.dense.push_back(d);
    if (!opt.stop_at_boundary) return true;
    for (int k = 1; k <= kEventSamples; ++k) {
      const double t = k == kEventSamples ? d.t1() : d.t0 + d.h * k / kEventSamples;
      const double bk = bvalue(d, t);
      if (!armed) {
        if (bk < 0.0) armed = true;
      } else if (bk > 0.0) {
        // Illinois iteration on the dense interpolant.
        double ta = prev_t, fa = prev_b, tb = t, fb = bk, tc = t, fc = bk;
        int side = 0;
        for (int it = 0; it < 200; ++it) {
          tc = (fa * tb - fb * ta) / (fa - fb);
          fc = bvalue(d, tc);
          if (std::abs(fc) < kEpsEvent) break;
          if (fc > 0.0) {
            tb = tc;
            fb = fc;
            if (side == 1) fa *= 0.5;
            side = 1;
          } else {
            ta = tc;
            fa = fc;
            if (side == -1) fb *= 0.5;
            side = -1;
          }
          if (tb - ta < 1e-15 * (1.0 + tb)) break;
        }
        finish_exit(tc, d.eval(tc));
        return false;
      }
      prev_t = t;
      prev_b = bk;
    }
    return true;
  };

  const OdeResult res = dopri5(rhs, 0.0, y0, t_end, ode, on_step);
  switch (res.stop) {
    case OdeStop::Stopped:
      return rec;
    case OdeStop::ReachedEnd:
      if (opt.stop_at_boundary && opt.horizon_is_trapping)
        throw Error(ErrorCode::PossibleTrapping,
                    "no boundary exit before t_max = " + std::to_string(t_end) + " (possible trapping)");
      rec.t_final = res.t;
      rec.y_final = res.y;
      return rec;
    case OdeStop::StepUnderflow:
      throw Error(ErrorCode::Stiffness, "step size underflow at t = " + std::to_string(res.t));
    case OdeStop::TooManySteps:
      throw Error(ErrorCode::Stiffness, "step budget exhausted at t = " + std::to_string(res.t));
  }
  return rec;
}

GeodesicRecord integrate_geodesic(const Manifold& m, const GeodesicState& start, double t_max, bool keep_dense) {
  const Mat g = m.metric->eval(start.x);
  if (std::abs(inner(g, start.v, start.v) - 1.0) > 1e-8)
    throw Error(ErrorCode::Precondition, "initial velocity is not g-unit");
  FlowOptions opt;
  opt.t_end = t_max;
  opt.keep_dense = keep_dense;
  return solve_geodesic(m, start, opt);
}

double exit_time(const Manifold& m, const Vec& p, const Vec& xi) { return integrate_geodesic(m, {p, xi}).exit.t_exit; }

Vec exponential_map(const Manifold& m, const Vec& q, const Vec& w) {
  const double len = norm_g(m.metric->eval(q), w);
  if (len == 0.0) return q;
  FlowOptions opt;
  opt.t_end = len;
  opt.horizon_is_trapping = false;
  const GeodesicRecord rec = solve_geodesic(m, {q, w / len}, opt);
  if (rec.exited) {
    if (rec.exit.t_exit < len - 1e-9 * (1.0 + len)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "geodesic leaves M at t = %.17g before |w| = %.17g", rec.exit.t_exit, len);
      throw Error(ErrorCode::OutOfDomain, buf);
    }
    return rec.exit.x_exit;
  }
  return rec.y_final.head(m.dim());
}

LensEntry scattering_relation(const Manifold& m, const BoundaryVector& entry) {
  const Jet b = m.domain->level(entry.x);
  if (!on_boundary_tol(b)) throw Error(ErrorCode::Precondition, "entry point is not on the boundary");
  const Mat g = m.metric->eval(entry.x);
  const double speed = norm_g(g, entry.v);
  const double vn = inner(g, entry.v, outward_normal(g, b.d)) / speed;
  if (vn > kEpsTangent) throw Error(ErrorCode::Precondition, "entry direction points outward");
  LensEntry out;
  out.entry = entry;
  if (vn > -kEpsTangent) {
    out.exit = entry;
    return out;
  }
  const GeodesicRecord rec = integrate_geodesic(m, {entry.x, entry.v / speed});
  out.exit.x = rec.exit.x_exit;
  out.exit.v = rec.exit.v_exit;
  out.exit.s = rec.exit.s_exit;
  out.time = rec.exit.t_exit;
  return out;
}

double inward_angle(const BoundaryChart& chart, const BoundaryVector& b) {
  const BoundaryFrame f = chart.frame(b.s);
  const Mat g = chart.metric().eval(f.x);
  return std::atan2(inner(g, b.v, f.tangent), -inner(g, b.v, f.normal));
}

double outward_angle(const BoundaryChart& chart, const BoundaryVector& b) {
  const BoundaryFrame f = chart.frame(b.s);
  const Mat g = chart.metric().eval(f.x);
  return std::atan2(inner(g, b.v, f.tangent), inner(g, b.v, f.normal));
}

BoundaryVector boundary_vector_from_angle(const BoundaryChart& chart, double s, double angle_from_inward) {
  const BoundaryFrame f = chart.frame(s);
  return {f.s, f.x, -std::cos(angle_from_inward) * f.normal + std::sin(angle_from_inward) * f.tangent};
}

void write_lens_csv(std::ostream& out, const BoundaryChart& chart, const std::vector<LensEntry>& rows) {
  out << "s_in,angle_in,s_out,angle_out,time\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.entry.s, inward_angle(chart, r.entry),
                  r.exit.s, outward_angle(chart, r.exit), r.time);
    out << buf;
  }
}

std::vector<Approach> closest_approaches(const GeodesicRecord& rec, const Vec& q, double t_min) {
  std::vector<Approach> out;
  if (rec.dense.empty()) return out;
  const int n = rec.n;
  auto slope = [&](const State& y) { return (y.head(n) - q).dot(y.segment(n, n)); };
  auto make = [&](double t) {
    const State y = rec.state_at(t);
    Approach a;
    a.t = t;
    a.x = y.head(n);
    a.v = y.segment(n, n);
    if (n == 2) a.signed_distance = cross2(a.v, q - a.x) / a.v.norm();
    else a.signed_distance = (a.x - q).norm();
    return a;
  };

  double pt = std::max(t_min, 0.0);
  double ps = slope(rec.state_at(pt));
  for (const DenseStep& d : rec.dense) {
    if (d.t1() <= pt) continue;
    for (int k = 1; k <= kEventSamples; ++k) {
      const double t = std::min(d.t0 + d.h * k / kEventSamples, rec.t_final);
      if (t <= pt) continue;
      const double sk = slope(d.eval(t));
      if (ps < 0.0 && sk >= 0.0) {
        double a = pt, b = t;
        for (int it = 0; it < 60 && b - a > 1e-15 * (1.0 + b); ++it) {
          const double c = 0.5 * (a + b);
          (slope(d.eval(c)) < 0.0 ? a : b) = c;
        }
        out.push_back(make(0.5 * (a + b)));
      }
      pt = t;
      ps = sk;
      if (t >= rec.t_final) break;
    }
    if (pt >= rec.t_final) break;
  }
  if (ps < 0.0) out.push_back(make(rec.t_final));
  return out;
}

Vec unit_direction(const MetricField& metric, const Vec& x, double theta) {
  const SpdRoots r = spd_roots(metric.eval(x));
  Vec u = Vec::Zero(x.size());
  u[0] = std::cos(theta);
  u[1] = std::sin(theta);
  return r.inv_sqrt * u;
}

std::vector<Vec> source_directions(const Manifold& m, const Vec& p, int grid) {
  std::vector<Vec> out;
  out.reserve(grid);
  if (m.chart && m.on_boundary(p)) {
    const BoundaryFrame f = m.chart->frame(m.chart->param_of(p));
    for (int k = 0; k < grid; ++k) {
      const double th = 2.0 * kPi * k / grid;
      out.push_back(std::cos(th) * f.tangent + std::sin(th) * f.normal);
    }
    return out;
  }
  const SpdRoots r = spd_roots(m.metric->eval(p));
  for (int k = 0; k < grid; ++k) {
    const double th = 2.0 * kPi * k / grid;
    out.push_back(r.inv_sqrt * vec2(std::cos(th), std::sin(th)));
  }
  return out;
}

namespace {

struct Root {
  double angle;
  double length;
};

// Signed distance of the approach nearest to t_ref along the geodesic with
// initial direction angle theta. Returns false if the geodesic has none.
bool approach_near(const Manifold& m, const Vec& p, const Vec& q, double theta, double t_ref, Approach& out) {
  FlowOptions opt;
  opt.keep_dense = true;
  const GeodesicRecord rec = solve_geodesic(m, {p, unit_direction(*m.metric, p, theta)}, opt);
  const auto list = closest_approaches(rec, q, 1e-12);
  if (list.empty()) return false;
  out = *std::min_element(list.begin(), list.end(), [&](const Approach& a, const Approach& b) {
    return std::abs(a.t - t_ref) < std::abs(b.t - t_ref);
  });
  return true;
}

}  // namespace

GeodesicCount connecting_geodesics(const Manifold& m, const Vec& p, const Vec& q, int grid) {
  if (m.dim() != 2) throw Error(ErrorCode::Usage, "geodesic counting is implemented for n = 2");
  if (grid < 8) throw Error(ErrorCode::Precondition, "direction grid too small");
  std::vector<std::vector<Approach>> scan(grid);
  FlowOptions opt;
  opt.keep_dense = true;
  for (int k = 0; k < grid; ++k) {
    const double theta = 2.0 * kPi * k / grid;
    const GeodesicRecord rec = solve_geodesic(m, {p, unit_direction(*m.metric, p, theta)}, opt);
    scan[k] = closest_approaches(rec, q, 1e-12);
  }

  GeodesicCount result;
  std::vector<Root> roots;
  const double match_t = 0.1 * m.diameter;
  for (int k = 0; k < grid; ++k) {
    const int k1 = (k + 1) % grid;
    const double th0 = 2.0 * kPi * k / grid, th1 = th0 + 2.0 * kPi / grid;
    for (const Approach& a : scan[k]) {
      if ((a.x - q).norm() < 1e-9) {
        roots.push_back({th0, a.t});
        continue;
      }
      const Approach* b = nullptr;
      for (const Approach& c : scan[k1])
        if (!b || std::abs(c.t - a.t) < std::abs(b->t - a.t)) b = &c;
      if (!b || std::abs(b->t - a.t) > match_t) continue;
      if ((a.signed_distance > 0.0) == (b->signed_distance > 0.0)) continue;
      if ((b->x - q).norm() < 1e-9) continue;  // found from the other side

      double lo = th0, hi = th1, f_lo = a.signed_distance, t_ref = 0.5 * (a.t + b->t);
      Approach mid = a;
      bool ok = true;
      for (int it = 0; it < 80; ++it) {
        const double c = 0.5 * (lo + hi);
        if (!approach_near(m, p, q, c, t_ref, mid)) {
          ok = false;
          break;
        }
        t_ref = mid.t;
        if ((mid.x - q).norm() < 1e-9 || hi - lo < 1e-15) break;
        if ((mid.signed_distance > 0.0) == (f_lo > 0.0)) {
          lo = c;
          f_lo = mid.signed_distance;
        } else {
          hi = c;
        }
      }
      if (!ok) continue;
      const double miss = (mid.x - q).norm();
      if (miss < 1e-9) roots.push_back({0.5 * (lo + hi), mid.t});
      else if (miss < 1e-6) result.uncertain = true;
      // Larger misses are jumps between approach branches, not crossings.
    }
  }

  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.angle < b.angle; });
  std::vector<Root> clusters;
  for (const Root& r : roots) {
    bool merged = false;
    for (Root& c : clusters) {
      const double da = std::abs(periodic_diff(r.angle, c.angle, 2.0 * kPi));
      if (da < 1e-3 && std::abs(r.length - c.length) < 1e-3) {
        merged = true;
        break;
      }
    }
    if (!merged) clusters.push_back(r);
  }
  for (const Root& c : clusters) {
    result.angles.push_back(c.angle);
    result.lengths.push_back(c.length);
  }
  result.count = static_cast<int>(clusters.size());
  return result;
}

GeodesicCount count_connecting_geodesics(const Manifold& m, const Vec& p, const Vec& q, double ell, double tol,
                                         int grid) {
  const GeodesicCount all = connecting_geodesics(m, p, q, grid);
  GeodesicCount out;
  out.uncertain = all.uncertain;
  for (std::size_t i = 0; i < all.angles.size(); ++i)
    if (std::abs(all.lengths[i] - ell) <= tol) {
      out.angles.push_back(all.angles[i]);
      out.lengths.push_back(all.lengths[i]);
    }
  out.count = static_cast<int>(out.angles.size());
  return out;
}

}  // namespace geoscatter
