#include "geoscatter/charts.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "geoscatter/error.hpp"

namespace geoscatter {

namespace {

FlowOptions shooting_options(double t_end) {
  FlowOptions opt;
  opt.stop_at_boundary = false;
  opt.keep_dense = true;
  opt.t_end = t_end;
  opt.ode.atol = 1e-12;
  opt.ode.rtol = 1e-12;
  return opt;
}

double det2(const Mat& J) { return J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0); }

void require_2d(const Manifold& m) {
  if (m.dim() != 2 || !m.chart) throw Error(ErrorCode::Usage, "charts are implemented for n = 2");
}

}  // namespace

ThetaChart::ThetaChart(const Manifold& m, const Vec& q) : m_(m), q_(q) {
  require_2d(m);
  roots_ = spd_roots(m.metric->eval(q));
}

ThetaValue ThetaChart::eval(const Vec& z, double angle_guess) const {
  const MetricField& metric = *m_.metric;
  const Vec d = z - q_;
  const double dist = std::max(norm_g(metric.eval(q_), d), norm_g(metric.eval(z), d));
  if (dist < 1e-12) throw Error(ErrorCode::ChartFailure, "point coincides with the chart base");

  struct Shot {
    double f = 0.0;
    double t = 0.0;
    Vec x;
  };
  double t_ref = dist;
  auto shoot = [&](double th) {
    double t_end = 1.5 * dist + 0.05 * m_.diameter;
    for (int attempt = 0; attempt < 4; ++attempt, t_end *= 2.0) {
      const GeodesicRecord rec =
          solve_geodesic(m_, {q_, unit_direction(metric, q_, th)}, shooting_options(t_end));
      const auto list = closest_approaches(rec, z, 1e-12);
      const Approach* best = nullptr;
      for (const Approach& a : list)
        if (!best || std::abs(a.t - t_ref) < std::abs(best->t - t_ref)) best = &a;
      if (best && best->t < rec.t_final) return Shot{best->signed_distance, best->t, best->x};
    }
    throw Error(ErrorCode::ChartFailure, "shooting geodesic never approaches the target");
  };

  double th_a = angle_guess;
  if (std::isnan(th_a)) {
    const Vec u = roots_.sqrt * d;
    th_a = std::atan2(u[1], u[0]);
  }
  Shot a = shoot(th_a);
  t_ref = a.t;
  double th_b = th_a + 1e-4;
  Shot b = shoot(th_b);
  for (int it = 0; it < 60 && std::abs(b.f) > 1e-14; ++it) {
    if (b.f == a.f) break;
    double step = -b.f * (th_b - th_a) / (b.f - a.f);
    step = std::clamp(step, -0.5, 0.5);
    th_a = th_b;
    a = b;
    th_b += step;
    t_ref = a.t;
    b = shoot(th_b);
    if (std::abs(step) < 1e-15) break;
  }
  if ((b.x - z).norm() > 1e-9 * (1.0 + z.norm())) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "shooting did not converge (miss %.3g)", (b.x - z).norm());
    throw Error(ErrorCode::ChartFailure, buf);
  }
  return {th_b, unit_direction(metric, q_, th_b), b.t};
}

Mat ThetaChart::derivative(const Vec& z, double h) const {
  const double guess = eval(z).angle;
  Mat D(2, 2);
  for (int j = 0; j < 2; ++j) {
    Vec e = Vec::Zero(2);
    e[j] = h;
    D.col(j) = (eval(z + e, guess).direction - eval(z - e, guess).direction) / (2.0 * h);
  }
  return D;
}

void ThetaChart::certify(const std::vector<Vec>& region, int grid) const {
  for (const Vec& z : region) {
    const ThetaValue tv = eval(z);
    const Mat D = d_exp(m_, q_, tv.length * tv.direction);
    const Vec sv = g_singular_values(*m_.metric, q_, z, D);
    if (sv[1] < kEpsConj * sv[0]) throw Error(ErrorCode::SingularChart, "exponential map is singular along the chart");
    if (m_.domain->b(z) >= 0.0) continue;
    const GeodesicCount c = connecting_geodesics(m_, q_, z, grid);
    if (c.count > 1) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%d geodesics from the base reach (%.6g, %.6g)", c.count, z[0], z[1]);
      throw Error(ErrorCode::NotInjective, buf);
    }
  }
}

ThetaChart theta_chart(const Manifold& m, const Vec& q, const std::vector<Vec>& region, int grid) {
  ThetaChart c(m, q);
  c.certify(region, grid);
  return c;
}

const char* chart_kind_name(ChartKind kind) { return kind == ChartKind::Interior ? "interior" : "boundary"; }

InteriorChart::InteriorChart(const Manifold& m, const Vec& q, const Vec& qt, const Vec& v, const Vec& p)
    : m_(m), tq_(m, q), tqt_(m, qt), v_(v), p_(p) {
  const ThetaValue a = tq_.eval(p);
  angle_ref_ = a.angle;
  length_ref_ = a.length;
  angle_ref_t_ = tqt_.eval(p).angle;
}

Vec InteriorChart::coords(const Vec& z) const {
  const ThetaValue a = tq_.eval(z, angle_ref_);
  const ThetaValue b = tqt_.eval(z, angle_ref_t_);
  return vec2(angle_ref_ + periodic_diff(a.angle, angle_ref_, 2.0 * kPi),
              inner(m_.metric->eval(tqt_.base()), v_, b.direction));
}

Vec InteriorChart::inverse(const Vec& c) const {
  const MetricField& metric = *m_.metric;
  const Vec& q = tq_.base();
  const GeodesicRecord rec =
      solve_geodesic(m_, {q, unit_direction(metric, q, c[0])}, shooting_options(2.0 * length_ref_ + 0.1 * m_.diameter));
  const Mat gt = metric.eval(tqt_.base());
  auto F = [&](double t) { return inner(gt, v_, tqt_.eval(rec.at(t).x, angle_ref_t_).direction) - c[1]; };
  double ta = length_ref_, tb = length_ref_ + 1e-3;
  double fa = F(ta), fb = F(tb);
  for (int it = 0; it < 60 && std::abs(fb) > 1e-14 && fb != fa; ++it) {
    const double step = std::clamp(-fb * (tb - ta) / (fb - fa), -0.25 * length_ref_, 0.25 * length_ref_);
    ta = tb;
    fa = fb;
    tb = std::clamp(tb + step, 1e-9, rec.t_final);
    fb = F(tb);
    if (std::abs(step) < 1e-15) break;
  }
  return rec.at(tb).x;
}

Mat InteriorChart::jacobian(const Vec& z, double h) const {
  Mat J(2, 2);
  for (int j = 0; j < 2; ++j) {
    Vec e = Vec::Zero(2);
    e[j] = h;
    J.col(j) = (coords(z + e) - coords(z - e)) / (2.0 * h);
  }
  return J;
}

ChartCandidate interior_chart_with(const Manifold& m, const Vec& p, const Vec& q, const Vec& qt, const Vec& v) {
  require_2d(m);
  const InteriorChart chart(m, q, qt, v, p);
  ChartCandidate c;
  c.kind = ChartKind::Interior;
  c.p = p;
  c.q = q;
  c.qt = qt;
  c.eta = -chart.theta_q().eval(p).direction;
  c.eta_t = -chart.theta_qt().eval(p).direction;
  c.v = v;
  c.jacobian = chart.jacobian(p);
  c.det = det2(c.jacobian);
  c.jacobian_ok = std::abs(c.det) > kInteriorDetMin;
  return c;
}

ChartCandidate interior_chart(const Manifold& m, const Vec& p, std::uint64_t seed, int grid) {
  require_2d(m);
  if (grid < 8) throw Error(ErrorCode::Precondition, "direction grid too small");
  const std::vector<Vec> dirs = source_directions(m, p, grid);
  std::vector<std::optional<DirectionClass>> cache(grid);
  auto cls = [&](int k) -> const DirectionClass& {
    k = ((k % grid) + grid) % grid;
    if (!cache[k]) cache[k] = classify_direction(m, p, dirs[k]);
    return *cache[k];
  };
  auto good = [&](int k) {
    const DirectionClass& c = cls(k);
    return c.tag == DirectionTag::Good && c.exit.t_exit > kInjFloor;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  ChartCandidate best;
  bool have = false;
  for (int k = 0; k < grid; ++k) {
    if (!good(k)) continue;
    const Vec q = cls(k).exit.x_exit;
    const Vec q_back = cls(k + grid / 2).exit.x_exit;
    for (int j = 0; j <= grid / 8; ++j) {
      const int kt = k + grid / 4 + ((j % 2) ? -(j + 1) / 2 : j / 2);
      if (!good(kt)) continue;
      const Vec qt = cls(kt).exit.x_exit;
      if ((qt - q).norm() < 1e-6 || (qt - q_back).norm() < 1e-6) continue;

      // The first row does not depend on v; pick v from a random family by
      // the determinant it gives.
      const InteriorChart probe(m, q, qt, vec2(1.0, 0.0), p);
      const Mat J1 = probe.jacobian(p);
      const Mat Dt = probe.theta_qt().derivative(p);
      const Mat gt = m.metric->eval(qt);
      Vec v_best;
      double d_best = -1.0;
      for (int r = 0; r < 16; ++r) {
        const Vec v = unit_direction(*m.metric, qt, angle(rng));
        const Vec row = Dt.transpose() * (gt * v);
        const double d = std::abs(J1(0, 0) * row[1] - J1(0, 1) * row[0]);
        if (d > d_best) {
          d_best = d;
          v_best = v;
        }
      }
      ChartCandidate c = interior_chart_with(m, p, q, qt, v_best);
      if (c.jacobian_ok) return c;
      if (!have || std::abs(c.det) > std::abs(best.det)) {
        best = c;
        have = true;
      }
      break;
    }
  }
  if (have) return best;
  int n_good = 0;
  for (int k = 0; k < grid; ++k) n_good += good(k);
  char buf[160];
  std::snprintf(buf, sizeof buf, "no anchor pair found: %d of %d directions are good", n_good, grid);
  throw Error(ErrorCode::ChartFailure, buf);
}

BoundaryCoordChart::BoundaryCoordChart(const Manifold& m, double w_angle, const Vec& q, const Vec& v, const Vec& p)
    : m_(m), w_angle_(w_angle), tq_(m, q), v_(v), p_(p) {
  s_ref_ = m.boundary().param_of(p);
  angle_ref_ = tq_.eval(p).angle;
  const double h = 1e-5;
  const Vec W = inward_field(s_ref_);
  const double wq = (q_value(p + h * W) - q_value(p - h * W)) / (2.0 * h);
  sign_ = wq > 0.0 ? -1.0 : 1.0;
}

Vec BoundaryCoordChart::inward_field(double s) const {
  const BoundaryFrame f = m_.boundary().frame(s);
  return -std::cos(w_angle_) * f.normal + std::sin(w_angle_) * f.tangent;
}

double BoundaryCoordChart::project(const Vec& x) const {
  const BoundaryChart& chart = m_.boundary();
  if (m_.on_boundary(x)) return chart.param_of(x);
  const double L = chart.length();
  const double t_end = 0.25 * m_.diameter;
  // Signed distance from x to the W-geodesic line through the boundary point s.
  auto F = [&](double s) {
    const Vec z = chart.point(s);
    const Vec W = inward_field(s);
    for (double dir : {1.0, -1.0}) {
      const GeodesicRecord rec = solve_geodesic(m_, {z, dir * W}, shooting_options(t_end));
      const auto list = closest_approaches(rec, x, 1e-12);
      if (!list.empty() && list.front().t < rec.t_final) return dir * list.front().signed_distance;
    }
    throw Error(ErrorCode::ChartFailure, "point is outside the collar of the boundary field");
  };
  double a = chart.param_of(x), fa = F(a);
  if (fa == 0.0) return a;
  double b = a, fb = fa;
  for (double delta = 1e-4 * L; delta < 0.25 * L; delta *= 2.0) {
    const double c = a + (fa > 0.0 ? -delta : delta);
    const double fc = F(c);
    if ((fc > 0.0) != (fa > 0.0)) {
      b = c;
      fb = fc;
      break;
    }
    // Sign pattern unclear: try the other side as well.
    const double c2 = a + (fa > 0.0 ? delta : -delta);
    const double fc2 = F(c2);
    if ((fc2 > 0.0) != (fa > 0.0)) {
      b = c2;
      fb = fc2;
      break;
    }
  }
  if ((fb > 0.0) == (fa > 0.0)) throw Error(ErrorCode::ChartFailure, "boundary projection not bracketed");
  // Illinois iteration.
  int side = 0;
  for (int it = 0; it < 100 && std::abs(b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
    const double c = b - fb * (b - a) / (fb - fa);
    const double fc = F(c);
    if (fc == 0.0) return wrap_periodic(c, L);
    if ((fc > 0.0) == (fb > 0.0)) {
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = b;
      fa = fb;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    b = c;
    fb = fc;
    if (std::abs(fb) < 1e-15) break;
  }
  return wrap_periodic(b, L);
}

double BoundaryCoordChart::q_value(const Vec& x) const {
  return inner(m_.metric->eval(tq_.base()), v_, tq_.eval(x, angle_ref_).direction);
}

double BoundaryCoordChart::q_tilde(const Vec& x) const {
  const double s = project(x);
  return sign_ * (q_value(m_.boundary().point(s)) - q_value(x));
}

Vec BoundaryCoordChart::coords(const Vec& z) const {
  const double s = project(z);
  const double qt = sign_ * (q_value(m_.boundary().point(s)) - q_value(z));
  return vec2(qt, s_ref_ + periodic_diff(s, s_ref_, m_.boundary().length()));
}

Mat BoundaryCoordChart::jacobian(const Vec& z, double h) const {
  Mat J(2, 2);
  for (int j = 0; j < 2; ++j) {
    Vec e = Vec::Zero(2);
    e[j] = h;
    J.col(j) = (coords(z + e) - coords(z - e)) / (2.0 * h);
  }
  return J;
}

ChartCandidate boundary_chart(const Manifold& m, const Vec& p) {
  require_2d(m);
  if (!m.on_boundary(p)) throw Error(ErrorCode::Precondition, "boundary chart needs a boundary point");
  const BoundaryChart& chart = m.boundary();
  const double s = chart.param_of(p);
  const BoundaryFrame f = chart.frame(s);
  auto inward = [&](double a) { return Vec(-std::cos(a) * f.normal + std::sin(a) * f.tangent); };

  double w_angle = 0.0;
  bool found = false;
  for (double a : {0.0, 0.2, -0.2, 0.4, -0.4, 0.6, -0.6}) {
    if (classify_direction(m, p, inward(a)).tag != DirectionTag::SelfIntersecting) {
      w_angle = a;
      found = true;
      break;
    }
  }
  if (!found) throw Error(ErrorCode::ChartFailure, "every inward field direction is self-intersecting");
  const Vec W = inward(w_angle);

  ChartCandidate best;
  bool have = false;
  for (double beta : {0.25 * kPi, -0.25 * kPi, kPi / 3, -kPi / 3, kPi / 6, -kPi / 6}) {
    const double gamma = w_angle + beta;
    if (std::abs(gamma) > 1.3) continue;
    const DirectionClass dc = classify_direction(m, p, inward(gamma));
    if (dc.tag != DirectionTag::Good || dc.exit.t_exit <= kInjFloor) continue;
    const Vec q = dc.exit.x_exit;
    const ThetaChart tq(m, q);
    const Mat gq = m.metric->eval(q);
    const Vec dw = tq.derivative(p) * W;
    if (norm_g(gq, dw) == 0.0) continue;
    const Vec v = dw / norm_g(gq, dw);
    const BoundaryCoordChart bc(m, w_angle, q, v, p);
    ChartCandidate c;
    c.kind = ChartKind::Boundary;
    c.p = p;
    c.q = q;
    c.eta = dc.exit.v_exit;
    c.v = v;
    c.w_angle = w_angle;
    c.jacobian = bc.jacobian(p);
    c.det = det2(c.jacobian);
    c.jacobian_ok = std::abs(c.det) > kBoundaryDetMin;
    if (c.jacobian_ok) return c;
    if (!have || std::abs(c.det) > std::abs(best.det)) {
      best = c;
      have = true;
    }
  }
  if (have) return best;
  throw Error(ErrorCode::ChartFailure, "no good exit direction from the boundary point");
}

void write_chart_csv(std::ostream& out, const std::vector<ChartCandidate>& rows) {
  out << "p1,p2,kind,det,ok\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%d\n", r.p[0], r.p[1], chart_kind_name(r.kind), r.det,
                  r.jacobian_ok ? 1 : 0);
    out << buf;
  }
}

}  // namespace geoscatter
