#include "geoscatter/domain.hpp"

#include <algorithm>
#include <sstream>

#include "geoscatter/error.hpp"

namespace geoscatter {

namespace {

// 10-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 10> kGlNodes = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
    -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
    0.8650633666889845,  0.9739065285171717};
constexpr std::array<double, 10> kGlWeights = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
    0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
    0.1494513491505806, 0.0666713443086881};

}  // namespace

Jet CircleLevelSet::eval(const Vec& x) const {
  const Vec d = x - center_;
  return {d.squaredNorm() - radius_ * radius_, 2.0 * d};
}

std::string CircleLevelSet::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "circle(" << radius_;
  for (int i = 0; i < center_.size(); ++i) os << "," << center_[i];
  os << ")";
  return os.str();
}

DomainSpec::DomainSpec(std::shared_ptr<const LevelSet> level, Vec lo, Vec hi, Vec star_center)
    : level_(std::move(level)), lo_(std::move(lo)), hi_(std::move(hi)), center_(std::move(star_center)) {
  const int n = level_->dim();
  if (lo_.size() != n || hi_.size() != n || center_.size() != n)
    throw Error(ErrorCode::Domain, "bounding box / center dimension mismatch");
  if ((hi_ - lo_).minCoeff() <= 0.0) throw Error(ErrorCode::Domain, "empty bounding box");
  if (b(center_) >= 0.0) throw Error(ErrorCode::Domain, "star center is not inside the domain");
}

bool DomainSpec::in_bbox(const Vec& x) const {
  for (int i = 0; i < x.size(); ++i)
    if (x[i] <= lo_[i] || x[i] >= hi_[i]) return false;
  return true;
}

void DomainSpec::validate(double band, int samples) const {
  if (dim() != 2) return;
  const double margin = 1e-9;
  for (int i = 0; i <= samples; ++i)
    for (int j = 0; j <= samples; ++j) {
      Vec x = vec2(lo_[0] + (hi_[0] - lo_[0]) * i / samples, lo_[1] + (hi_[1] - lo_[1]) * j / samples);
      const Jet v = level(x);
      const bool on_box_edge = i == 0 || j == 0 || i == samples || j == samples;
      if (on_box_edge && v.v <= margin)
        throw Error(ErrorCode::Domain, "closure of M touches the bounding box");
      if (std::abs(v.v) < band && v.d.norm() <= 0.0)
        throw Error(ErrorCode::Domain, "level-set gradient vanishes near the boundary");
    }
}

BoundaryChart::BoundaryChart(const DomainSpec& domain, MetricPtr metric, int panels)
    : domain_(domain), metric_(std::move(metric)), panels_(panels) {
  if (domain_.dim() != 2) throw Error(ErrorCode::Usage, "boundary chart is implemented for n = 2");
  r_max_ = std::max((domain_.hi() - domain_.star_center()).norm(), (domain_.lo() - domain_.star_center()).norm());
  r_max_ = std::max(r_max_, (vec2(domain_.lo()[0], domain_.hi()[1]) - domain_.star_center()).norm());
  r_max_ = std::max(r_max_, (vec2(domain_.hi()[0], domain_.lo()[1]) - domain_.star_center()).norm());

  // Anchor: maximal first coordinate, located as a root of d x1 / d theta.
  const int scan = 2048;
  int best = 0;
  double best_x1 = -1e300;
  for (int i = 0; i < scan; ++i) {
    const double th = 2.0 * kPi * i / scan;
    const double x1 = polar_point(th, radius(th))[0];
    if (x1 > best_x1) {
      best_x1 = x1;
      best = i;
    }
  }
  const double step = 2.0 * kPi / scan;
  auto slope = [&](double th) { return polar_tangent(th, radius(th))[0]; };
  double a = step * (best - 1), b = step * (best + 1);
  double fa = slope(a);
  for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = slope(m);
    if (fm == 0.0) {
      a = b = m;
      break;
    }
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  anchor_ = 0.5 * (a + b);

  const double h = 2.0 * kPi / panels_;
  edge_arc_.assign(static_cast<std::size_t>(panels_) + 1, 0.0);
  edge_radius_.assign(static_cast<std::size_t>(panels_) + 1, 0.0);
  edge_radius_[0] = radius(anchor_);
  for (int k = 0; k < panels_; ++k) {
    const double t0 = anchor_ + h * k;
    double acc = 0.0;
    for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
      const double th = t0 + 0.5 * h * (kGlNodes[q] + 1.0);
      acc += kGlWeights[q] * speed_at(th, radius(th, edge_radius_[static_cast<std::size_t>(k)]));
    }
    edge_arc_[static_cast<std::size_t>(k) + 1] = edge_arc_[static_cast<std::size_t>(k)] + 0.5 * h * acc;
    edge_radius_[static_cast<std::size_t>(k) + 1] = radius(t0 + h, edge_radius_[static_cast<std::size_t>(k)]);
  }
  length_ = edge_arc_.back();
}

Vec BoundaryChart::polar_point(double theta, double r) const {
  return domain_.star_center() + r * vec2(std::cos(theta), std::sin(theta));
}

Vec BoundaryChart::polar_tangent(double theta, double r) const {
  const Vec u = vec2(std::cos(theta), std::sin(theta));
  const Vec up = vec2(-std::sin(theta), std::cos(theta));
  const Vec grad = domain_.grad_b(polar_point(theta, r));
  const double dr = -r * grad.dot(up) / grad.dot(u);
  return dr * u + r * up;
}

double BoundaryChart::radius(double theta, double guess) const {
  const Vec u = vec2(std::cos(theta), std::sin(theta));
  double r = guess;
  for (int it = 0; it < 30; ++it) {
    const Jet v = domain_.level(domain_.star_center() + r * u);
    const double slope = v.d.dot(u);
    if (!(slope > 0.0)) break;
    const double dr = v.v / slope;
    r -= dr;
    if (!(r > 0.0) || r > r_max_) break;
    if (std::abs(dr) <= 1e-15 * (1.0 + r)) return r;
  }
  return radius(theta);
}

double BoundaryChart::radius(double theta) const {
  const Vec u = vec2(std::cos(theta), std::sin(theta));
  auto f = [&](double r) { return domain_.b(domain_.star_center() + r * u); };
  const int scan = 256;
  double lo = 0.0, hi = -1.0;
  for (int i = 1; i <= scan; ++i) {
    const double r = r_max_ * i / scan;
    if (f(r) >= 0.0) {
      lo = r_max_ * (i - 1) / scan;
      hi = r;
      break;
    }
  }
  if (hi < 0.0) throw Error(ErrorCode::Domain, "boundary not found along a ray from the star center");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double m = 0.5 * (lo + hi);
    (f(m) < 0.0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

double BoundaryChart::table_radius(double theta) const {
  const double h = 2.0 * kPi / panels_;
  const double t = wrap_periodic(theta - anchor_, 2.0 * kPi);
  const auto k = std::min(static_cast<std::size_t>(t / h), static_cast<std::size_t>(panels_) - 1);
  const double w = t / h - static_cast<double>(k);
  return radius(theta, (1.0 - w) * edge_radius_[k] + w * edge_radius_[k + 1]);
}

double BoundaryChart::speed_at(double theta, double r) const {
  return norm_g(metric_->eval(polar_point(theta, r)), polar_tangent(theta, r));
}

double BoundaryChart::speed(double theta) const { return speed_at(theta, table_radius(theta)); }

double BoundaryChart::arc_from_anchor(double theta) const {
  const double h = 2.0 * kPi / panels_;
  const double t = std::clamp(theta - anchor_, 0.0, 2.0 * kPi);
  const auto k = std::min(static_cast<std::size_t>(t / h), static_cast<std::size_t>(panels_) - 1);
  const double t0 = anchor_ + h * static_cast<double>(k);
  const double width = theta - t0;
  double acc = 0.0;
  if (width != 0.0) {
    for (std::size_t q = 0; q < kGlNodes.size(); ++q)
      acc += kGlWeights[q] * speed(t0 + 0.5 * width * (kGlNodes[q] + 1.0));
  }
  return edge_arc_[k] + 0.5 * width * acc;
}

double BoundaryChart::theta_of(double s) const {
  s = wrap_periodic(s, length_);
  const auto it = std::upper_bound(edge_arc_.begin(), edge_arc_.end(), s);
  const auto k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - edge_arc_.begin() - 1, 0, panels_ - 1));
  const double h = 2.0 * kPi / panels_;
  const double w = (s - edge_arc_[k]) / (edge_arc_[k + 1] - edge_arc_[k]);
  double th = anchor_ + h * (static_cast<double>(k) + w);
  for (int iter = 0; iter < 20; ++iter) {
    const double d = (arc_from_anchor(th) - s) / speed(th);
    th -= d;
    if (std::abs(d) < 1e-16) break;
  }
  return th;
}

Vec BoundaryChart::point(double s) const {
  const double th = theta_of(s);
  return polar_point(th, table_radius(th));
}

double BoundaryChart::param_of(const Vec& x) const {
  const Vec d = x - domain_.star_center();
  double th = std::atan2(d[1], d[0]);
  th = anchor_ + wrap_periodic(th - anchor_, 2.0 * kPi);
  return wrap_periodic(arc_from_anchor(th), length_);
}

Vec BoundaryChart::normal_field(const Vec& x) const {
  const Vec grad = domain_.grad_b(x);
  const Mat g = metric_->eval(x);
  const Vec raised = g.llt().solve(grad);
  return raised / std::sqrt(grad.dot(raised));
}

BoundaryFrame BoundaryChart::frame(double s) const {
  const double th = theta_of(s);
  const double r = table_radius(th);
  BoundaryFrame f;
  f.s = wrap_periodic(s, length_);
  f.x = polar_point(th, r);
  const Vec t = polar_tangent(th, r);
  f.tangent = t / norm_g(metric_->eval(f.x), t);
  f.euclid_tangent = t.normalized();
  f.normal = normal_field(f.x);
  return f;
}

double BoundaryChart::euclid_tangent_sqnorm(double s) const {
  const BoundaryFrame f = frame(s);
  return inner(metric_->eval(f.x), f.euclid_tangent, f.euclid_tangent);
}

Mat shape_operator(const BoundaryChart& chart, double s) {
  const BoundaryFrame f = chart.frame(s);
  const double h = 1e-6 * (1.0 + f.x.norm());
  const Vec dnu = (chart.normal_field(f.x + h * f.tangent) - chart.normal_field(f.x - h * f.tangent)) / (2.0 * h);
  const Christoffel gamma = christoffel(chart.metric(), f.x);
  const Vec cov = dnu - gamma.contract(f.tangent, f.normal);
  Mat out(1, 1);
  out(0, 0) = inner(chart.metric().eval(f.x), cov, f.tangent);
  return out;
}

ConvexityReport is_strictly_convex(const BoundaryChart& chart, int grid, double eps_convex) {
  if (grid < 16) throw Error(ErrorCode::Precondition, "convexity grid must have at least 16 samples");
  ConvexityReport rep;
  rep.min_eigenvalue = 1e300;
  for (int i = 0; i < grid; ++i) {
    const double s = chart.length() * i / grid;
    Eigen::SelfAdjointEigenSolver<Mat> es(shape_operator(chart, s));
    const double lo = es.eigenvalues().minCoeff();
    if (lo < rep.min_eigenvalue) {
      rep.min_eigenvalue = lo;
      rep.argmin_s = s;
    }
  }
  rep.strictly_convex = rep.min_eigenvalue > eps_convex;
  return rep;
}

Mat boundary_metric(const BoundaryChart& chart, double s, TangentFrame frame) {
  const BoundaryFrame f = chart.frame(s);
  const Vec& e = frame == TangentFrame::Orthonormal ? f.tangent : f.euclid_tangent;
  Mat out(1, 1);
  out(0, 0) = inner(chart.metric().eval(f.x), e, e);
  return out;
}

}  // namespace geoscatter
