#pragma once

#include <memory>
#include <string>
#include <vector>

#include "geoscatter/jet.hpp"
#include "geoscatter/metric.hpp"

namespace geoscatter {

// b with M = {b < 0}, boundary {b = 0}.
class LevelSet {
 public:
  virtual ~LevelSet() = default;
  virtual int dim() const = 0;
  virtual Jet eval(const Vec& x) const = 0;
  virtual std::string describe() const = 0;
};

class CircleLevelSet final : public LevelSet {
 public:
  CircleLevelSet(double radius, Vec center) : radius_(radius), center_(std::move(center)) {}
  int dim() const override { return static_cast<int>(center_.size()); }
  Jet eval(const Vec& x) const override;
  std::string describe() const override;
  double radius() const { return radius_; }

 private:
  double radius_;
  Vec center_;
};

class ExpressionLevelSet final : public LevelSet {
 public:
  explicit ExpressionLevelSet(Expression e) : expr_(std::move(e)) {}
  int dim() const override { return expr_.dim(); }
  Jet eval(const Vec& x) const override { return expr_.eval_jet(x); }
  std::string describe() const override { return expr_.text(); }

 private:
  Expression expr_;
};

class DomainSpec {
 public:
  // star_center: interior point from which the boundary is star-shaped;
  // used to parametrize the boundary by polar angle.
  DomainSpec(std::shared_ptr<const LevelSet> level, Vec lo, Vec hi, Vec star_center);

  int dim() const { return level_->dim(); }
  double b(const Vec& x) const { return level_->eval(x).v; }
  Jet level(const Vec& x) const { return level_->eval(x); }
  Vec grad_b(const Vec& x) const { return level_->eval(x).d; }
  bool in_bbox(const Vec& x) const;
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const Vec& star_center() const { return center_; }
  const LevelSet& level_set() const { return *level_; }

  // Checks closure(M) inside the box interior and |grad b| > 0 near the
  // boundary on a sampled grid. Throws Error(Domain).
  void validate(double band = 1e-2, int samples = 64) const;

 private:
  std::shared_ptr<const LevelSet> level_;
  Vec lo_, hi_, center_;
};

struct BoundaryFrame {
  double s = 0.0;
  Vec x;
  Vec tangent;         // g-unit, counterclockwise
  Vec normal;          // g-unit outward
  Vec euclid_tangent;  // Euclidean unit, counterclockwise
};

// Arclength parametrization of a planar boundary in the induced metric,
// anchored at the point of maximal first coordinate, counterclockwise.
class BoundaryChart {
 public:
  BoundaryChart(const DomainSpec& domain, MetricPtr metric, int panels = 256);

  double length() const { return length_; }
  Vec point(double s) const;
  BoundaryFrame frame(double s) const;
  // Boundary parameter of the boundary point on the ray from the star
  // center through x.
  double param_of(const Vec& x) const;
  // g(e, e) for the Euclidean unit tangent e at s.
  double euclid_tangent_sqnorm(double s) const;
  // Outward g-unit normal from the level set at an arbitrary point.
  Vec normal_field(const Vec& x) const;

  const DomainSpec& domain() const { return domain_; }
  const MetricField& metric() const { return *metric_; }

 private:
  double radius(double theta, double guess) const;
  double radius(double theta) const;
  Vec polar_point(double theta, double r) const;
  Vec polar_tangent(double theta, double r) const;  // d x / d theta
  double speed(double theta) const;
  double speed_at(double theta, double r) const;
  double arc_from_anchor(double theta) const;        // unwrapped, theta in [anchor, anchor + 2pi]
  double theta_of(double s) const;
  double table_radius(double theta) const;

  DomainSpec domain_;
  MetricPtr metric_;
  int panels_;
  double anchor_ = 0.0;
  double length_ = 0.0;
  double r_max_ = 0.0;
  std::vector<double> edge_arc_;     // cumulative arclength at panel edges
  std::vector<double> edge_radius_;  // radius at panel edges
};

// Matrix of X -> nabla_X nu in the g-orthonormal tangent frame.
Mat shape_operator(const BoundaryChart& chart, double s);

struct ConvexityReport {
  bool strictly_convex = false;
  double min_eigenvalue = 0.0;
  double argmin_s = 0.0;
};

// Requires grid >= 16 (Error(Precondition)).
ConvexityReport is_strictly_convex(const BoundaryChart& chart, int grid, double eps_convex = 1e-8);

enum class TangentFrame { Orthonormal, Euclidean };
Mat boundary_metric(const BoundaryChart& chart, double s, TangentFrame frame = TangentFrame::Orthonormal);

}  // namespace geoscatter
