#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "geoscatter/scattering.hpp"

namespace geoscatter {

// A scattering set in phase coordinates, sorted by s.
struct PhaseSet {
  std::string id;
  std::vector<PhasePoint> pts;
  double length = 0.0;
  int grid = 0;
};

PhaseSet phase_set(const ScatteringSet& set, const BoundaryInfo& info);

struct SetDistance {
  double value = 0.0;
  int witness_a = -1;  // index into a.pts
  int witness_b = -1;  // index into b.pts
  // True if the computation stopped once the value exceeded abort_above;
  // value is then only a lower bound.
  bool aborted = false;
};

// Directed sup-inf distance from a to b.
SetDistance directed_hausdorff(const PhaseSet& a, const PhaseSet& b,
                               double abort_above = std::numeric_limits<double>::infinity());
// Error(Usage) on mismatched boundary length or grid.
SetDistance hausdorff(const PhaseSet& a, const PhaseSet& b,
                      double abort_above = std::numeric_limits<double>::infinity());
SetDistance hausdorff(const ScatteringSet& a, const ScatteringSet& b, const BoundaryInfo& info);
// Smallest distance from p to the set.
double distance_to_set(const PhasePoint& p, const PhaseSet& set, double stop_below = 0.0);

struct LocalizeResult {
  int index = -1;
  std::string id;
  double distance = 0.0;
  std::string runner_up;
  double runner_up_distance = std::numeric_limits<double>::infinity();
};

class Localizer {
 public:
  explicit Localizer(const Dataset& d);
  // Error(AmbiguousLocalization) if the two best distances tie within 1e-12.
  LocalizeResult nearest(const PhaseSet& target) const;
  const std::vector<PhaseSet>& sets() const { return sets_; }

 private:
  std::vector<PhaseSet> sets_;
};

struct RefineResult {
  Vec x;
  double distance = 0.0;
  int evaluations = 0;
};

// Hausdorff distance between the closed polylines through the points of a
// and b (s order), taken over the sample points. Unlike the point-set
// distance it does not see the direction grid.
double polyline_hausdorff(const PhaseSet& a, const PhaseSet& b);

// Coordinate-wise golden-section descent on p -> d_H(R^E(p), target) with
// up to three restarts on rotated axes. `step` is the initial half-width of
// each line search. R^E(p) is compared as a polyline (polyline_hausdorff).
RefineResult refine_localization(const Manifold& m, const PhaseSet& target, const Vec& start, double step,
                                 double tol = 1e-6);

// Boundary correspondence s2 = phi(s1) with derivative.
struct BoundaryMap {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  static BoundaryMap identity();
  static BoundaryMap shift(double ds, double length);
};

struct CompareReport {
  double cost = 0.0;
  std::string worst_a;  // set of d1 (or d2) attaining the cost
  std::string worst_b;
  double norm_defect = 0.0;  // max | |eta_t|_g1 - |D phi eta_t|_g2 |
};

// Error(IncompatibleBoundary) if the boundary lengths differ by more than 1e-6.
CompareReport compare_datasets(const Dataset& d1, const Dataset& d2, const BoundaryMap& phi = BoundaryMap::identity());
// d1 pushed through phi into the boundary frame of d2.
Dataset push_forward(const Dataset& d1, const BoundaryInfo& target, const BoundaryMap& phi);

struct LensPair {
  int set = -1;
  int sample = -1;
  int partner_set = -1;
  int partner_sample = -1;
  bool tangential = false;
};

struct LensData {
  std::vector<LensPair> pairs;
  std::vector<std::pair<int, int>> orphans;  // (set, sample)
};

// Data-only pairing of exit samples that lie on a common chord. eps <= 0
// uses the index default.
LensData extract_lens_data(const SigmaIndex& index, double eps = 0.0, int workers = 1);

// Pairs checked against the forward scattering relation: the partner of a
// sample, reversed, must exit at the sample within the index tolerance.
struct LensCheck {
  std::vector<double> model_time;  // NaN for tangential pairs
  std::vector<char> agree;
  int non_tangential = 0;
  int disagree = 0;
  // Agreeing pairs over non-tangential pairs plus orphans.
  double success = 0.0;
};

LensCheck check_lens(const Manifold& m, const SigmaIndex& index, const LensData& lens, int workers = 1);

struct I0Report {
  std::vector<double> t;
  std::vector<double> values;
  double max_rel_variation = 0.0;
  // det g / det g~ on a grid of interior points.
  std::vector<Vec> grid_points;
  std::vector<double> f_values;
  double f_max_deviation = 0.0;  // max |f - 1|
};

// Requires a record with dense output.
I0Report i0_invariant(const MetricField& g, const MetricField& gt, const GeodesicRecord& geodesic,
                      const DomainSpec* domain = nullptr, int samples = 200);

}  // namespace geoscatter
