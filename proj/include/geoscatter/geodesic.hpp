#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "geoscatter/manifold.hpp"
#include "geoscatter/ode.hpp"

namespace geoscatter {

inline constexpr double kEpsEvent = 1e-11;
inline constexpr double kEpsTangent = 1e-7;

struct GeodesicState {
  Vec x;
  Vec v;
};

struct ExitRecord {
  double t_exit = 0.0;
  Vec x_exit;
  Vec v_exit;
  double s_exit = 0.0;  // boundary parameter, n = 2 only
  bool tangential = false;
};

// Linearized initial data (dx0, dv0) carried along with the geodesic.
struct Variation {
  Vec dx;
  Vec dv;
};

struct FlowOptions {
  double t_end = 0.0;  // 0: manifold default t_max
  bool stop_at_boundary = true;
  // With stop_at_boundary, reaching t_end without an exit raises
  // Error(PossibleTrapping) unless this is false.
  bool horizon_is_trapping = true;
  bool keep_dense = false;
  OdeOptions ode;
};

// Solved geodesic. State layout: x, v, then (dx, dv) per variation.
struct GeodesicRecord {
  int n = 2;
  int fields = 0;
  GeodesicState start;
  bool exited = false;
  ExitRecord exit;      // valid if exited
  double t_final = 0.0; // exit time or horizon
  State y_final;
  std::vector<DenseStep> dense;

  bool has_dense() const { return !dense.empty(); }
  // Requires dense output; t is clamped to [0, t_final].
  State state_at(double t) const;
  GeodesicState at(double t) const;
  Vec field_x(const State& y, int i) const { return y.segment(2 * n + 2 * n * i, n); }
  Vec field_v(const State& y, int i) const { return y.segment(2 * n + 2 * n * i + n, n); }
};

// Core solver: geodesic plus optional linearized fields, with boundary
// exit detection. Errors: Precondition (start outside closure(M)),
// PossibleTrapping, Stiffness.
GeodesicRecord solve_geodesic(const Manifold& m, const GeodesicState& start, const FlowOptions& opt,
                              const std::vector<Variation>& variations = {});

// Unit-speed solve to the first exit; t_max = 0 uses the manifold default.
GeodesicRecord integrate_geodesic(const Manifold& m, const GeodesicState& start, double t_max = 0.0,
                                  bool keep_dense = false);

double exit_time(const Manifold& m, const Vec& p, const Vec& xi);

// Throws Error(OutOfDomain) if the geodesic exits before |w|_g.
Vec exponential_map(const Manifold& m, const Vec& q, const Vec& w);

// Right-hand side of the geodesic ODE with linearized fields appended.
State geodesic_rhs(const MetricField& metric, const State& y, int n, int fields);

// A vector based at a boundary point, in chart components.
struct BoundaryVector {
  double s = 0.0;
  Vec x;
  Vec v;
};

struct LensEntry {
  BoundaryVector entry;
  BoundaryVector exit;
  double time = 0.0;
};

// Entry must point inward or be tangential (Error(Precondition) otherwise).
LensEntry scattering_relation(const Manifold& m, const BoundaryVector& entry);

// Angle from the inward normal, signed toward the tangent frame.
double inward_angle(const BoundaryChart& chart, const BoundaryVector& b);
// Angle from the outward normal, signed toward the tangent frame.
double outward_angle(const BoundaryChart& chart, const BoundaryVector& b);
BoundaryVector boundary_vector_from_angle(const BoundaryChart& chart, double s, double angle_from_inward);

void write_lens_csv(std::ostream& out, const BoundaryChart& chart, const std::vector<LensEntry>& rows);

// Local minima of the Euclidean distance from the trace to q for t >= t_min,
// including the endpoint when the distance is still decreasing there.
struct Approach {
  double t = 0.0;
  Vec x;
  Vec v;
  double signed_distance = 0.0;  // n = 2: cross(v, q - x) / |v|
};
std::vector<Approach> closest_approaches(const GeodesicRecord& rec, const Vec& q, double t_min = 0.0);

struct GeodesicCount {
  int count = 0;
  bool uncertain = false;
  std::vector<double> angles;   // initial direction angles (Euclidean) of the clusters
  std::vector<double> lengths;  // arclength at which q is reached
};

// All geodesics from p through q found by a direction scan (n = 2).
GeodesicCount connecting_geodesics(const Manifold& m, const Vec& p, const Vec& q, int grid = 720);
// Those of them with length within tol of ell.
GeodesicCount count_connecting_geodesics(const Manifold& m, const Vec& p, const Vec& q, double ell, double tol,
                                         int grid = 720);

// g-unit vector at x with Euclidean angle theta in the g-orthonormal frame
// obtained from the symmetric inverse square root of g.
Vec unit_direction(const MetricField& metric, const Vec& x, double theta);

// Direction grid used for point sources. Interior points use
// unit_direction; boundary points use angles measured from the g-unit
// tangent toward the outward normal, so both tangential directions are
// grid points when grid is even.
std::vector<Vec> source_directions(const Manifold& m, const Vec& p, int grid);

}  // namespace geoscatter
