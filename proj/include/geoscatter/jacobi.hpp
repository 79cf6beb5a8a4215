#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "geoscatter/geodesic.hpp"

namespace geoscatter {

inline constexpr double kEpsConj = 1e-6;
inline constexpr double kEpsSelf = 1e-6;
inline constexpr double kInjFloor = 1e-3;

// Jacobi field along a stored geodesic, integrated jointly with the
// geodesic on the geodesic's own step grid.
class JacobiSolution {
 public:
  JacobiSolution(GeodesicRecord joint, MetricPtr metric) : joint_(std::move(joint)), metric_(std::move(metric)) {}

  double t_end() const { return joint_.t_final; }
  GeodesicState geodesic(double t) const { return joint_.at(t); }
  Vec J(double t) const;
  Vec DJ(double t) const;  // covariant derivative D_t J

 private:
  GeodesicRecord joint_;
  MetricPtr metric_;
};

// Requires record.has_dense() (Error(Usage) otherwise).
JacobiSolution jacobi_field(const Manifold& m, const GeodesicRecord& record, const Vec& J0, const Vec& DJ0);

// D exp_q at w: columns J_i(1) with J_i(0) = 0, D J_i(0) = e_i along
// t -> exp_q(t w). The geodesic is followed in the ambient chart.
Mat d_exp(const Manifold& m, const Vec& q, const Vec& w);

// Singular values (descending) of D: T_q -> T_x in g-orthonormal frames.
Vec g_singular_values(const MetricField& metric, const Vec& q, const Vec& x, const Mat& D);

enum class DirectionTag { SelfIntersecting, Good, Conjugate, Tangential };
const char* tag_name(DirectionTag tag);

struct DirectionClass {
  double angle = 0.0;  // grid angle (see source_directions)
  Vec xi;
  DirectionTag tag = DirectionTag::Good;
  ExitRecord exit;
  double smin_ratio = 1.0;
  double self_distance = 0.0;  // closest return to p along the full chord
};

// Requires grid >= 64.
std::vector<DirectionClass> classify_directions(const Manifold& m, const Vec& p, int grid, int workers = 1);

// Classifies a single direction xi at p (g-unit).
DirectionClass classify_direction(const Manifold& m, const Vec& p, const Vec& xi);

void write_classification_csv(std::ostream& out, const std::vector<DirectionClass>& rows);

struct VariationalResult {
  bool conjugate = false;
  double t_source = 0.0;     // parameter of p on the backward geodesic
  double exit_speed = 0.0;   // |d q / d s| along the shooting family
  double eta_nu = 0.0;
  double ratio = 1.0;        // singular-value ratio implied by the family
  double d_eta_t = 0.0;      // tangential derivative of the exit direction
};

// Data-side conjugacy test on the exit vector (x_exit, eta) of a geodesic
// from p. Error(Inconclusive) near grazing exits; Error(Precondition) if the
// backward geodesic misses p.
VariationalResult conjugate_variational_test(const Manifold& m, const Vec& p, const Vec& x_exit, const Vec& eta);

}  // namespace geoscatter
