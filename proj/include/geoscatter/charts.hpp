#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geoscatter/jacobi.hpp"

namespace geoscatter {

// Charts are implemented for n = 2.

struct ThetaValue {
  double angle = 0.0;  // angle in the g-orthonormal frame at q (see unit_direction)
  Vec direction;       // g-unit vector at q
  double length = 0.0; // geodesic length from q to z
};

// Normalized inverse exponential map at q, computed by shooting in the
// ambient chart, so points slightly outside M are allowed.
class ThetaChart {
 public:
  ThetaChart(const Manifold& m, const Vec& q);

  const Vec& base() const { return q_; }
  // angle_guess: start of the shooting iteration (NaN: straight-line guess).
  // Error(ChartFailure) if no geodesic from q reaches z.
  ThetaValue eval(const Vec& z, double angle_guess = std::numeric_limits<double>::quiet_NaN()) const;
  Vec operator()(const Vec& z) const { return eval(z).direction; }
  // Central-difference Jacobian of z -> Theta_q(z) (columns d/dz_j).
  Mat derivative(const Vec& z, double h = 1e-5) const;
  // Error(NotInjective) if some region point is reached by more than one
  // geodesic from q inside M; Error(SingularChart) if D exp_q degenerates.
  void certify(const std::vector<Vec>& region, int grid = 360) const;

 private:
  Manifold m_;
  Vec q_;
  SpdRoots roots_;
};

ThetaChart theta_chart(const Manifold& m, const Vec& q, const std::vector<Vec>& region, int grid = 360);

enum class ChartKind { Interior, Boundary };
const char* chart_kind_name(ChartKind kind);

struct ChartCandidate {
  ChartKind kind = ChartKind::Interior;
  Vec p;
  // Interior: exit samples (q, eta) and (qt, eta_t), vector v at qt.
  // Boundary: exit sample (q, eta), vector v at q, inward field angle.
  Vec q, eta;
  Vec qt, eta_t;
  Vec v;
  double w_angle = 0.0;  // W = cos(a) (-nu) + sin(a) tangent
  double det = 0.0;
  bool jacobian_ok = false;
  Mat jacobian;
};

inline constexpr double kInteriorDetMin = 1e-2;
inline constexpr double kBoundaryDetMin = 0.05;

// Interior coordinates z -> (angle of Theta_q(z), <v, Theta_qt(z)>_g).
class InteriorChart {
 public:
  InteriorChart(const Manifold& m, const Vec& q, const Vec& qt, const Vec& v, const Vec& p);

  Vec coords(const Vec& z) const;
  // Shooting inverse: follows the geodesic from q with the given angle to
  // the point where the second coordinate matches.
  Vec inverse(const Vec& c) const;
  Mat jacobian(const Vec& z, double h = 1e-5) const;
  const ThetaChart& theta_q() const { return tq_; }
  const ThetaChart& theta_qt() const { return tqt_; }

 private:
  Manifold m_;
  ThetaChart tq_, tqt_;
  Vec v_;
  Vec p_;
  double angle_ref_ = 0.0, angle_ref_t_ = 0.0, length_ref_ = 0.0;
};

// Automatic choice of anchors. Error(ChartFailure) when no pair of good
// directions is found; the message reports how many directions were good.
ChartCandidate interior_chart(const Manifold& m, const Vec& p, std::uint64_t seed = 1, int grid = 64);
// Given anchors; v is used as is.
ChartCandidate interior_chart_with(const Manifold& m, const Vec& p, const Vec& q, const Vec& qt, const Vec& v);

// Boundary coordinates z -> (Qt(z), Pi_W(z)) with Pi_W as a boundary parameter.
class BoundaryCoordChart {
 public:
  BoundaryCoordChart(const Manifold& m, double w_angle, const Vec& q, const Vec& v, const Vec& p);

  Vec inward_field(double s) const;
  double project(const Vec& x) const;  // Pi_W
  double q_value(const Vec& x) const;  // <v, Theta_q(x)>_g
  double q_tilde(const Vec& x) const;
  Vec coords(const Vec& z) const;
  Mat jacobian(const Vec& z, double h = 1e-5) const;
  const ThetaChart& theta_q() const { return tq_; }

 private:
  Manifold m_;
  double w_angle_;
  ThetaChart tq_;
  Vec v_;
  Vec p_;
  double s_ref_ = 0.0;
  double sign_ = 1.0;
  double angle_ref_ = 0.0;
};

ChartCandidate boundary_chart(const Manifold& m, const Vec& p);

void write_chart_csv(std::ostream& out, const std::vector<ChartCandidate>& rows);

}  // namespace geoscatter
