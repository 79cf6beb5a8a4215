#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoscatter/geodesic.hpp"

namespace geoscatter {

// Exit vector at boundary parameter s. eta_t holds components along the
// Euclidean unit tangent of the chart (counterclockwise), so the data can be
// read without knowing g; eta_nu = <eta, nu>_g is present for complete
// samples only.
struct BoundarySample {
  double s = 0.0;
  Vec eta_t;
  double eta_nu = 0.0;
  bool complete = true;
};

struct ScatteringSet {
  std::string source_id;
  std::vector<BoundarySample> samples;  // sorted by s
  int grid = 0;
  std::string metric_id;
};

// Boundary metadata: length and g(e, e) for the Euclidean unit tangent e,
// sampled uniformly in s.
class BoundaryInfo {
 public:
  BoundaryInfo() = default;
  BoundaryInfo(double length, std::vector<double> s, std::vector<double> g11);
  static BoundaryInfo from_chart(const BoundaryChart& chart, int samples = 1024);

  double length() const { return length_; }
  // Periodic 6-point Lagrange interpolation.
  double gbdry(double s) const;
  const std::vector<double>& s_samples() const { return s_; }
  const std::vector<double>& g_samples() const { return g_; }

 private:
  double length_ = 0.0;
  std::vector<double> s_, g_;
};

struct Dataset {
  std::string metric_id;
  int dim = 2;
  int grid = 0;
  BoundaryInfo boundary;
  std::vector<ScatteringSet> sets;

  bool complete() const;
  const ScatteringSet* find(const std::string& id) const;
};

struct Source {
  std::string id;
  Vec x;
};

BoundarySample sample_from_exit(const BoundaryChart& chart, double s, const Vec& v, bool complete = true);
// Chart components of a complete sample (g-unit).
Vec sample_vector(const BoundaryChart& chart, const BoundarySample& b);

// Sorts by s and removes samples closer than 1e-9 in (s, eta).
void normalize_samples(std::vector<BoundarySample>& samples, double length);

// Requires grid >= 64.
ScatteringSet scattering_set(const Manifold& m, const Vec& p, int grid, bool complete = true,
                             const std::string& id = "");

Dataset generate_dataset(const Manifold& m, const std::vector<Source>& sources, int grid, bool complete = true,
                         int workers = 1);

// Opaque, seed-dependent ids "src<k>" for the given coordinates.
std::vector<Source> label_sources(const std::vector<Vec>& points, std::uint64_t seed);

// Error(CorruptData) if some |eta_t|_g exceeds 1.
Dataset lift_tangential(const Dataset& d);

struct NormEstimate {
  double norm = 0.0;
  double sup_eta_t = 0.0;  // largest observed tangential coefficient
  int used = 0;
};

// |c e|_g for the Euclidean unit tangent e at s, from the supremum of the
// observed tangential coefficients within `window` of s.
// Error(InsufficientData) when no sample lies in the window.
NormEstimate recover_boundary_norm(const Dataset& d, double s, double c, double window = 0.02);
// <a e, b e>_g by the parallelogram rule.
double recover_boundary_inner(const Dataset& d, double s, double a, double b, double window = 0.02);

// Phase-space coordinates used by all set comparisons: boundary parameter
// and the g-angle of the exit vector from the outward normal.
struct PhasePoint {
  double s;
  double alpha;
};

double phase_alpha(const BoundaryInfo& info, const BoundarySample& b);
double phase_distance(const PhasePoint& a, const PhasePoint& b, double length);

// All samples of a dataset indexed by s for Sigma queries.
class SigmaIndex {
 public:
  explicit SigmaIndex(const Dataset& d);

  const Dataset& dataset() const { return *d_; }
  // Set indices whose scattering set has a sample within eps of q.
  std::vector<int> query(const PhasePoint& q, double eps) const;
  // Same, returning the best-matching sample per set.
  struct Match {
    int set;
    int sample;
    double distance;
  };
  std::vector<Match> matches(const PhasePoint& q, double eps) const;
  PhasePoint phase(int set, int sample) const;
  double default_eps() const;

 private:
  struct Entry {
    double s;
    double alpha;
    int set;
    int sample;
  };
  const Dataset* d_;
  std::vector<Entry> entries_;
};

// Source ids whose sets contain a sample within eps of the exit sample;
// eps <= 0 selects 4 * (2 pi / grid). Tangential samples give an empty set.
std::vector<std::string> sigma_set(const SigmaIndex& index, const BoundarySample& exit_sample, double eps = 0.0);

// Error(IdNotFound) for unknown ids.
bool separates(const SigmaIndex& index, const std::string& id_p, const std::string& id_q, double eps = 0.0);

// Whether the boundary sample (p, eta) belongs to R^E(q): Sigma(p, eta)
// coincides with Sigma(q, xi) for some sample xi of q.
bool sigma_member(const SigmaIndex& index, const BoundarySample& sample, const std::string& id_q, double eps = 0.0);

}  // namespace geoscatter
