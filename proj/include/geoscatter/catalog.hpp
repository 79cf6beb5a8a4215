#pragma once

#include <string>
#include <vector>

#include "geoscatter/manifold.hpp"

namespace geoscatter::catalog {

// Bundled test geometries. All are planar (n = 2) charts.

Manifold flat_disk(double radius = 1.0);
// e^{2 phi} delta with phi = 0.3 + 0.1 x1
Manifold conformal_disk();
// Constant curvature 1 (stereographic sphere chart), cap |x| < radius.
Manifold sphere_cap(double radius = 0.8);
// Compactly supported conformal bump of the given amplitude in phi on the
// unit disk; the metric is flat on a collar of the boundary.
Manifold bump_disk(double amplitude = 0.05);
// Strong Gaussian conformal lens (phi = exp(-|x|^2 / 0.25)) with conjugate
// points along some chords.
Manifold focus_disk();
// Non-convex Cassini oval.
Manifold peanut();

MetricPtr sphere_metric();
MetricPtr bump_metric(double amplitude);

// The metrics exercised by property suites ("bundled" metrics).
std::vector<std::pair<std::string, Manifold>> bundled();

}  // namespace geoscatter::catalog
