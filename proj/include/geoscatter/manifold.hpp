#pragma once

#include <memory>

#include "geoscatter/domain.hpp"
#include "geoscatter/metric.hpp"

namespace geoscatter {

// Shared read-only handle to (metric, domain) plus the boundary chart built
// from them. Cheap to copy.
struct Manifold {
  MetricPtr metric;
  std::shared_ptr<const DomainSpec> domain;
  std::shared_ptr<const BoundaryChart> chart;
  double diameter = 0.0;  // estimate: half the boundary length

  static Manifold make(MetricPtr metric, const DomainSpec& domain);

  int dim() const { return metric->dim(); }
  double default_t_max() const { return 50.0 * diameter; }
  const BoundaryChart& boundary() const;
  bool on_boundary(const Vec& x, double tol = 1e-9) const;
};

}  // namespace geoscatter
