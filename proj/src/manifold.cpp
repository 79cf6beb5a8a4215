#include "geoscatter/manifold.hpp"

#include "geoscatter/error.hpp"

namespace geoscatter {

Manifold Manifold::make(MetricPtr metric, const DomainSpec& domain) {
  if (metric->dim() != domain.dim()) throw Error(ErrorCode::Usage, "metric and domain dimensions differ");
  Manifold m;
  m.metric = std::move(metric);
  m.domain = std::make_shared<const DomainSpec>(domain);
  if (m.dim() == 2) {
    m.chart = std::make_shared<const BoundaryChart>(domain, m.metric);
    m.diameter = 0.5 * m.chart->length();
  } else {
    // Without a boundary chart fall back to the g-length of the box diagonal.
    const Vec mid = 0.5 * (domain.lo() + domain.hi());
    m.diameter = norm_g(m.metric->eval(mid), domain.hi() - domain.lo());
  }
  return m;
}

const BoundaryChart& Manifold::boundary() const {
  if (!chart) throw Error(ErrorCode::Usage, "boundary chart is only available for n = 2");
  return *chart;
}

bool Manifold::on_boundary(const Vec& x, double tol) const {
  const Jet b = domain->level(x);
  return std::abs(b.v) <= tol * std::max(1.0, b.d.norm());
}

}  // namespace geoscatter
