#include "geoscatter/catalog.hpp"

#include <cmath>
#include <cstdio>

namespace geoscatter::catalog {

namespace {

DomainSpec disk_domain(double radius, double box) {
  return DomainSpec(std::make_shared<CircleLevelSet>(radius, vec2(0.0, 0.0)), vec2(-box, -box), vec2(box, box),
                    vec2(0.0, 0.0));
}

// amplitude * exp(-|x - c|^2 / width^2)
Jet gaussian(const Vec& x, double amplitude, const Vec& c, double width) {
  const Vec d = x - c;
  const double g = amplitude * std::exp(-d.squaredNorm() / (width * width));
  return {g, (-2.0 * g / (width * width)) * d};
}

}  // namespace

MetricPtr sphere_metric() {
  return std::make_shared<ConformalMetric>(2, "sphere", [](const Vec& x) {
    const double q = 1.0 + x.squaredNorm();
    return Jet{std::log(2.0) - std::log(q), (-2.0 / q) * x};
  });
}

MetricPtr bump_metric(double amplitude) {
  // Compactly supported: amplitude * exp(1 - 1 / (1 - |x - c|^2 / rho^2)),
  // c = (0.2, 0.1), rho = 0.6, so g is exactly flat near the unit circle.
  char id[64];
  std::snprintf(id, sizeof id, "bump%g", amplitude);
  return std::make_shared<ConformalMetric>(2, id, [amplitude](const Vec& x) {
    const double rho2 = 0.36;
    const Vec d = x - vec2(0.2, 0.1);
    const double u = d.squaredNorm() / rho2;
    if (u >= 1.0) return Jet{0.0, Vec::Zero(2)};
    const double w = 1.0 / (1.0 - u);
    const double f = amplitude * std::exp(1.0 - w);
    return Jet{f, (-f * w * w * 2.0 / rho2) * d};
  });
}

Manifold flat_disk(double radius) {
  return Manifold::make(std::make_shared<FlatMetric>(2), disk_domain(radius, 1.5 * radius));
}

Manifold conformal_disk() {
  auto metric = std::make_shared<ConformalMetric>(2, "conformal", [](const Vec& x) {
    return Jet{0.3 + 0.1 * x[0], vec2(0.1, 0.0)};
  });
  return Manifold::make(metric, disk_domain(1.0, 1.5));
}

Manifold sphere_cap(double radius) { return Manifold::make(sphere_metric(), disk_domain(radius, 3.0)); }

Manifold bump_disk(double amplitude) { return Manifold::make(bump_metric(amplitude), disk_domain(1.0, 1.5)); }

Manifold focus_disk() {
  auto metric = std::make_shared<ConformalMetric>(
      2, "focus", [](const Vec& x) { return gaussian(x, 1.0, vec2(0.0, 0.0), 0.5); });
  return Manifold::make(metric, disk_domain(1.0, 1.5));
}

Manifold peanut() {
  // (x^2 + y^2)^2 - 2 c^2 (x^2 - y^2) - (a^4 - c^4), c = 1, a = 1.1
  class Cassini final : public LevelSet {
   public:
    int dim() const override { return 2; }
    Jet eval(const Vec& x) const override {
      const double c2 = 1.0, a4 = std::pow(1.1, 4);
      const double r2 = x.squaredNorm();
      const double v = r2 * r2 - 2.0 * c2 * (x[0] * x[0] - x[1] * x[1]) - (a4 - c2 * c2);
      const Vec d = vec2(4.0 * r2 * x[0] - 4.0 * c2 * x[0], 4.0 * r2 * x[1] + 4.0 * c2 * x[1]);
      return {v, d};
    }
    std::string describe() const override { return "cassini(1,1.1)"; }
  };
  return Manifold::make(std::make_shared<FlatMetric>(2),
                        DomainSpec(std::make_shared<Cassini>(), vec2(-2.5, -2.5), vec2(2.5, 2.5), vec2(0.0, 0.0)));
}

std::vector<std::pair<std::string, Manifold>> bundled() {
  return {{"flat", flat_disk()},
          {"conformal", conformal_disk()},
          {"sphere", sphere_cap()},
          {"bump", bump_disk()},
          {"focus", focus_disk()}};
}

}  // namespace geoscatter::catalog
