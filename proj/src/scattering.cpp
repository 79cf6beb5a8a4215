#include "geoscatter/scattering.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "geoscatter/error.hpp"
#include "geoscatter/parallel.hpp"

namespace geoscatter {

BoundaryInfo::BoundaryInfo(double length, std::vector<double> s, std::vector<double> g11)
    : length_(length), s_(std::move(s)), g_(std::move(g11)) {
  if (s_.size() != g_.size() || s_.size() < 6) throw Error(ErrorCode::CorruptData, "need at least 6 gbdry samples");
}

BoundaryInfo BoundaryInfo::from_chart(const BoundaryChart& chart, int samples) {
  std::vector<double> s(samples), g(samples);
  for (int k = 0; k < samples; ++k) {
    s[k] = chart.length() * k / samples;
    g[k] = chart.euclid_tangent_sqnorm(s[k]);
  }
  return BoundaryInfo(chart.length(), std::move(s), std::move(g));
}

double BoundaryInfo::gbdry(double s) const {
  const int K = static_cast<int>(g_.size());
  const double h = length_ / K;
  const double u = wrap_periodic(s, length_) / h;
  const int i0 = static_cast<int>(std::floor(u));
  const double f = u - i0;
  double sum = 0.0;
  for (int a = -2; a <= 3; ++a) {
    double w = 1.0;
    for (int b = -2; b <= 3; ++b)
      if (b != a) w *= (f - b) / static_cast<double>(a - b);
    sum += w * g_[((i0 + a) % K + K) % K];
  }
  return sum;
}

bool Dataset::complete() const {
  for (const auto& set : sets)
    for (const auto& b : set.samples)
      if (!b.complete) return false;
  return true;
}

const ScatteringSet* Dataset::find(const std::string& id) const {
  for (const auto& set : sets)
    if (set.source_id == id) return &set;
  return nullptr;
}

BoundarySample sample_from_exit(const BoundaryChart& chart, double s, const Vec& v, bool complete) {
  const BoundaryFrame f = chart.frame(s);
  const Mat g = chart.metric().eval(f.x);
  const Vec u = v / norm_g(g, v);
  BoundarySample b;
  b.s = f.s;
  b.eta_t = Vec::Constant(1, inner(g, u, f.euclid_tangent) / inner(g, f.euclid_tangent, f.euclid_tangent));
  b.eta_nu = complete ? std::max(0.0, inner(g, u, f.normal)) : 0.0;
  b.complete = complete;
  return b;
}

Vec sample_vector(const BoundaryChart& chart, const BoundarySample& b) {
  const BoundaryFrame f = chart.frame(b.s);
  return b.eta_t[0] * f.euclid_tangent + b.eta_nu * f.normal;
}

void normalize_samples(std::vector<BoundarySample>& samples, double length) {
  for (auto& b : samples) b.s = wrap_periodic(b.s, length);
  std::sort(samples.begin(), samples.end(), [](const BoundarySample& a, const BoundarySample& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.eta_t[0] != b.eta_t[0]) return a.eta_t[0] < b.eta_t[0];
    return a.eta_nu < b.eta_nu;
  });
  std::vector<BoundarySample> out;
  out.reserve(samples.size());
  for (const auto& b : samples) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend() && b.s - it->s <= 1e-9; ++it)
      if ((it->eta_t - b.eta_t).norm() <= 1e-9 && std::abs(it->eta_nu - b.eta_nu) <= 1e-9) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(b);
  }
  // Wrap-around duplicates between the last and first samples.
  while (out.size() > 1) {
    const auto& a = out.front();
    const auto& z = out.back();
    if (a.s + length - z.s <= 1e-9 && (a.eta_t - z.eta_t).norm() <= 1e-9 && std::abs(a.eta_nu - z.eta_nu) <= 1e-9)
      out.pop_back();
    else
      break;
  }
  samples = std::move(out);
}

ScatteringSet scattering_set(const Manifold& m, const Vec& p, int grid, bool complete, const std::string& id) {
  if (grid < 64) throw Error(ErrorCode::Precondition, "direction grid must be at least 64");
  const BoundaryChart& chart = m.boundary();
  ScatteringSet set;
  set.source_id = id;
  set.grid = grid;
  set.metric_id = m.metric->id();
  for (const Vec& xi : source_directions(m, p, grid)) {
    const GeodesicRecord rec = solve_geodesic(m, {p, xi}, FlowOptions{});
    set.samples.push_back(sample_from_exit(chart, rec.exit.s_exit, rec.exit.v_exit, complete));
  }
  normalize_samples(set.samples, chart.length());
  return set;
}

Dataset generate_dataset(const Manifold& m, const std::vector<Source>& sources, int grid, bool complete,
                         int workers) {
  Dataset d;
  d.metric_id = m.metric->id();
  d.dim = m.dim();
  d.grid = grid;
  d.boundary = BoundaryInfo::from_chart(m.boundary());
  d.sets.resize(sources.size());
  parallel_for(sources.size(), workers,
               [&](std::size_t i) { d.sets[i] = scattering_set(m, sources[i].x, grid, complete, sources[i].id); });
  return d;
}

std::vector<Source> label_sources(const std::vector<Vec>& points, std::uint64_t seed) {
  std::vector<std::size_t> perm(points.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  int width = 1;
  for (std::size_t n = points.size(); n >= 10; n /= 10) ++width;
  std::vector<Source> out(points.size());
  char buf[32];
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "src%0*zu", width, perm[i]);
    out[i] = {buf, points[i]};
  }
  // Listing order must not reveal the geometry.
  std::sort(out.begin(), out.end(), [](const Source& a, const Source& b) { return a.id < b.id; });
  return out;
}

Dataset lift_tangential(const Dataset& d) {
  Dataset out = d;
  for (auto& set : out.sets)
    for (auto& b : set.samples) {
      if (b.complete) continue;
      const double gn = b.eta_t.norm() * std::sqrt(d.boundary.gbdry(b.s));
      if (gn > 1.0 + 1e-9) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "tangential sample of %s at s = %.17g has norm %.17g > 1",
                      set.source_id.c_str(), b.s, gn);
        throw Error(ErrorCode::CorruptData, buf);
      }
      b.eta_nu = std::sqrt(std::max(0.0, 1.0 - gn * gn));
      b.complete = true;
    }
  return out;
}

NormEstimate recover_boundary_norm(const Dataset& d, double s, double c, double window) {
  NormEstimate est;
  const double L = d.boundary.length();
  for (const auto& set : d.sets)
    for (const auto& b : set.samples) {
      if (std::abs(periodic_diff(b.s, s, L)) > window) continue;
      const double t = b.eta_t[0];
      if (c != 0.0 && (t > 0.0) != (c > 0.0)) continue;
      ++est.used;
      est.sup_eta_t = std::max(est.sup_eta_t, std::abs(t));
    }
  if (est.used == 0 || est.sup_eta_t <= 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "no tangential samples near s = %.17g (supremum %.17g)", s, est.sup_eta_t);
    throw Error(ErrorCode::InsufficientData, buf);
  }
  est.norm = std::abs(c) / est.sup_eta_t;
  return est;
}

double recover_boundary_inner(const Dataset& d, double s, double a, double b, double window) {
  auto sq = [&](double c) {
    if (c == 0.0) return 0.0;
    const double n = recover_boundary_norm(d, s, c, window).norm;
    return n * n;
  };
  return 0.25 * (sq(a + b) - sq(a - b));
}

double phase_alpha(const BoundaryInfo& info, const BoundarySample& b) {
  const double tg = b.eta_t[0] * std::sqrt(info.gbdry(b.s));
  const double nu = b.complete ? b.eta_nu : std::sqrt(std::max(0.0, 1.0 - tg * tg));
  return std::atan2(tg, nu);
}

double phase_distance(const PhasePoint& a, const PhasePoint& b, double length) {
  const double ds = periodic_diff(a.s, b.s, length);
  const double da = a.alpha - b.alpha;
  return std::sqrt(ds * ds + da * da);
}

SigmaIndex::SigmaIndex(const Dataset& d) : d_(&d) {
  for (int i = 0; i < static_cast<int>(d.sets.size()); ++i)
    for (int j = 0; j < static_cast<int>(d.sets[i].samples.size()); ++j) {
      const auto& b = d.sets[i].samples[j];
      entries_.push_back({b.s, phase_alpha(d.boundary, b), i, j});
    }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.s < b.s; });
}

double SigmaIndex::default_eps() const { return 4.0 * (2.0 * kPi / std::max(1, d_->grid)); }

PhasePoint SigmaIndex::phase(int set, int sample) const {
  const auto& b = d_->sets[set].samples[sample];
  return {b.s, phase_alpha(d_->boundary, b)};
}

std::vector<SigmaIndex::Match> SigmaIndex::matches(const PhasePoint& q, double eps) const {
  const double L = d_->boundary.length();
  std::vector<Match> best;
  std::vector<int> slot(d_->sets.size(), -1);
  auto scan = [&](double lo, double hi) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), lo, [](const Entry& e, double v) { return e.s < v; });
    for (; it != entries_.end() && it->s <= hi; ++it) {
      const double dist = phase_distance(q, {it->s, it->alpha}, L);
      if (dist > eps) continue;
      int& k = slot[it->set];
      if (k < 0) {
        k = static_cast<int>(best.size());
        best.push_back({it->set, it->sample, dist});
      } else if (dist < best[k].distance) {
        best[k] = {it->set, it->sample, dist};
      }
    }
  };
  const double s = wrap_periodic(q.s, L);
  scan(s - eps, s + eps);
  if (s - eps < 0.0) scan(s - eps + L, L);
  if (s + eps >= L) scan(0.0, s + eps - L);
  std::sort(best.begin(), best.end(), [](const Match& a, const Match& b) { return a.set < b.set; });
  return best;
}

std::vector<int> SigmaIndex::query(const PhasePoint& q, double eps) const {
  std::vector<int> out;
  for (const Match& m : matches(q, eps)) out.push_back(m.set);
  return out;
}

namespace {

std::vector<int> sigma_indices(const SigmaIndex& index, const BoundarySample& b, double eps) {
  const Dataset& d = index.dataset();
  const double alpha = phase_alpha(d.boundary, b);
  if (std::abs(alpha) > 0.5 * kPi - 1e-9) return {};  // tangential
  return index.query({b.s, alpha}, eps > 0.0 ? eps : index.default_eps());
}

int set_index(const Dataset& d, const std::string& id) {
  for (int i = 0; i < static_cast<int>(d.sets.size()); ++i)
    if (d.sets[i].source_id == id) return i;
  throw Error(ErrorCode::IdNotFound, "unknown source id '" + id + "'");
}

}  // namespace

std::vector<std::string> sigma_set(const SigmaIndex& index, const BoundarySample& exit_sample, double eps) {
  std::vector<std::string> out;
  for (int i : sigma_indices(index, exit_sample, eps)) out.push_back(index.dataset().sets[i].source_id);
  return out;
}

bool separates(const SigmaIndex& index, const std::string& id_p, const std::string& id_q, double eps) {
  const Dataset& d = index.dataset();
  const int ip = set_index(d, id_p);
  const int iq = set_index(d, id_q);
  if (ip == iq) return false;
  // The backward geodesic of an exit sample covers the whole chord through
  // p, so one sample per chord suffices.
  for (const auto& b : d.sets[ip].samples) {
    const auto sigma = sigma_indices(index, b, eps);
    if (sigma.empty()) continue;
    if (!std::binary_search(sigma.begin(), sigma.end(), iq)) return true;
  }
  return false;
}

bool sigma_member(const SigmaIndex& index, const BoundarySample& sample, const std::string& id_q, double eps) {
  const Dataset& d = index.dataset();
  const int iq = set_index(d, id_q);
  const auto target = sigma_indices(index, sample, eps);
  if (target.empty()) return false;
  for (const auto& b : d.sets[iq].samples) {
    const auto sigma = sigma_indices(index, b, eps);
    if (sigma.empty()) continue;
    std::vector<int> common;
    std::set_intersection(target.begin(), target.end(), sigma.begin(), sigma.end(), std::back_inserter(common));
    const double uni = static_cast<double>(target.size() + sigma.size() - common.size());
    if (common.size() >= 0.9 * uni) return true;
  }
  return false;
}

}  // namespace geoscatter
