#include "geoscatter/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "geoscatter/error.hpp"
#include "geoscatter/golden.hpp"
#include "geoscatter/parallel.hpp"

namespace geoscatter {

PhaseSet phase_set(const ScatteringSet& set, const BoundaryInfo& info) {
  PhaseSet out;
  out.id = set.source_id;
  out.length = info.length();
  out.grid = set.grid;
  out.pts.reserve(set.samples.size());
  for (const auto& b : set.samples) out.pts.push_back({wrap_periodic(b.s, info.length()), phase_alpha(info, b)});
  std::stable_sort(out.pts.begin(), out.pts.end(), [](const PhasePoint& a, const PhasePoint& b) { return a.s < b.s; });
  return out;
}

namespace {

// Nearest point of `set` to p, searching outward in s from p's position.
// Stops as soon as a point within stop_below is found.
std::pair<double, int> nearest_in(const PhasePoint& p, const PhaseSet& set, double stop_below) {
  const auto& v = set.pts;
  const int n = static_cast<int>(v.size());
  const double L = set.length;
  double best = std::numeric_limits<double>::infinity();
  int arg = -1;
  if (n == 0) return {best, arg};
  const int start = static_cast<int>(
      std::lower_bound(v.begin(), v.end(), p.s, [](const PhasePoint& a, double s) { return a.s < s; }) - v.begin());
  bool right = true, left = true;
  for (int k = 0; k < n && (right || left); ++k) {
    if (right) {
      const PhasePoint& b = v[(start + k) % n];
      const double ds = wrap_periodic(b.s - p.s, L);
      if (ds >= best || ds > 0.5 * L) {
        right = false;
      } else {
        const double d = phase_distance(p, b, L);
        if (d < best) {
          best = d;
          arg = (start + k) % n;
          if (best <= stop_below) return {best, arg};
        }
      }
    }
    if (left) {
      const int j = ((start - 1 - k) % n + n) % n;
      const PhasePoint& b = v[j];
      const double ds = wrap_periodic(p.s - b.s, L);
      if (ds >= best || ds > 0.5 * L) {
        left = false;
      } else {
        const double d = phase_distance(p, b, L);
        if (d < best) {
          best = d;
          arg = j;
          if (best <= stop_below) return {best, arg};
        }
      }
    }
  }
  return {best, arg};
}

}  // namespace

double distance_to_set(const PhasePoint& p, const PhaseSet& set, double stop_below) {
  return nearest_in(p, set, stop_below).first;
}

SetDistance directed_hausdorff(const PhaseSet& a, const PhaseSet& b, double abort_above) {
  SetDistance out;
  out.value = 0.0;
  if (a.pts.empty()) return out;
  if (b.pts.empty()) {
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  for (int i = 0; i < static_cast<int>(a.pts.size()); ++i) {
    // Only whether this point raises the running maximum matters.
    const auto [d, j] = nearest_in(a.pts[i], b, out.value);
    if (d > out.value) {
      out.value = d;
      out.witness_a = i;
      out.witness_b = j;
      if (out.value > abort_above) {
        out.aborted = true;
        return out;
      }
    }
  }
  if (out.witness_a < 0) {
    out.witness_a = 0;
    out.witness_b = nearest_in(a.pts[0], b, 0.0).second;
  }
  return out;
}

SetDistance hausdorff(const PhaseSet& a, const PhaseSet& b, double abort_above) {
  if (std::abs(a.length - b.length) > 1e-9 * std::max(1.0, a.length) || a.grid != b.grid)
    throw Error(ErrorCode::Usage, "scattering sets have different boundary metadata");
  const SetDistance ab = directed_hausdorff(a, b, abort_above);
  if (ab.aborted) return ab;
  const SetDistance ba = directed_hausdorff(b, a, abort_above);
  if (ab.value >= ba.value) return ab;
  SetDistance out = ba;
  std::swap(out.witness_a, out.witness_b);
  return out;
}

SetDistance hausdorff(const ScatteringSet& a, const ScatteringSet& b, const BoundaryInfo& info) {
  if (a.grid != b.grid) throw Error(ErrorCode::Usage, "scattering sets have different direction grids");
  return hausdorff(phase_set(a, info), phase_set(b, info));
}

Localizer::Localizer(const Dataset& d) {
  sets_.reserve(d.sets.size());
  for (const auto& s : d.sets) sets_.push_back(phase_set(s, d.boundary));
}

LocalizeResult Localizer::nearest(const PhaseSet& target) const {
  if (sets_.empty()) throw Error(ErrorCode::InsufficientData, "empty dataset");
  LocalizeResult r;
  double best = std::numeric_limits<double>::infinity(), second = best;
  int ib = -1, is = -1;
  for (int i = 0; i < static_cast<int>(sets_.size()); ++i) {
    const SetDistance d = hausdorff(target, sets_[i], second);
    if (d.aborted) continue;
    if (d.value < best) {
      second = best;
      is = ib;
      best = d.value;
      ib = i;
    } else if (d.value < second) {
      second = d.value;
      is = i;
    }
  }
  if (is >= 0 && second - best <= 1e-12) {
    std::string ids;
    for (int i = 0; i < static_cast<int>(sets_.size()); ++i) {
      const SetDistance d = hausdorff(target, sets_[i], best + 1e-12);
      if (!d.aborted && d.value <= best + 1e-12) ids += (ids.empty() ? "" : ",") + sets_[i].id;
    }
    throw Error(ErrorCode::AmbiguousLocalization, "tied candidates: " + ids);
  }
  r.index = ib;
  r.id = sets_[ib].id;
  r.distance = best;
  if (is >= 0) {
    r.runner_up = sets_[is].id;
    r.runner_up_distance = second;
  }
  return r;
}

namespace {

double segment_distance(const PhasePoint& p, const PhasePoint& a, const PhasePoint& b, double L) {
  // Work in coordinates relative to p so that the periodic s is unwrapped.
  const double ax = periodic_diff(a.s, p.s, L), ay = a.alpha - p.alpha;
  const double bx = ax + periodic_diff(b.s, a.s, L), by = b.alpha - p.alpha;
  const double dx = bx - ax, dy = by - ay, dd = dx * dx + dy * dy;
  const double u = dd > 0.0 ? std::clamp(-(ax * dx + ay * dy) / dd, 0.0, 1.0) : 0.0;
  return std::hypot(ax + u * dx, ay + u * dy);
}

// Directed distance from the points of a to the closed polyline through the
// points of b (s order).
double directed_to_polyline(const PhaseSet& a, const PhaseSet& b) {
  const int n = static_cast<int>(b.pts.size());
  double worst = 0.0;
  for (const PhasePoint& p : a.pts) {
    const int k = nearest_in(p, b, 0.0).second;
    if (k < 0) return std::numeric_limits<double>::infinity();
    double d = phase_distance(p, b.pts[k], b.length);
    if (n > 1) {
      d = std::min(d, segment_distance(p, b.pts[(k + n - 1) % n], b.pts[k], b.length));
      d = std::min(d, segment_distance(p, b.pts[k], b.pts[(k + 1) % n], b.length));
    }
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

double polyline_hausdorff(const PhaseSet& a, const PhaseSet& b) {
  return std::max(directed_to_polyline(a, b), directed_to_polyline(b, a));
}

RefineResult refine_localization(const Manifold& m, const PhaseSet& target, const Vec& start, double step,
                                 double tol) {
  RefineResult res;
  auto f = [&](const Vec& x) {
    ++res.evaluations;
    const double b = m.domain->b(x);
    if (b > -1e-12) return 1e3 + b;
    ScatteringSet set = scattering_set(m, x, target.grid, true);
    PhaseSet ps;
    ps.length = target.length;
    ps.grid = target.grid;
    const BoundaryChart& chart = m.boundary();
    for (const auto& s : set.samples) {
      const double tg = s.eta_t[0] * std::sqrt(chart.euclid_tangent_sqnorm(s.s));
      ps.pts.push_back({s.s, std::atan2(tg, s.eta_nu)});
    }
    std::stable_sort(ps.pts.begin(), ps.pts.end(), [](const PhasePoint& a, const PhasePoint& b) { return a.s < b.s; });
    return polyline_hausdorff(ps, target);
  };

  Vec x = start;
  double fx = f(x);
  double last_move = step;
  for (int restart = 0; restart < 4 && fx > 1e-13; ++restart) {
    if (restart > 0 && fx < 1e-4) break;
    static const double kRot[] = {0.0, 0.25 * kPi, 0.125 * kPi, 0.375 * kPi};
    const double rot = kRot[restart];
    std::vector<Vec> axes;
    axes.push_back(vec2(std::cos(rot), std::sin(rot)));
    axes.push_back(vec2(-std::sin(rot), std::cos(rot)));
    double h = restart == 0 ? step : std::max(4.0 * last_move, 50.0 * tol);
    for (int sweep = 0; sweep < 60 && h > tol && fx > 1e-13; ++sweep) {
      double moved = 0.0;
      for (const Vec& axis : axes) {
        const LineMinimum lm =
            golden_section_minimize([&](double t) { return f(x + t * axis); }, -h, h, std::max(0.5 * tol, 0.02 * h));
        if (lm.f < fx) {
          x += lm.x * axis;
          fx = lm.f;
          moved = std::max(moved, std::abs(lm.x));
        }
      }
      if (moved > 0.0) last_move = moved;
      h = moved > 0.0 ? std::max(2.0 * moved, 0.25 * h) : 0.25 * h;
    }
  }
  res.x = x;
  res.distance = fx;
  return res;
}

BoundaryMap BoundaryMap::identity() {
  return {[](double s) { return s; }, [](double) { return 1.0; }};
}

BoundaryMap BoundaryMap::shift(double ds, double length) {
  return {[ds, length](double s) { return wrap_periodic(s + ds, length); }, [](double) { return 1.0; }};
}

Dataset push_forward(const Dataset& d1, const BoundaryInfo& target, const BoundaryMap& phi) {
  Dataset out = d1;
  out.boundary = target;
  for (auto& set : out.sets) {
    for (auto& b : set.samples) {
      const double s2 = wrap_periodic(phi.phi(b.s), target.length());
      const double g1 = d1.boundary.gbdry(b.s), g2 = target.gbdry(s2);
      b.eta_t = b.eta_t * (std::sqrt(g1) * phi.dphi(b.s) / std::sqrt(g2));
      b.s = s2;
      const double gn = b.eta_t.norm() * std::sqrt(g2);
      b.eta_nu = std::sqrt(std::max(0.0, 1.0 - gn * gn));
      b.complete = true;
    }
    normalize_samples(set.samples, target.length());
  }
  return out;
}

CompareReport compare_datasets(const Dataset& d1, const Dataset& d2, const BoundaryMap& phi) {
  if (std::abs(d1.boundary.length() - d2.boundary.length()) > 1e-6) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "boundary lengths differ: %.17g vs %.17g", d1.boundary.length(),
                  d2.boundary.length());
    throw Error(ErrorCode::IncompatibleBoundary, buf);
  }
  if (d1.grid != d2.grid) throw Error(ErrorCode::Usage, "datasets use different direction grids");
  CompareReport rep;
  for (const auto& set : d1.sets)
    for (const auto& b : set.samples) {
      const double s2 = wrap_periodic(phi.phi(b.s), d2.boundary.length());
      const double n1 = b.eta_t.norm() * std::sqrt(d1.boundary.gbdry(b.s));
      const double n2 = b.eta_t.norm() * std::abs(phi.dphi(b.s)) * std::sqrt(d2.boundary.gbdry(s2));
      rep.norm_defect = std::max(rep.norm_defect, std::abs(n1 - n2));
    }

  const Dataset pushed = push_forward(d1, d2.boundary, phi);
  std::vector<PhaseSet> A, B;
  for (const auto& s : pushed.sets) A.push_back(phase_set(s, d2.boundary));
  for (const auto& s : d2.sets) B.push_back(phase_set(s, d2.boundary));
  if (A.empty() || B.empty()) throw Error(ErrorCode::InsufficientData, "empty dataset in comparison");

  auto one_side = [&](const std::vector<PhaseSet>& X, const std::vector<PhaseSet>& Y, std::string& wx,
                      std::string& wy) {
    double cost = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      // Same position first: datasets generated from the same source list
      // usually pair up by index.
      for (std::size_t k = 0; k < Y.size(); ++k) {
        const std::size_t j = (i + k) % Y.size();
        const SetDistance d = hausdorff(X[i], Y[j], best);
        if (!d.aborted && d.value < best) {
          best = d.value;
          arg = j;
          if (best <= cost) break;  // cannot raise the maximum
        }
      }
      if (best > cost) {
        cost = best;
        wx = X[i].id;
        wy = Y[arg].id;
      }
    }
    return cost;
  };
  std::string a1, b1, a2, b2;
  const double c1 = one_side(A, B, a1, b1);
  const double c2 = one_side(B, A, b2, a2);
  if (c1 >= c2) {
    rep.cost = c1;
    rep.worst_a = a1;
    rep.worst_b = b1;
  } else {
    rep.cost = c2;
    rep.worst_a = a2;
    rep.worst_b = b2;
  }
  return rep;
}

namespace {

// Exit curve of an interior source: alpha as a periodic function of s,
// samples in s order (one per direction of the grid).
struct ExitCurve {
  std::vector<PhasePoint> pts;
  bool usable = false;  // interior source with a full, single-valued curve
};

// alpha of the curve at s by linear interpolation.
double curve_alpha(const ExitCurve& c, double s, double L) {
  const auto& v = c.pts;
  const int n = static_cast<int>(v.size());
  int hi = static_cast<int>(
      std::lower_bound(v.begin(), v.end(), s, [](const PhasePoint& a, double x) { return a.s < x; }) - v.begin());
  const int lo = (hi - 1 + n) % n;
  hi %= n;
  double gap = wrap_periodic(v[hi].s - v[lo].s, L);
  if (gap <= 0.0) gap = L;
  const double u = wrap_periodic(s - v[lo].s, L) / gap;
  return v[lo].alpha + u * (v[hi].alpha - v[lo].alpha);
}

// Fractional sample positions in a where the curves a and b cross.
std::vector<double> crossings(const ExitCurve& a, const ExitCurve& b, double L) {
  std::vector<double> out;
  const int n = static_cast<int>(a.pts.size());
  std::vector<double> D(n);
  for (int i = 0; i < n; ++i) D[i] = a.pts[i].alpha - curve_alpha(b, a.pts[i].s, L);
  for (int i = 0; i < n; ++i) {
    const double d0 = D[i], d1 = D[(i + 1) % n];
    if (d0 == 0.0) out.push_back(i);
    else if ((d0 > 0.0) != (d1 > 0.0) && d1 != 0.0) out.push_back(i + d0 / (d0 - d1));
  }
  return out;
}

PhasePoint curve_point(const ExitCurve& c, double f, double L) {
  const int n = static_cast<int>(c.pts.size());
  const int i = static_cast<int>(std::floor(f)) % n;
  const double u = f - std::floor(f);
  const PhasePoint& p = c.pts[i];
  const PhasePoint& q = c.pts[(i + 1) % n];
  return {wrap_periodic(p.s + u * wrap_periodic(q.s - p.s, L), L), p.alpha + u * (q.alpha - p.alpha)};
}

}  // namespace

LensData extract_lens_data(const SigmaIndex& index, double eps, int workers) {
  const Dataset& d = index.dataset();
  if (eps <= 0.0) eps = index.default_eps();
  const double L = d.boundary.length();
  const int n_sets = static_cast<int>(d.sets.size());

  std::vector<ExitCurve> curves(n_sets);
  for (int i = 0; i < n_sets; ++i) {
    ExitCurve& c = curves[i];
    const auto& samples = d.sets[i].samples;
    c.usable = static_cast<int>(samples.size()) == d.grid;
    for (int j = 0; j < static_cast<int>(samples.size()); ++j) {
      c.pts.push_back(index.phase(i, j));
      if (std::abs(c.pts.back().alpha) > 0.5 * kPi - 1e-9) c.usable = false;
    }
  }

  std::vector<std::vector<LensPair>> pairs(n_sets);
  std::vector<std::vector<std::pair<int, int>>> orphans(n_sets);
  parallel_for(static_cast<std::size_t>(n_sets), workers, [&](std::size_t ps) {
    const int P = static_cast<int>(ps);
    const ExitCurve& cp = curves[P];
    const int n = static_cast<int>(cp.pts.size());
    std::map<int, std::vector<double>> cache;
    for (int ia = 0; ia < n; ++ia) {
      const PhasePoint a = cp.pts[ia];
      if (std::abs(a.alpha) > 0.5 * kPi - 1e-9) {
        pairs[P].push_back({P, ia, P, ia, true});
        continue;
      }
      if (!cp.usable) {
        orphans[P].push_back({P, ia});
        continue;
      }
      // A witness source lies on the chord of a: its exit curve crosses the
      // curve of P near a, and again at the other end of the chord.
      double best = std::numeric_limits<double>::infinity();
      int partner = -1;
      for (const auto& w : index.matches(a, eps)) {
        if (w.set == P || !curves[w.set].usable) continue;
        auto it = cache.find(w.set);
        if (it == cache.end()) it = cache.emplace(w.set, crossings(cp, curves[w.set], L)).first;
        const auto& xs = it->second;
        if (xs.size() != 2) continue;
        for (int k = 0; k < 2; ++k) {
          const double delta = phase_distance(a, curve_point(cp, xs[k], L), L);
          if (delta > eps || delta >= best) continue;
          // Shift by the sample offset of a from the near crossing.
          double off = ia - xs[k];
          if (off > 0.5 * n) off -= n;
          if (off < -0.5 * n) off += n;
          best = delta;
          partner = ((static_cast<int>(std::lround(xs[1 - k] + off)) % n) + n) % n;
        }
      }
      if (partner >= 0 && partner != ia) pairs[P].push_back({P, ia, P, partner, false});
      else orphans[P].push_back({P, ia});
    }
  });

  LensData data;
  for (int i = 0; i < n_sets; ++i) {
    data.pairs.insert(data.pairs.end(), pairs[i].begin(), pairs[i].end());
    data.orphans.insert(data.orphans.end(), orphans[i].begin(), orphans[i].end());
  }
  return data;
}

LensCheck check_lens(const Manifold& m, const SigmaIndex& index, const LensData& lens, int workers) {
  const Dataset& d = index.dataset();
  const BoundaryChart& chart = m.boundary();
  const double eps = index.default_eps();
  LensCheck out;
  out.model_time.assign(lens.pairs.size(), std::numeric_limits<double>::quiet_NaN());
  out.agree.assign(lens.pairs.size(), 1);
  parallel_for(lens.pairs.size(), workers, [&](std::size_t k) {
    const LensPair& p = lens.pairs[k];
    if (p.tangential) return;
    // The partner is the far end of the chord; reversed, it is the entry.
    const PhasePoint in = index.phase(p.partner_set, p.partner_sample), exit = index.phase(p.set, p.sample);
    const LensEntry e = scattering_relation(m, boundary_vector_from_angle(chart, in.s, -in.alpha));
    const PhasePoint got{e.exit.s, outward_angle(chart, e.exit)};
    out.agree[k] = phase_distance(got, exit, d.boundary.length()) <= eps;
    out.model_time[k] = e.time;
  });
  for (std::size_t k = 0; k < lens.pairs.size(); ++k) {
    if (lens.pairs[k].tangential) continue;
    ++out.non_tangential;
    out.disagree += !out.agree[k];
  }
  const double total = out.non_tangential + static_cast<double>(lens.orphans.size());
  out.success = total > 0 ? (out.non_tangential - out.disagree) / total : 0.0;
  return out;
}

I0Report i0_invariant(const MetricField& g, const MetricField& gt, const GeodesicRecord& geodesic,
                      const DomainSpec* domain, int samples) {
  if (!geodesic.has_dense()) throw Error(ErrorCode::Usage, "i0_invariant needs a record with dense output");
  const int n = geodesic.n;
  const double expo = 2.0 / (n + 1);
  I0Report rep;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = geodesic.t_final * k / samples;
    const GeodesicState st = geodesic.at(t);
    const Mat G = g.eval(st.x), Gt = gt.eval(st.x);
    const double value = std::pow(G.determinant() / Gt.determinant(), expo) * inner(Gt, st.v, st.v);
    rep.t.push_back(t);
    rep.values.push_back(value);
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    sum += value;
  }
  const double mean = sum / rep.values.size();
  rep.max_rel_variation = (hi - lo) / std::max(std::abs(mean), 1e-300);
  if (domain && domain->dim() == 2) {
    const int m = 21;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const Vec x = vec2(domain->lo()[0] + (domain->hi()[0] - domain->lo()[0]) * (i + 0.5) / m,
                           domain->lo()[1] + (domain->hi()[1] - domain->lo()[1]) * (j + 0.5) / m);
        if (domain->b(x) >= 0.0) continue;
        const double f = g.eval(x).determinant() / gt.eval(x).determinant();
        rep.grid_points.push_back(x);
        rep.f_values.push_back(f);
        rep.f_max_deviation = std::max(rep.f_max_deviation, std::abs(f - 1.0));
      }
  }
  return rep;
}

}  // namespace geoscatter
