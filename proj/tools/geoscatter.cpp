// geoscatter: forward datasets, inverse runs and property checks.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "geoscatter/charts.hpp"
#include "geoscatter/config.hpp"
#include "geoscatter/dataset_io.hpp"
#include "geoscatter/error.hpp"
#include "geoscatter/parallel.hpp"
#include "geoscatter/reconstruction.hpp"
#include "geoscatter/verify.hpp"

namespace fs = std::filesystem;
using namespace geoscatter;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  int workers = 1;
  std::uint64_t seed = 1;
  int grid = 0;
  std::string format = "csv";
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  const std::string path = (fs::path(c.out) / name).string();
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
  return f;
}

Manifold load_manifold(const Common& c) {
  if (c.config.empty()) throw Error(ErrorCode::Usage, "--config is required");
  return build_manifold(KeyValueConfig::load(c.config));
}

std::vector<Vec> config_sources(const KeyValueConfig& cfg, const Manifold& m, std::uint64_t seed) {
  std::vector<Vec> pts;
  for (const auto& line : cfg.get_all("source")) {
    std::istringstream in(line);
    Vec x(m.dim());
    for (int i = 0; i < m.dim(); ++i)
      if (!(in >> x[i])) throw Error(ErrorCode::Parse, "line " + std::to_string(cfg.line_of("source")) + ": bad source");
    pts.push_back(x);
  }
  const std::string spec = cfg.get_or("sources", pts.empty() ? "lattice(0.2)" : "");
  if (spec.empty()) return pts;
  const double margin = cfg.get_double("source_margin", 0.02);
  double h = 0.0;
  long n = 0;
  if (std::sscanf(spec.c_str(), "lattice(%lf)", &h) == 1) {
    for (const Vec& x : lattice_points(m, h, margin)) pts.push_back(x);
  } else if (std::sscanf(spec.c_str(), "random(%ld)", &n) == 1 && n > 0) {
    std::mt19937_64 rng(seed);
    for (const Vec& x : sample_interior(m, static_cast<int>(n), rng, margin)) pts.push_back(x);
  } else {
    throw Error(ErrorCode::Parse, "line " + std::to_string(cfg.line_of("sources")) + ": sources must be lattice(h) or random(n)");
  }
  return pts;
}

int cmd_forward(const Common& c) {
  const KeyValueConfig cfg = KeyValueConfig::load(c.config.empty() ? throw Error(ErrorCode::Usage, "--config is required") : c.config);
  const Manifold m = build_manifold(cfg);
  const ConvexityReport conv = is_strictly_convex(m.boundary(), 256);
  if (!conv.strictly_convex) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "boundary is not strictly convex: shape operator eigenvalue %.6g at s = %.6g",
                  conv.min_eigenvalue, conv.argmin_s);
    throw Error(ErrorCode::NonConvex, buf);
  }
  const int grid = c.grid > 0 ? c.grid : static_cast<int>(cfg.get_long("grid", 360));
  const std::uint64_t seed = c.seed;
  const auto sources = label_sources(config_sources(cfg, m, seed), seed);
  if (sources.empty()) throw Error(ErrorCode::InsufficientData, "no sources inside the domain");
  const bool complete = cfg.get_or("complete", "true") != "false";
  const Dataset d = generate_dataset(m, sources, grid, complete, c.workers);

  auto ds = open_out(c, "dataset.txt");
  write_dataset(ds, d);
  auto tr = open_out(c, "truth.txt");
  write_truth(tr, sources);

  const BoundaryChart& chart = m.boundary();
  const int n_pts = 32, n_ang = 31;
  std::vector<LensEntry> rows(n_pts * n_ang);
  parallel_for(rows.size(), c.workers, [&](std::size_t k) {
    const double s = chart.length() * static_cast<double>(k / n_ang) / n_pts;
    const double a = -0.5 * kPi + kPi * static_cast<double>(k % n_ang + 1) / (n_ang + 1);
    rows[k] = scattering_relation(m, boundary_vector_from_angle(chart, s, a));
  });
  auto lens = open_out(c, "lens.csv");
  write_lens_csv(lens, chart, rows);
  std::printf("forward: %zu sources, grid %d, metric %s -> %s\n", sources.size(), grid, d.metric_id.c_str(),
              c.out.c_str());
  return 0;
}

struct ReconOpts {
  std::string dataset, targets, truth, target_truth, against;
  bool refine = false;
  double step = 0.05;
  double refine_tol = 1e-5;
  double shift = 0.0;
  double threshold = -1.0;
  int chart_grid = 20;
  int boundary_points = 32;
};

int localize_mode(const Common& c, const ReconOpts& r) {
  const Dataset d = load_dataset(r.dataset);
  const Dataset t = r.targets.empty() ? d : load_dataset(r.targets);
  const bool self = r.targets.empty();
  std::map<std::string, Vec> truth, target_truth;
  if (!r.truth.empty())
    for (const auto& s : load_truth(r.truth, d.dim)) truth[s.id] = s.x;
  if (!r.target_truth.empty())
    for (const auto& s : load_truth(r.target_truth, d.dim)) target_truth[s.id] = s.x;
  else if (self)
    target_truth = truth;
  std::optional<Manifold> m;
  if (r.refine) {
    m = load_manifold(c);
    if (truth.empty()) throw Error(ErrorCode::Usage, "--refine needs --truth for the dataset sources");
  }

  const Localizer loc(d);
  struct Row {
    LocalizeResult res;
    Vec est;
    double err = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<Row> rows(t.sets.size());
  parallel_for(t.sets.size(), c.workers, [&](std::size_t i) {
    const PhaseSet target = phase_set(t.sets[i], d.boundary);
    Row& row = rows[i];
    row.res = loc.nearest(target);
    auto it = truth.find(row.res.id);
    if (it != truth.end()) row.est = it->second;
    if (r.refine && row.res.distance > 0.0) row.est = refine_localization(*m, target, row.est, r.step, r.refine_tol).x;
    auto tt = target_truth.find(t.sets[i].source_id);
    if (tt != target_truth.end() && row.est.size()) row.err = (row.est - tt->second).norm();
  });

  auto out = open_out(c, "localize.csv");
  out << "id,match,distance,runner_up,runner_up_distance";
  for (int k = 0; k < d.dim; ++k) out << ",true_x" << k + 1;
  for (int k = 0; k < d.dim; ++k) out << ",est_x" << k + 1;
  out << ",err\n";
  int wrong = 0, far = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    const std::string& id = t.sets[i].source_id;
    out << id << ',' << row.res.id << ',' << fmt(row.res.distance) << ',' << row.res.runner_up << ','
        << fmt(row.res.runner_up_distance);
    auto tt = target_truth.find(id);
    for (int k = 0; k < d.dim; ++k) out << ',' << (tt != target_truth.end() ? fmt(tt->second[k]) : "nan");
    for (int k = 0; k < d.dim; ++k) out << ',' << (row.est.size() ? fmt(row.est[k]) : "nan");
    out << ',' << fmt(row.err) << '\n';
    if (self && row.res.id != id) ++wrong;
    if (r.refine && !(row.err < 1e-3)) ++far;
  }
  std::printf("localize: %zu targets, %d wrong self-matches, %d refined beyond 1e-3\n", rows.size(), wrong, far);
  return wrong == 0 && far == 0 ? 0 : 1;
}

int charts_mode(const Common& c, const ReconOpts& r) {
  const Manifold m = load_manifold(c);
  const DomainSpec& dom = *m.domain;
  const BoundaryChart& chart = m.boundary();
  // Grid over the extent of the boundary curve.
  Vec lo = chart.point(0.0), hi = lo;
  for (int k = 1; k < 512; ++k) {
    const Vec x = chart.point(chart.length() * k / 512);
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  std::vector<std::pair<bool, Vec>> jobs;
  const int n = r.chart_grid;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec x = vec2(lo[0] + (hi[0] - lo[0]) * (i + 0.5) / n, lo[1] + (hi[1] - lo[1]) * (j + 0.5) / n);
      if (dom.b(x) < -0.02) jobs.push_back({false, x});
    }
  for (int k = 0; k < r.boundary_points; ++k) jobs.push_back({true, chart.point(chart.length() * k / r.boundary_points)});

  std::vector<ChartCandidate> rows(jobs.size());
  parallel_for(jobs.size(), c.workers, [&](std::size_t k) {
    try {
      rows[k] = jobs[k].first ? boundary_chart(m, jobs[k].second) : interior_chart(m, jobs[k].second, c.seed + k);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ChartFailure) throw;
      rows[k].kind = jobs[k].first ? ChartKind::Boundary : ChartKind::Interior;
      rows[k].p = jobs[k].second;
    }
  });
  auto out = open_out(c, "charts.csv");
  write_chart_csv(out, rows);
  int bad = 0;
  for (const auto& row : rows) bad += !row.jacobian_ok;
  std::printf("charts: %zu candidates, %d not certified\n", rows.size(), bad);
  return bad == 0 ? 0 : 1;
}

int lens_mode(const Common& c, const ReconOpts& r) {
  const Dataset d = load_dataset(r.dataset);
  const SigmaIndex index(d);
  const LensData lens = extract_lens_data(index, 0.0, c.workers);
  std::optional<Manifold> m;
  if (!c.config.empty()) m = load_manifold(c);
  LensCheck check;
  check.model_time.assign(lens.pairs.size(), std::numeric_limits<double>::quiet_NaN());
  check.agree.assign(lens.pairs.size(), 1);
  if (m) check = check_lens(*m, index, lens, c.workers);
  auto out = open_out(c, "lens_pairs.csv");
  out << "source_id,s_in,angle_in,s_out,angle_out,tangential,time_model,model_agrees\n";
  int non_tangential = 0, disagree = 0;
  for (std::size_t k = 0; k < lens.pairs.size(); ++k) {
    const LensPair& p = lens.pairs[k];
    const PhasePoint in = index.phase(p.partner_set, p.partner_sample), o = index.phase(p.set, p.sample);
    out << d.sets[p.set].source_id << ',' << fmt(in.s) << ',' << fmt(-in.alpha) << ',' << fmt(o.s) << ','
        << fmt(o.alpha) << ',' << (p.tangential ? 1 : 0) << ',' << fmt(check.model_time[k]) << ','
        << (m ? (check.agree[k] ? "1" : "0") : "") << '\n';
    if (!p.tangential) {
      ++non_tangential;
      disagree += !check.agree[k];
    }
  }
  auto orph = open_out(c, "lens_orphans.csv");
  orph << "source_id,s,alpha\n";
  for (const auto& [set, sample] : lens.orphans) {
    const PhasePoint q = index.phase(set, sample);
    orph << d.sets[set].source_id << ',' << fmt(q.s) << ',' << fmt(q.alpha) << '\n';
  }
  const double total = non_tangential + static_cast<double>(lens.orphans.size());
  const double ok_fraction = total > 0 ? (non_tangential - disagree) / total : 0.0;
  std::printf("lens: %d matched non-tangential, %zu orphans, %d disagree with the model, success %.6f\n",
              non_tangential, lens.orphans.size(), disagree, ok_fraction);
  return ok_fraction >= 0.99 ? 0 : 1;
}

int compare_mode(const Common& c, const ReconOpts& r) {
  if (r.against.empty()) throw Error(ErrorCode::Usage, "compare needs --against");
  const Dataset d1 = load_dataset(r.dataset), d2 = load_dataset(r.against);
  const BoundaryMap phi = r.shift != 0.0 ? BoundaryMap::shift(r.shift, d2.boundary.length()) : BoundaryMap::identity();
  const CompareReport rep = compare_datasets(d1, d2, phi);
  const double threshold = r.threshold >= 0.0 ? r.threshold : 2.0 * (2.0 * kPi / d1.grid);
  auto out = open_out(c, "compare.csv");
  out << "cost,threshold,worst_a,worst_b,norm_defect\n"
      << fmt(rep.cost) << ',' << fmt(threshold) << ',' << rep.worst_a << ',' << rep.worst_b << ','
      << fmt(rep.norm_defect) << '\n';
  std::printf("compare: cost %.17g, threshold %.17g (%s vs %s)\n", rep.cost, threshold, rep.worst_a.c_str(),
              rep.worst_b.c_str());
  return rep.cost <= threshold ? 0 : 1;
}

int cmd_verify(const Common& c, const std::string& suite, std::optional<double> tol, int samples) {
  const Manifold m = load_manifold(c);
  VerifyOptions opt;
  opt.seed = c.seed;
  opt.tol_override = tol;
  opt.samples = samples;
  const auto rows = run_suite(m, suite, opt);
  auto out = open_out(c, "verify.csv");
  write_results_csv(out, rows);
  bool all = true;
  for (const auto& r : rows) {
    std::printf("%s %s.%s measured=%.17g tol=%.17g\n", r.pass ? "PASS" : "FAIL", r.suite.c_str(), r.name.c_str(),
                r.measured, r.tolerance);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "configuration file");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--grid", c.grid, "direction grid size");
  sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesic scattering toolkit"};
  app.require_subcommand(1);
  Common common;

  auto* forward = app.add_subcommand("forward", "generate a scattering dataset from a config");
  add_common(forward, common);

  ReconOpts ro;
  std::string mode;
  auto* recon = app.add_subcommand("reconstruct", "run an inverse pipeline on a dataset");
  add_common(recon, common);
  recon->add_option("mode", mode, "localize | charts | lens | compare")
      ->required()
      ->check(CLI::IsMember({"localize", "charts", "lens", "compare"}));
  recon->add_option("--dataset", ro.dataset, "dataset file");
  recon->add_option("--targets", ro.targets, "dataset of target sets (default: self-queries)");
  recon->add_option("--truth", ro.truth, "truth sidecar of the dataset");
  recon->add_option("--target-truth", ro.target_truth, "truth sidecar of the targets");
  recon->add_flag("--refine", ro.refine, "refine positions with the forward model (needs --config)");
  recon->add_option("--step", ro.step, "initial refinement step");
  recon->add_option("--refine-tol", ro.refine_tol, "refinement stopping width");
  recon->add_option("--against", ro.against, "second dataset for compare");
  recon->add_option("--shift", ro.shift, "boundary correspondence s -> s + shift");
  recon->add_option("--threshold", ro.threshold, "compare threshold (default 2 grid spacings)");
  recon->add_option("--chart-grid", ro.chart_grid, "interior chart grid per axis");
  recon->add_option("--boundary-points", ro.boundary_points, "boundary chart count");

  std::string suite = "all";
  std::optional<double> tol;
  int samples = 40;
  auto* verify = app.add_subcommand("verify", "run property suites");
  add_common(verify, common);
  verify->add_option("--suite", suite, "convexity | conservation | jacobi | hausdorff | i0 | all");
  verify->add_option("--tol", tol, "override every tolerance");
  verify->add_option("--samples", samples, "random samples per suite")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "E_USAGE: %s\n", e.what());
    return 2;
  }

  try {
    if (forward->parsed()) return cmd_forward(common);
    if (verify->parsed()) return cmd_verify(common, suite, tol, samples);
    if (mode != "charts" && ro.dataset.empty()) throw Error(ErrorCode::Usage, "--dataset is required");
    if (mode == "localize") return localize_mode(common, ro);
    if (mode == "charts") return charts_mode(common, ro);
    if (mode == "lens") return lens_mode(common, ro);
    return compare_mode(common, ro);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", code_tag(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "E_INTERNAL: %s\n", e.what());
    return 3;
  }
}
