#include "geoscatter/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "geoscatter/catalog.hpp"
#include "geoscatter/error.hpp"

namespace geoscatter {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Parse, "cannot read number for " + what + ": '" + text + "'");
}

std::vector<double> numbers_in(const std::string& text, const std::string& what) {
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == ',' || c == '[' || c == ']' || c == '(' || c == ')') c = ' ';
  std::istringstream in(cleaned);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(tok, what));
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::Parse, "line " + std::to_string(lineno) + ": empty key");
    cfg.entries_.emplace_back(key, trim(line.substr(eq + 1)));
    cfg.lines_.push_back(lineno);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  try {
    return parse(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

bool KeyValueConfig::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& kv) { return kv.first == key; });
}

std::string KeyValueConfig::get(const std::string& key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == key) return it->second;
  throw Error(ErrorCode::Usage, "missing config key '" + key + "'");
}

std::string KeyValueConfig::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? to_double(get(key), key) : fallback;
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const double v = to_double(get(key), key);
  if (v != static_cast<double>(static_cast<long>(v)))
    throw Error(ErrorCode::Parse, "expected an integer for " + key);
  return static_cast<long>(v);
}

std::vector<std::string> KeyValueConfig::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& kv : entries_)
    if (kv.first == key) out.push_back(kv.second);
  return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
  lines_.push_back(0);
}

int KeyValueConfig::line_of(const std::string& key) const {
  for (std::size_t i = entries_.size(); i-- > 0;)
    if (entries_[i].first == key) return lines_[i];
  return 0;
}

std::pair<Vec, Vec> parse_bbox(const std::string& text, int dim) {
  std::string t = text;
  for (std::size_t pos; (pos = t.find("..")) != std::string::npos;) t.replace(pos, 2, " ");
  const auto nums = numbers_in(t, "bbox");
  if (static_cast<int>(nums.size()) != 2 * dim)
    throw Error(ErrorCode::Parse, "bbox needs " + std::to_string(2 * dim) + " numbers");
  Vec lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = nums[2 * i];
    hi[i] = nums[2 * i + 1];
    if (!(lo[i] < hi[i])) throw Error(ErrorCode::Parse, "bbox axis " + std::to_string(i + 1) + " is empty");
  }
  return {lo, hi};
}

Manifold build_manifold(const KeyValueConfig& cfg) {
  const int n = static_cast<int>(cfg.get_long("dim", 2));
  if (n < 2 || n > kMaxDim) throw Error(ErrorCode::Usage, "dim must be in [2, " + std::to_string(kMaxDim) + "]");

  const std::string kind = cfg.get_or("metric", "flat");
  const std::string id = cfg.get_or("metric_id", kind);
  MetricPtr metric;
  if (kind == "flat") {
    metric = std::make_shared<FlatMetric>(n);
  } else if (kind == "conformal") {
    metric = ConformalMetric::from_expression(Expression::parse(cfg.get("phi_expr"), n), id);
  } else if (kind == "bump" && n == 2) {
    metric = catalog::bump_metric(cfg.get_double("bump_amplitude", 0.05));
  } else if (kind == "sphere" && n == 2) {
    metric = catalog::sphere_metric();
  } else if (kind == "matrix_expr") {
    std::vector<Expression> upper;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const std::string key = "g" + std::to_string(i + 1) + std::to_string(j + 1);
        upper.push_back(Expression::parse(cfg.get(key), n));
      }
    metric = std::make_shared<ExpressionMetric>(n, id, std::move(upper));
  } else {
    throw Error(ErrorCode::Usage, "unknown metric kind '" + kind + "'");
  }

  Vec center = Vec::Zero(n);
  if (cfg.has("center")) {
    const auto c = numbers_in(cfg.get("center"), "center");
    if (static_cast<int>(c.size()) != n) throw Error(ErrorCode::Parse, "center needs " + std::to_string(n) + " numbers");
    for (int i = 0; i < n; ++i) center[i] = c[i];
  }

  const std::string boundary = cfg.get_or("boundary", "circle(1)");
  std::shared_ptr<const LevelSet> level;
  double extent = 1.0;
  if (boundary.rfind("circle", 0) == 0) {
    const auto args = numbers_in(boundary.substr(6), "circle");
    if (args.empty() || args.size() > static_cast<std::size_t>(1 + n) || args.size() == 2)
      throw Error(ErrorCode::Parse, "circle takes (R) or (R, c1, ..., cn)");
    if (args.size() > 1)
      for (int i = 0; i < n; ++i) center[i] = args[1 + i];
    if (!(args[0] > 0.0)) throw Error(ErrorCode::Parse, "circle radius must be positive");
    level = std::make_shared<CircleLevelSet>(args[0], center);
    extent = args[0];
  } else {
    level = std::make_shared<ExpressionLevelSet>(Expression::parse(boundary, n));
  }

  Vec lo, hi;
  if (cfg.has("bbox")) {
    std::tie(lo, hi) = parse_bbox(cfg.get("bbox"), n);
  } else {
    lo = center.array() - 1.5 * extent;
    hi = center.array() + 1.5 * extent;
  }
  DomainSpec domain(level, lo, hi, center);
  domain.validate();
  return Manifold::make(metric, domain);
}

}  // namespace geoscatter
