#include "geoscatter/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "geoscatter/error.hpp"

namespace geoscatter {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what);
}

double parse_num(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  fail(line, "bad number '" + tok + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& d) {
  out << "#geoscatter-dataset v1\n";
  out << "#metric " << d.metric_id << "  dim " << d.dim << "  grid " << d.grid << "  boundary_len "
      << num(d.boundary.length()) << "\n";
  const auto& s = d.boundary.s_samples();
  const auto& g = d.boundary.g_samples();
  for (std::size_t k = 0; k < s.size(); ++k) out << "#gbdry " << num(s[k]) << " " << num(g[k]) << "\n";
  for (const auto& set : d.sets) {
    out << "source " << set.source_id << "\n";
    for (const auto& b : set.samples) {
      out << num(b.s);
      for (int i = 0; i < b.eta_t.size(); ++i) out << " " << num(b.eta_t[i]);
      if (b.complete) out << " " << num(b.eta_nu);
      out << "\n";
    }
    out << "end\n";
  }
}

Dataset read_dataset(std::istream& in) {
  Dataset d;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line) || line != "#geoscatter-dataset v1") fail(1, "missing '#geoscatter-dataset v1' header");
  ++lineno;
  bool have_meta = false;
  double length = 0.0;
  std::vector<double> gs, gv;
  ScatteringSet* current = nullptr;
  int columns = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tok = split(line);
    if (tok.empty()) continue;
    if (tok[0] == "#metric") {
      if (tok.size() != 8 || tok[2] != "dim" || tok[4] != "grid" || tok[6] != "boundary_len")
        fail(lineno, "malformed #metric line");
      d.metric_id = tok[1];
      d.dim = static_cast<int>(parse_num(tok[3], lineno));
      d.grid = static_cast<int>(parse_num(tok[5], lineno));
      length = parse_num(tok[7], lineno);
      if (d.dim < 2 || d.dim > kMaxDim || d.grid <= 0 || !(length > 0.0)) fail(lineno, "invalid metadata values");
      have_meta = true;
    } else if (tok[0] == "#gbdry") {
      if (!have_meta) fail(lineno, "#gbdry before #metric line");
      if (tok.size() != 2 + static_cast<std::size_t>((d.dim - 1) * (d.dim - 1))) fail(lineno, "malformed #gbdry line");
      gs.push_back(parse_num(tok[1], lineno));
      gv.push_back(parse_num(tok[2], lineno));
    } else if (tok[0][0] == '#') {
      continue;
    } else if (tok[0] == "source") {
      if (!have_meta) fail(lineno, "source block before #metric line");
      if (current) fail(lineno, "nested source block");
      if (tok.size() != 2) fail(lineno, "expected 'source <id>'");
      if (d.find(tok[1])) fail(lineno, "duplicate source id '" + tok[1] + "'");
      d.sets.push_back({tok[1], {}, d.grid, d.metric_id});
      current = &d.sets.back();
    } else if (tok[0] == "end") {
      if (!current) fail(lineno, "'end' without source");
      current = nullptr;
    } else {
      if (!current) fail(lineno, "sample outside a source block");
      const int n = d.dim;
      const int ncol = static_cast<int>(tok.size());
      if (ncol != n && ncol != n + 1) fail(lineno, "expected " + std::to_string(n) + " or " + std::to_string(n + 1) + " columns");
      if (columns < 0) columns = ncol;
      if (ncol != columns) fail(lineno, "mixed tangential and complete samples");
      BoundarySample b;
      b.s = parse_num(tok[0], lineno);
      b.eta_t = Vec(n - 1);
      for (int i = 0; i < n - 1; ++i) b.eta_t[i] = parse_num(tok[1 + i], lineno);
      b.complete = ncol == n + 1;
      if (b.complete) {
        b.eta_nu = parse_num(tok[n], lineno);
        if (b.eta_nu < 0.0) fail(lineno, "negative normal component");
      }
      current->samples.push_back(b);
    }
  }
  if (current) fail(lineno, "unterminated source block");
  if (!have_meta) fail(lineno, "missing #metric line");
  try {
    d.boundary = BoundaryInfo(length, gs, gv);
  } catch (const Error& e) {
    fail(lineno, e.what());
  }
  return d;
}

void save_dataset(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_dataset(out, d);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return read_dataset(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_truth(std::ostream& out, const std::vector<Source>& sources) {
  out << "#geoscatter-truth v1\n";
  for (const auto& s : sources) {
    out << s.id;
    for (int i = 0; i < s.x.size(); ++i) out << " " << num(s.x[i]);
    out << "\n";
  }
}

std::vector<Source> read_truth(std::istream& in, int dim) {
  std::vector<Source> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = split(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (static_cast<int>(tok.size()) != 1 + dim) fail(lineno, "expected id and " + std::to_string(dim) + " coordinates");
    Source s{tok[0], Vec(dim)};
    for (int i = 0; i < dim; ++i) s.x[i] = parse_num(tok[1 + i], lineno);
    out.push_back(s);
  }
  return out;
}

std::vector<Source> load_truth(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return read_truth(in, dim);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace geoscatter
