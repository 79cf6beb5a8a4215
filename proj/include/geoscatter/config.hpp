#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "geoscatter/manifold.hpp"

namespace geoscatter {

// Line-oriented "key = value" file; '#' starts a comment; keys may repeat.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  // Last occurrence wins for scalar lookups.
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::vector<std::string> get_all(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  int line_of(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<int> lines_;
};

// metric = flat | conformal | matrix_expr | bump | sphere; phi_expr; g11 g12 ...;
// bump_amplitude (bump only; the id is then fixed by the amplitude);
// boundary = circle(R[, c1, c2]) | <level-set expression>;
// bbox = [lo..hi, lo..hi]; center = c1 c2; dim = n; metric_id = name.
Manifold build_manifold(const KeyValueConfig& cfg);

// "[-1.5..1.5, -2..2]" or "-1.5 1.5 -2 2"
std::pair<Vec, Vec> parse_bbox(const std::string& text, int dim);

}  // namespace geoscatter
