#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "geoscatter/manifold.hpp"

namespace geoscatter {

// Rejection sampling in the bounding box; points satisfy b(x) < -margin.
std::vector<Vec> sample_interior(const Manifold& m, int count, std::mt19937_64& rng, double margin = 0.05);
// Square lattice with spacing h (origin-aligned) restricted to b(x) < -margin.
std::vector<Vec> lattice_points(const Manifold& m, double h, double margin = 0.0);

struct PropertyResult {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // measured must stay below the tolerance unless this is set.
  bool lower_bound = false;
};

struct VerifyOptions {
  int samples = 40;
  std::uint64_t seed = 1;
  std::optional<double> tol_override;
};

const std::vector<std::string>& suite_names();
// Error(Usage) for unknown suite names; "all" runs every suite.
std::vector<PropertyResult> run_suite(const Manifold& m, const std::string& suite, const VerifyOptions& opt);
void write_results_csv(std::ostream& out, const std::vector<PropertyResult>& rows);

}  // namespace geoscatter
