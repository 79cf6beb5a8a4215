#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "geoscatter/scattering.hpp"

namespace geoscatter {

// Plain-text dataset, 17 significant digits:
//   #geoscatter-dataset v1
//   #metric <id>  dim <n>  grid <N>  boundary_len <L>
//   #gbdry <s> <g11>
//   source <id>
//   <s> <eta_t...> [<eta_nu>]
//   end
void write_dataset(std::ostream& out, const Dataset& d);
// Error(Parse) with the line number on malformed input.
Dataset read_dataset(std::istream& in);

void save_dataset(const std::string& path, const Dataset& d);
Dataset load_dataset(const std::string& path);

// Truth sidecar: "<id> <x1> ... <xn>" per line.
void write_truth(std::ostream& out, const std::vector<Source>& sources);
std::vector<Source> read_truth(std::istream& in, int dim);
std::vector<Source> load_truth(const std::string& path, int dim);

}  // namespace geoscatter
