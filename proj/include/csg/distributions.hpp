#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "csg/value_function.hpp"

namespace csg {

// A lazy characteristic-function family. Values are produced on demand from
// a draw stream keyed by (seed, coalition digest); nothing is stored, so
// instances scale to hundreds of agents. Parameters default to the constants
// in kDistributionDefaults (distributions.cpp) and may be overridden.
struct DistributionSpec {
  std::string family;
  std::map<std::string, double> params;
};

std::vector<std::string> distribution_names();

// "k=v,k=v" -> overrides; unknown keys for the family are rejected
DistributionSpec parse_distribution_spec(const std::string& family,
                                         const std::string& params_csv);

// JSON config: {"family": "...", "params": {"k": v, ...}}
DistributionSpec load_distribution_config(const std::string& path);

std::shared_ptr<ValueFunction> make_distribution(const DistributionSpec& spec,
                                                 uint32_t n, uint64_t seed);

// The documented per-size mean scaling of a family, used by statistical
// tests: expected value of a size-s coalition under the default parameters.
double distribution_mean_for_size(const DistributionSpec& spec, uint32_t size);

}  // namespace csg
