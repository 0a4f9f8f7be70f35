#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "csg/value_function.hpp"

namespace csg {

struct OracleResult {
  CoalitionStructure optimum;
  double value;  // always recomputed as structure_value(optimum)
};

// Exact optimum over all coalition structures by subset dynamic programming
// (first-block recurrence, O(3^n)); capacity-limited to table-materializable
// instances (n <= 25; practical well below that). When several structures
// attain the optimum the lexicographically smallest canonical form is
// returned, a tie-break that independent optimizers can reproduce.
OracleResult optimal_dp(const ValueFunction& vf);

// Visit every partition of {0..n-1} in restricted-growth-string order.
// Return false from the visitor to stop. Guarded to n <= 13 (Bell(13) is
// ~27.6M; beyond that enumeration is not a usable oracle).
void for_each_partition(uint32_t n,
                        const std::function<bool(const CoalitionStructure&)>& fn);

// Bell number via the Bell triangle; n <= 25 (fits in uint64).
uint64_t partition_count(uint32_t n);

// found / optimum. Rejects nonpositive optima and negative found values;
// a found value above the optimum is an integrity failure, not a metric.
double solution_quality(double found, double optimum);

// Per-algorithm gains over acting alone, normalized by the best algorithm:
// gain_i = (v_i / singleton) / max_j (v_j / singleton). Rejects nonpositive
// singleton values and empty or nonpositive-best inputs.
std::map<std::string, double> gain_rates(
    const std::map<std::string, double>& value_by_algorithm,
    double singleton_value);

}  // namespace csg
