#include "csg/oracle.hpp"

#include <algorithm>
#include <bit>
#include <vector>

namespace csg {

namespace {

// member-list lexicographic order on bitmasks: {0} < {0,1} < {0,2}
bool mask_lex_less(uint64_t a, uint64_t b) {
  uint64_t d = a ^ b;
  if (!d) return false;
  uint64_t low = d & (~d + 1);
  uint64_t above = ~(low - 1) & ~low;  // bits strictly above the first diff
  if (a & low) return (b & above) != 0;  // a's next member comes first unless
                                         // b is already exhausted
  return (a & above) == 0;               // a is a proper prefix of b
}

AgentSet mask_to_set(uint32_t n, uint64_t mask) {
  AgentSet s(n);
  while (mask) {
    s.insert(static_cast<AgentId>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return s;
}

}  // namespace

OracleResult optimal_dp(const ValueFunction& vf) {
  const uint32_t n = vf.agent_count();
  if (n == 0 || n > kMaxTableAgents) {
    throw CapacityError("optimal_dp: instance beyond table capacity");
  }

  // flatten values for mask addressing
  std::vector<double> v;
  if (const auto* table = dynamic_cast<const TableValueFunction*>(&vf)) {
    v.resize(size_t(1) << n);
    for (uint64_t m = 1; m < v.size(); ++m) v[m] = table->value_by_mask(m);
  } else {
    TableValueFunction t = TableValueFunction::materialize(vf);
    v.resize(size_t(1) << n);
    for (uint64_t m = 1; m < v.size(); ++m) v[m] = t.value_by_mask(m);
  }

  const uint64_t full = (uint64_t(1) << n) - 1;

  // f[S] = best value of any partition of S. First-block form: the block T
  // containing S's lowest agent is chosen directly, so f[S] is literally
  // v[T] + f[S \ T] for the winning T. Reconstruction can then test
  // candidates with bitwise float equality instead of a tolerance.
  std::vector<double> f(full + 1, 0.0);
  for (uint64_t S = 1; S <= full; ++S) {
    uint64_t b = S & (~S + 1);
    uint64_t U = S ^ b;
    double best = v[S];  // T = S
    // T = b | V over proper subsets V of U
    if (U) {
      for (uint64_t V = (U - 1) & U;; V = (V - 1) & U) {
        double cand = v[b | V] + f[S ^ (b | V)];
        if (cand > best) best = cand;
        if (V == 0) break;
      }
    }
    f[S] = best;
  }

  // peel off lex-smallest first blocks; any value tie resolves toward the
  // lexicographically smaller block, which yields the lex-min structure
  std::vector<AgentSet> parts;
  uint64_t R = full;
  while (R) {
    uint64_t b = R & (~R + 1);
    uint64_t U = R ^ b;
    uint64_t best_block = 0;
    for (uint64_t V = U;; V = (V - 1) & U) {
      uint64_t B = b | V;
      if (v[B] + f[R ^ B] == f[R]) {
        if (best_block == 0 || mask_lex_less(B, best_block)) best_block = B;
      }
      if (V == 0) break;
    }
    parts.push_back(mask_to_set(n, best_block));
    R ^= best_block;
  }

  CoalitionStructure opt = CoalitionStructure::make(n, std::move(parts));
  return OracleResult{opt, vf.structure_value(opt)};
}

void for_each_partition(
    uint32_t n, const std::function<bool(const CoalitionStructure&)>& fn) {
  if (n == 0 || n > 13) {
    throw CapacityError("for_each_partition: supported for 1..13 agents");
  }
  std::vector<uint16_t> rgs(n, 0);
  std::vector<uint16_t> maxval(n, 0);  // maxval[i] = 1 + max(rgs[0..i-1])
  maxval[0] = 0;
  while (true) {
    for (uint32_t i = 1; i < n; ++i) {
      maxval[i] = std::max<uint16_t>(maxval[i - 1],
                                     static_cast<uint16_t>(rgs[i - 1] + 1));
    }
    if (!fn(CoalitionStructure::unpack(rgs))) return;
    // advance: rightmost position that may still grow
    int i = static_cast<int>(n) - 1;
    while (i > 0 && rgs[i] >= maxval[i]) {
      rgs[i] = 0;
      --i;
    }
    if (i == 0) return;
    ++rgs[i];
  }
}

uint64_t partition_count(uint32_t n) {
  if (n == 0 || n > 25) {
    throw CapacityError("partition_count: supported for 1..25 agents");
  }
  // Bell triangle; the count for n agents is the last entry of row n
  std::vector<uint64_t> row = {1};
  for (uint32_t i = 1; i < n; ++i) {
    std::vector<uint64_t> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (uint64_t x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.back();
}

double solution_quality(double found, double optimum) {
  if (!(optimum > 0.0)) {
    throw UndefinedMetricError("solution_quality: nonpositive optimum");
  }
  if (found < 0.0) {
    throw UndefinedMetricError("solution_quality: negative found value");
  }
  if (found > optimum * (1.0 + 1e-12)) {
    throw IntegrityError("solution_quality: found value exceeds the optimum");
  }
  return std::min(1.0, found / optimum);
}

std::map<std::string, double> gain_rates(
    const std::map<std::string, double>& value_by_algorithm,
    double singleton_value) {
  if (!(singleton_value > 0.0)) {
    throw UndefinedMetricError("gain_rates: nonpositive singleton value");
  }
  if (value_by_algorithm.empty()) {
    throw UndefinedMetricError("gain_rates: no algorithms");
  }
  double best = 0.0;
  for (const auto& [name, v] : value_by_algorithm) {
    best = std::max(best, v / singleton_value);
  }
  if (!(best > 0.0)) {
    throw UndefinedMetricError("gain_rates: nonpositive best gain");
  }
  std::map<std::string, double> out;
  for (const auto& [name, v] : value_by_algorithm) {
    out[name] = (v / singleton_value) / best;
  }
  return out;
}

}  // namespace csg
