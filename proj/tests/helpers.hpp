#pragma once

// Reference implementations kept deliberately separate from the library code:
// partitions by recursive insertion, neighbors by brute-force enumeration,
// best-structure search by scanning every partition. Slow and obvious on
// purpose; tests compare the fast code against these.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "csg/hashing.hpp"
#include "csg/structure.hpp"
#include "csg/value_function.hpp"

namespace testutil {

using Blocks = std::vector<std::vector<csg::AgentId>>;

// every partition of {0..n-1}: insert agent k into each existing block or a
// new one, recursively
inline void ref_partitions_rec(uint32_t n, uint32_t next, Blocks& cur,
                               std::vector<Blocks>& out) {
  if (next == n) {
    out.push_back(cur);
    return;
  }
  for (size_t b = 0; b < cur.size(); ++b) {
    cur[b].push_back(next);
    ref_partitions_rec(n, next + 1, cur, out);
    cur[b].pop_back();
  }
  cur.push_back({next});
  ref_partitions_rec(n, next + 1, cur, out);
  cur.pop_back();
}

inline std::vector<Blocks> ref_partitions(uint32_t n) {
  std::vector<Blocks> out;
  Blocks cur;
  ref_partitions_rec(n, 0, cur, out);
  for (Blocks& p : out) {
    for (auto& b : p) std::sort(b.begin(), b.end());
    std::sort(p.begin(), p.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
  }
  return out;
}

inline csg::CoalitionStructure to_cs(uint32_t n, const Blocks& blocks) {
  std::vector<csg::AgentSet> parts;
  for (const auto& b : blocks) {
    csg::AgentSet s(n);
    for (csg::AgentId a : b) s.insert(a);
    parts.push_back(std::move(s));
  }
  return csg::CoalitionStructure::make(n, std::move(parts));
}

inline Blocks to_blocks(const csg::CoalitionStructure& cs) {
  Blocks out;
  for (const csg::AgentSet& c : cs.coalitions()) out.push_back(c.members());
  return out;
}

// all one-move neighbors as canonical keys, via brute force over subsets and
// pairs
inline std::set<csg::Key128> ref_neighbor_keys(const csg::CoalitionStructure& cs) {
  std::set<csg::Key128> keys;
  const uint32_t n = cs.n();
  Blocks blocks = to_blocks(cs);
  for (size_t i = 0; i < blocks.size(); ++i) {
    const auto& members = blocks[i];
    const size_t k = members.size();
    if (k < 2) continue;
    // position masks that keep the first member in the departing part
    for (uint64_t mask = 1; mask < (1ull << k); mask += 2) {
      if (mask == (1ull << k) - 1) continue;
      Blocks next;
      std::vector<csg::AgentId> part, rest;
      for (size_t p = 0; p < k; ++p) {
        (mask >> p & 1 ? part : rest).push_back(members[p]);
      }
      for (size_t j = 0; j < blocks.size(); ++j) {
        if (j != i) next.push_back(blocks[j]);
      }
      next.push_back(part);
      next.push_back(rest);
      keys.insert(to_cs(n, next).canonical_key());
    }
  }
  for (size_t i = 0; i < blocks.size(); ++i) {
    for (size_t j = i + 1; j < blocks.size(); ++j) {
      Blocks next;
      std::vector<csg::AgentId> merged = blocks[i];
      merged.insert(merged.end(), blocks[j].begin(), blocks[j].end());
      std::sort(merged.begin(), merged.end());
      for (size_t t = 0; t < blocks.size(); ++t) {
        if (t != i && t != j) next.push_back(blocks[t]);
      }
      next.push_back(merged);
      keys.insert(to_cs(n, next).canonical_key());
    }
  }
  return keys;
}

// value of a partition summed block by block in canonical order
inline double ref_value(const csg::ValueFunction& vf, uint32_t n,
                        const Blocks& blocks) {
  double total = 0;
  for (const auto& b : blocks) {
    csg::AgentSet s(n);
    for (csg::AgentId a : b) s.insert(a);
    total += vf.value(s);
  }
  return total;
}

inline bool blocks_lex_less(const Blocks& a, const Blocks& b) {
  return a < b;  // vectors compare lexicographically; blocks are canonical
}

// best partition by full scan; ties resolved toward the lexicographically
// smallest canonical form
struct RefBest {
  Blocks blocks;
  double value;
};

inline RefBest ref_best(const csg::ValueFunction& vf, uint32_t n) {
  RefBest best{{}, 0};
  bool first = true;
  for (const Blocks& p : ref_partitions(n)) {
    double v = ref_value(vf, n, p);
    if (first || v > best.value ||
        (v == best.value && blocks_lex_less(p, best.blocks))) {
      best = {p, v};
      first = false;
    }
  }
  return best;
}

inline csg::TableValueFunction random_table(uint32_t n, uint64_t seed,
                                            double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> values(size_t(1) << n, 0.0);
  for (size_t m = 1; m < values.size(); ++m) values[m] = dist(rng);
  return csg::TableValueFunction(n, std::move(values));
}

// small integer values force exact ties, which is what tie-break tests need
inline csg::TableValueFunction int_table(uint32_t n, uint64_t seed,
                                         int max_value = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, max_value);
  std::vector<double> values(size_t(1) << n, 0.0);
  for (size_t m = 1; m < values.size(); ++m) {
    values[m] = static_cast<double>(dist(rng));
  }
  return csg::TableValueFunction(n, std::move(values));
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "csgtest-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace testutil
