#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csg/agent_set.hpp"
#include "csg/errors.hpp"
#include "csg/hashing.hpp"

namespace csg {

// Restricted-growth encoding of a partition: packed[a] = block id of agent a,
// blocks numbered by first appearance. One representation per partition and
// ~2 bytes per agent, so search lists store this form instead of full masks.
using PackedStructure = std::vector<uint16_t>;

Key128 packed_key(const PackedStructure& p);

// A partition of the agent set {0..n-1} into nonempty coalitions, kept in
// canonical order (sorted by lowest member). Instances are immutable: every
// move returns a new structure.
class CoalitionStructure {
 public:
  // grand coalition; level 1
  static CoalitionStructure bottom(uint32_t n);
  // all singletons; level n
  static CoalitionStructure top(uint32_t n);
  // validates that `parts` partitions {0..n-1}
  static CoalitionStructure make(uint32_t n, std::vector<AgentSet> parts);
  static CoalitionStructure unpack(const PackedStructure& packed);
  // text form "{{0,3},{1,2}}"; n is inferred from the members
  static CoalitionStructure parse(const std::string& text);

  uint32_t n() const { return n_; }
  uint32_t level() const { return static_cast<uint32_t>(coalitions_.size()); }
  const std::vector<AgentSet>& coalitions() const { return coalitions_; }

  // Split coalition `target` into (part, target \ part); level increases by 1.
  // `part` must be a nonempty strict subset of the target coalition.
  CoalitionStructure split(size_t target, const AgentSet& part) const;

  // Merge coalitions i and j; level decreases by 1.
  CoalitionStructure merge(size_t i, size_t j) const;

  // Exchange agent a (in coalition i) with agent b (in coalition j); level
  // is unchanged. Rejects i == j and the two-singleton exchange, which would
  // reproduce the identical partition.
  CoalitionStructure swap_agents(size_t i, AgentId a, size_t j,
                                 AgentId b) const;

  // The swap expressed as elementary moves: four steps (split, merge, split,
  // merge) when both coalitions have two or more members, two steps when one
  // side is a singleton. The last element equals swap_agents(...).
  std::vector<CoalitionStructure> swap_decomposition(size_t i, AgentId a,
                                                     size_t j,
                                                     AgentId b) const;

  PackedStructure pack() const;
  Key128 canonical_key() const { return packed_key(pack()); }
  std::string to_string() const;

  bool operator==(const CoalitionStructure& o) const {
    return n_ == o.n_ && coalitions_ == o.coalitions_;
  }

  // lexicographic order on the canonical form; total, stable, and usable as
  // a shared tie-break between independent optimizers
  static bool lex_less(const CoalitionStructure& a,
                       const CoalitionStructure& b);

 private:
  CoalitionStructure(uint32_t n, std::vector<AgentSet> sorted);

  uint32_t n_ = 0;
  std::vector<AgentSet> coalitions_;
};

}  // namespace csg
