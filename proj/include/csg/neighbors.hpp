#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include <boost/container/small_vector.hpp>

#include "csg/structure.hpp"

namespace csg {

// Coalitions replaced/created by one elementary move. A split removes one
// coalition and adds two; a merge removes two and adds one. Value deltas
// follow directly: v(child) = v(parent) - sum v(removed) + sum v(added).
struct MoveDelta {
  boost::container::small_vector<AgentSet, 2> removed;
  boost::container::small_vector<AgentSet, 2> added;
};

// Child visitor; return false to stop the stream early.
using ChildVisitor =
    std::function<bool(const CoalitionStructure&, const MoveDelta&)>;

// Distinct split children: sum over coalitions of 2^(|C|-1) - 1. Throws
// CapacityError when a coalition has more than 64 members (count would
// overflow); the streaming enumerators below have no such limit because
// callers stop them early.
uint64_t split_child_count(const CoalitionStructure& cs);

// Distinct merge children: level * (level - 1) / 2.
uint64_t merge_child_count(const CoalitionStructure& cs);

// Deterministic order: coalitions in canonical order; within a coalition,
// the split part always contains the coalition's lowest member (so each
// unordered split is emitted once) and runs in increasing subset-mask order
// over the remaining members.
void for_each_split_child(const CoalitionStructure& cs, const ChildVisitor& fn);

// Deterministic order: pairs (i, j) with i < j, lexicographic.
void for_each_merge_child(const CoalitionStructure& cs, const ChildVisitor& fn);

// Splits first, then merges.
void for_each_child(const CoalitionStructure& cs, const ChildVisitor& fn);

struct RandomChild {
  CoalitionStructure child;
  MoveDelta delta;
};

// Random one-move neighbor. A slot is drawn uniformly among the splittable
// coalitions plus all merge pairs; a split slot then draws a uniform random
// bipartition that keeps the coalition's lowest member in the first part.
// Large coalitions therefore do not dominate the draw by their 2^(|C|-1)
// split count. Returns nullopt only when the structure has no neighbors
// (single agent).
std::optional<RandomChild> sample_random_child(const CoalitionStructure& cs,
                                               std::mt19937_64& rng);

// True when b is one split or one merge away from a.
bool structures_adjacent(const CoalitionStructure& a,
                         const CoalitionStructure& b);

}  // namespace csg
