#pragma once

#include <iosfwd>
#include <vector>

#include "csg/neighbors.hpp"
#include "csg/structure.hpp"
#include "csg/value_function.hpp"

namespace csg {

enum class BridgeStrategy {
  kSplitThenMerge,
  kMergeThenSplit,
  kApproachThenSwap,
  kAllThree,
};

enum class MoveKind { kSplit, kMerge, kSwapStep };

struct BridgeMove {
  MoveKind kind;
  MoveDelta delta;  // coalitions this edge replaces/creates
};

// A walk through the coalition structure graph: nodes run from the source
// (exclusive) to the target (inclusive), moves[i] produces nodes[i], and
// consecutive nodes always differ by exactly one split or one merge (swaps
// appear pre-expanded into their elementary decomposition).
struct BridgePath {
  std::vector<CoalitionStructure> nodes;
  std::vector<BridgeMove> moves;
};

// Ascend to the top node, then merge down to the target. Exactly
// (n - l1) + (n - l2) edges for levels l1, l2. The ascent splits off
// target-aligned blocks first, so the walk passes through the common
// refinement of source and target before shattering it; the descent never
// merges agents that sit in different target coalitions.
BridgePath split_then_merge(const CoalitionStructure& source,
                            const CoalitionStructure& target);

// Merge down to the bottom node, then peel target coalitions back out.
// Exactly (l1 - 1) + (l2 - 1) edges; the split phase never separates agents
// that share a target coalition.
BridgePath merge_then_split(const CoalitionStructure& source,
                            const CoalitionStructure& target);

// Reach a structure with the target's coalition sizes, then repair the
// membership by agent swaps, each expanded into elementary moves. The
// approach uses |l2 - l1| level moves plus, when the size profiles still
// disagree, one split+merge pair per unit of size surplus; swaps follow a
// greedy size-preserving maximum-overlap matching and each swap strictly
// reduces the number of misplaced agents.
BridgePath approach_then_swap(const CoalitionStructure& source,
                              const CoalitionStructure& target);

BridgePath build_bridge_path(BridgeStrategy strategy,
                             const CoalitionStructure& source,
                             const CoalitionStructure& target);

// The engine-facing side of a path execution: where intermediate nodes go
// and how improvements are reported.
class PathSink {
 public:
  virtual ~PathSink() = default;
  virtual double incumbent_value() const = 0;
  virtual void admit_substitute(const CoalitionStructure& node,
                                double value) = 0;
  // called when a node's (incrementally tracked) value beats the incumbent;
  // the sink re-verifies with a fresh evaluation before publishing
  virtual void offer_improvement(const CoalitionStructure& node,
                                 double value) = 0;
};

struct BridgeStats {
  size_t nodes_emitted = 0;   // strict intermediates handed to the sink
  size_t improvements = 0;    // offers that beat the incumbent at offer time
};

// Build the configured path(s) between two structures and stream the strict
// intermediates (neither source nor target) into the sink, valuing nodes
// incrementally edge by edge. kAllThree concatenates all strategies and
// deduplicates by canonical key. Adjacent pairs short-circuit: the only
// node on a direct edge is the target itself, so nothing is emitted.
BridgeStats execute_path_strategy(BridgeStrategy strategy,
                                  const ValueFunction& vf,
                                  const CoalitionStructure& source,
                                  double source_value,
                                  const CoalitionStructure& target,
                                  PathSink& sink);

// one node per line, text structure format
void dump_path(const BridgePath& path, std::ostream& out);

}  // namespace csg
