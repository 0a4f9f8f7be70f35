#include "csg/bridging.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_set>
#include <utility>

#include "csg/errors.hpp"

namespace csg {

namespace {

// Diff of two canonically ordered structures; relies on each coalition's
// lowest member being a unique sort key.
MoveDelta delta_between(const CoalitionStructure& prev,
                        const CoalitionStructure& next) {
  MoveDelta d;
  const auto& a = prev.coalitions();
  const auto& b = next.coalitions();
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (a[i].lowest() < b[j].lowest()) {
      d.removed.push_back(a[i++]);
    } else if (b[j].lowest() < a[i].lowest()) {
      d.added.push_back(b[j++]);
    } else {
      d.removed.push_back(a[i++]);
      d.added.push_back(b[j++]);
    }
  }
  while (i < a.size()) d.removed.push_back(a[i++]);
  while (j < b.size()) d.added.push_back(b[j++]);
  return d;
}

void require_comparable(const CoalitionStructure& source,
                        const CoalitionStructure& target) {
  if (source.n() != target.n()) {
    throw InvalidMoveError("bridge endpoints disagree on the agent universe");
  }
  if (source == target) {
    throw InvalidMoveError("bridge path between identical structures is empty");
  }
}

// agent -> index of its target coalition
std::vector<uint32_t> block_index(const CoalitionStructure& target) {
  std::vector<uint32_t> idx(target.n(), 0);
  for (size_t t = 0; t < target.coalitions().size(); ++t) {
    target.coalitions()[t].for_each_member(
        [&](AgentId a) { idx[a] = static_cast<uint32_t>(t); });
  }
  return idx;
}

size_t index_of_member(const CoalitionStructure& cs, AgentId a) {
  const auto& parts = cs.coalitions();
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].test(a)) return i;
  }
  throw IntegrityError("agent missing from structure");
}

class PathBuilder {
 public:
  explicit PathBuilder(CoalitionStructure start) : cur_(std::move(start)) {}

  const CoalitionStructure& cur() const { return cur_; }

  void apply(CoalitionStructure next, MoveKind kind) {
    path_.moves.push_back({kind, delta_between(cur_, next)});
    path_.nodes.push_back(next);
    cur_ = std::move(next);
  }

  BridgePath finish(const CoalitionStructure& target, const char* what) {
    if (!(cur_ == target)) throw IntegrityError(what);
    return std::move(path_);
  }

 private:
  CoalitionStructure cur_;
  BridgePath path_;
};

// One ascent step toward the top node. Coalitions that straddle several
// target coalitions lose the sub-block of their lowest member first; once
// every coalition sits inside a single target coalition, singletons peel
// off lowest-first. The first phase walks through the common refinement of
// the endpoints, which tends to be the valuable region of the bridge.
void ascend_step(PathBuilder& b, const CoalitionStructure& target,
                 const std::vector<uint32_t>& blk) {
  const auto& parts = b.cur().coalitions();
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() < 2) continue;
    AgentSet piece = parts[i] & target.coalitions()[blk[parts[i].lowest()]];
    if (piece.size() < parts[i].size()) {
      b.apply(b.cur().split(i, piece), MoveKind::kSplit);
      return;
    }
  }
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() >= 2) {
      AgentSet low = AgentSet::single(b.cur().n(), parts[i].lowest());
      b.apply(b.cur().split(i, low), MoveKind::kSplit);
      return;
    }
  }
  throw IntegrityError("ascend_step called at the top node");
}

}  // namespace

BridgePath split_then_merge(const CoalitionStructure& source,
                            const CoalitionStructure& target) {
  require_comparable(source, target);
  const uint32_t n = source.n();
  const std::vector<uint32_t> blk = block_index(target);

  PathBuilder b(source);
  while (b.cur().level() < n) ascend_step(b, target, blk);

  // rebuild each target coalition by absorbing its members lowest-first
  for (const AgentSet& block : target.coalitions()) {
    if (block.size() < 2) continue;
    const AgentId anchor = block.lowest();
    block.for_each_member([&](AgentId a) {
      if (a == anchor) return;
      size_t i = index_of_member(b.cur(), anchor);
      size_t j = index_of_member(b.cur(), a);
      b.apply(b.cur().merge(std::min(i, j), std::max(i, j)), MoveKind::kMerge);
    });
  }
  BridgePath path = b.finish(target, "split_then_merge missed its target");
  const size_t expect =
      (n - source.level()) + (n - target.level());
  if (path.moves.size() != expect) {
    throw IntegrityError("split_then_merge emitted an unexpected path length");
  }
  return path;
}

BridgePath merge_then_split(const CoalitionStructure& source,
                            const CoalitionStructure& target) {
  require_comparable(source, target);
  const std::vector<uint32_t> blk = block_index(target);

  PathBuilder b(source);
  while (b.cur().level() > 1) {
    b.apply(b.cur().merge(0, 1), MoveKind::kMerge);
  }
  // peel whole target coalitions off the remaining mass; ascend_step splits
  // along target boundaries as long as some coalition straddles one, which
  // holds until the target itself is reached
  while (b.cur().level() < target.level()) ascend_step(b, target, blk);

  BridgePath path = b.finish(target, "merge_then_split missed its target");
  const size_t expect = (source.level() - 1) + (target.level() - 1);
  if (path.moves.size() != expect) {
    throw IntegrityError("merge_then_split emitted an unexpected path length");
  }
  return path;
}

namespace {

// Split+merge pairs that reshape the current structure until its coalition
// size profile matches the target's. Coalitions and target sizes are paired
// off in decreasing-size order; the first oversized coalition donates its
// lowest member to the first undersized one.
void align_sizes(PathBuilder& b, const CoalitionStructure& target) {
  std::vector<uint32_t> want;
  want.reserve(target.level());
  for (const AgentSet& t : target.coalitions()) want.push_back(t.size());
  std::sort(want.begin(), want.end(), std::greater<>());

  while (true) {
    const auto& parts = b.cur().coalitions();
    std::vector<size_t> order(parts.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
      return parts[x].size() > parts[y].size();
    });

    size_t donor = parts.size(), taker = parts.size();
    for (size_t r = 0; r < order.size(); ++r) {
      uint32_t have = parts[order[r]].size();
      if (donor == parts.size() && have > want[r]) donor = order[r];
      if (taker == parts.size() && have < want[r]) taker = order[r];
    }
    if (donor == parts.size() && taker == parts.size()) return;
    if (donor == parts.size() || taker == parts.size()) {
      throw IntegrityError("size alignment found no donor/taker pair");
    }

    const AgentId moved = parts[donor].lowest();
    AgentSet single = AgentSet::single(b.cur().n(), moved);
    const AgentSet taker_set = parts[taker];
    b.apply(b.cur().split(donor, single), MoveKind::kSplit);
    size_t i = index_of_member(b.cur(), moved);
    // the split may have renumbered the taker; find it again by identity
    size_t j = 0;
    while (!(b.cur().coalitions()[j] == taker_set)) ++j;
    b.apply(b.cur().merge(std::min(i, j), std::max(i, j)), MoveKind::kMerge);
  }
}

}  // namespace

BridgePath approach_then_swap(const CoalitionStructure& source,
                              const CoalitionStructure& target) {
  require_comparable(source, target);
  const uint32_t n = source.n();
  const std::vector<uint32_t> blk = block_index(target);

  PathBuilder b(source);

  // level approach
  while (b.cur().level() < target.level()) ascend_step(b, target, blk);
  while (b.cur().level() > target.level()) {
    b.apply(b.cur().merge(0, 1), MoveKind::kMerge);
  }
  align_sizes(b, target);

  // Pair every coalition with a same-size target coalition, preferring large
  // overlaps; canonical order on both sides breaks ties.
  const size_t k = target.level();
  std::vector<AgentSet> cur_of(k), tgt_of(k);
  {
    std::vector<bool> taken(k, false);
    const auto& parts = b.cur().coalitions();
    for (size_t i = 0; i < k; ++i) {
      size_t best = k;
      uint32_t best_overlap = 0;
      for (size_t t = 0; t < k; ++t) {
        if (taken[t]) continue;
        if (target.coalitions()[t].size() != parts[i].size()) continue;
        uint32_t ov = (parts[i] & target.coalitions()[t]).size();
        if (best == k || ov > best_overlap) {
          best = t;
          best_overlap = ov;
        }
      }
      if (best == k) throw IntegrityError("size profiles disagree after alignment");
      taken[best] = true;
      cur_of[i] = parts[i];
      tgt_of[i] = target.coalitions()[best];
    }
  }

  // Swap misplaced agents home, lowest agent first. Each swap either runs
  // through its elementary decomposition or, when both coalitions are
  // singletons, reduces to re-pairing two slots with no structural move.
  while (true) {
    AgentId a = n;
    size_t from = k, to = k;
    for (size_t s = 0; s < k; ++s) {
      AgentSet misplaced = cur_of[s] - tgt_of[s];
      if (!misplaced.empty() && misplaced.lowest() < a) {
        a = misplaced.lowest();
        from = s;
      }
    }
    if (a == n) break;
    for (size_t s = 0; s < k; ++s) {
      if (tgt_of[s].test(a)) {
        to = s;
        break;
      }
    }
    if (to == k || to == from) throw IntegrityError("swap target slot missing");
    const AgentId back = (cur_of[to] - tgt_of[to]).lowest();

    if (cur_of[from].size() == 1 && cur_of[to].size() == 1) {
      std::swap(tgt_of[from], tgt_of[to]);
      continue;
    }

    size_t i = index_of_member(b.cur(), a);
    size_t j = index_of_member(b.cur(), back);
    for (const CoalitionStructure& step : b.cur().swap_decomposition(i, a, j, back)) {
      b.apply(step, MoveKind::kSwapStep);
    }
    cur_of[from].erase(a);
    cur_of[from].insert(back);
    cur_of[to].erase(back);
    cur_of[to].insert(a);
  }

  return b.finish(target, "approach_then_swap missed its target");
}

BridgePath build_bridge_path(BridgeStrategy strategy,
                             const CoalitionStructure& source,
                             const CoalitionStructure& target) {
  switch (strategy) {
    case BridgeStrategy::kSplitThenMerge:
      return split_then_merge(source, target);
    case BridgeStrategy::kMergeThenSplit:
      return merge_then_split(source, target);
    case BridgeStrategy::kApproachThenSwap:
      return approach_then_swap(source, target);
    case BridgeStrategy::kAllThree:
      break;
  }
  throw ConfigError("build_bridge_path needs a single concrete strategy");
}

BridgeStats execute_path_strategy(BridgeStrategy strategy,
                                  const ValueFunction& vf,
                                  const CoalitionStructure& source,
                                  double source_value,
                                  const CoalitionStructure& target,
                                  PathSink& sink) {
  BridgeStats stats;
  if (structures_adjacent(source, target)) return stats;

  std::vector<BridgeStrategy> order;
  if (strategy == BridgeStrategy::kAllThree) {
    order = {BridgeStrategy::kSplitThenMerge, BridgeStrategy::kMergeThenSplit,
             BridgeStrategy::kApproachThenSwap};
  } else {
    order = {strategy};
  }

  const Key128 source_key = source.canonical_key();
  const Key128 target_key = target.canonical_key();
  std::unordered_set<Key128, Key128Hash> seen;

  for (BridgeStrategy s : order) {
    BridgePath path = build_bridge_path(s, source, target);
    double running = source_value;
    for (size_t e = 0; e < path.moves.size(); ++e) {
      for (const AgentSet& c : path.moves[e].delta.removed) {
        running -= vf.value(c);
      }
      for (const AgentSet& c : path.moves[e].delta.added) {
        running += vf.value(c);
      }
      const CoalitionStructure& node = path.nodes[e];
      Key128 key = node.canonical_key();
      if (key == source_key || key == target_key) continue;
      if (!seen.insert(key).second) continue;
      sink.admit_substitute(node, running);
      ++stats.nodes_emitted;
      if (running > sink.incumbent_value()) {
        sink.offer_improvement(node, running);
        ++stats.improvements;
      }
    }
  }
  return stats;
}

void dump_path(const BridgePath& path, std::ostream& out) {
  for (const CoalitionStructure& node : path.nodes) {
    out << node.to_string() << "\n";
  }
}

}  // namespace csg
