#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "csg/bridging.hpp"
#include "csg/errors.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace csg;
using testutil::to_cs;

namespace {

void check_path(const BridgePath& path, const CoalitionStructure& source,
                const CoalitionStructure& target) {
  REQUIRE(!path.nodes.empty());
  REQUIRE(path.moves.size() == path.nodes.size());
  CHECK(path.nodes.back() == target);
  const CoalitionStructure* prev = &source;
  for (size_t i = 0; i < path.nodes.size(); ++i) {
    const CoalitionStructure& cur = path.nodes[i];
    CHECK(structures_adjacent(*prev, cur));
    int dl = int(cur.level()) - int(prev->level());
    CHECK(std::abs(dl) == 1);
    if (path.moves[i].kind == MoveKind::kSplit) CHECK(dl == 1);
    if (path.moves[i].kind == MoveKind::kMerge) CHECK(dl == -1);
    // the delta names exactly the replaced and created coalitions
    for (const AgentSet& c : path.moves[i].delta.removed) {
      bool found = false;
      for (const AgentSet& pc : prev->coalitions()) found |= (pc == c);
      CHECK(found);
    }
    for (const AgentSet& c : path.moves[i].delta.added) {
      bool found = false;
      for (const AgentSet& cc : cur.coalitions()) found |= (cc == c);
      CHECK(found);
    }
    prev = &cur;
  }
}

CoalitionStructure random_cs(uint32_t n, std::mt19937_64& rng) {
  std::vector<std::vector<AgentId>> blocks;
  for (AgentId a = 0; a < n; ++a) {
    std::uniform_int_distribution<size_t> pick(0, blocks.size());
    size_t slot = pick(rng);
    if (slot == blocks.size()) blocks.push_back({a});
    else blocks[slot].push_back(a);
  }
  return to_cs(n, blocks);
}

struct CollectSink final : public PathSink {
  double incumbent = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<CoalitionStructure, double>> admitted;
  std::vector<std::pair<CoalitionStructure, double>> offers;

  double incumbent_value() const override { return incumbent; }
  void admit_substitute(const CoalitionStructure& node, double value) override {
    admitted.emplace_back(node, value);
  }
  void offer_improvement(const CoalitionStructure& node, double value) override {
    offers.emplace_back(node, value);
  }
};

}  // namespace

TEST_CASE("ascending bridge passes through the aligned split first") {
  auto source = to_cs(8, {{0, 3}, {1, 6}, {2, 4, 5, 7}});
  auto target = to_cs(8, {{0, 3}, {1}, {2}, {4, 5, 7}, {6}});
  BridgePath path = split_then_merge(source, target);
  check_path(path, source, target);
  // first move cuts {1,6} along the target boundary
  CHECK(path.nodes.front() == to_cs(8, {{0, 3}, {1}, {2, 4, 5, 7}, {6}}));
  // (n - l1) + (n - l2) edges
  CHECK(path.moves.size() == (8 - 3) + (8 - 5));
}

TEST_CASE("bridge constructors refuse unusable pairs") {
  auto a = to_cs(4, {{0, 1}, {2, 3}});
  CHECK_THROWS_AS(split_then_merge(a, a), InvalidMoveError);
  CHECK_THROWS_AS(merge_then_split(a, a), InvalidMoveError);
  CHECK_THROWS_AS(approach_then_swap(a, a), InvalidMoveError);
  auto b5 = CoalitionStructure::bottom(5);
  CHECK_THROWS_AS(split_then_merge(a, b5), InvalidMoveError);
  // the combined mode only makes sense for the executor, not a single path
  CHECK_THROWS_AS(build_bridge_path(BridgeStrategy::kAllThree,
                                    CoalitionStructure::top(4), a),
                  ConfigError);
}

TEST_CASE("all strategies connect every ordered pair of five-agent structures") {
  const uint32_t n = 5;
  std::vector<CoalitionStructure> all;
  for (const auto& p : testutil::ref_partitions(n)) all.push_back(to_cs(n, p));
  REQUIRE(all.size() == 52);

  for (const auto& src : all) {
    for (const auto& tgt : all) {
      if (src == tgt) continue;
      const uint32_t l1 = src.level(), l2 = tgt.level();

      BridgePath stm = split_then_merge(src, tgt);
      check_path(stm, src, tgt);
      CHECK(stm.moves.size() == (n - l1) + (n - l2));

      BridgePath mts = merge_then_split(src, tgt);
      check_path(mts, src, tgt);
      CHECK(mts.moves.size() == (l1 - 1) + (l2 - 1));

      // one of the two always fits in n-1 edges
      CHECK(std::min(stm.moves.size(), mts.moves.size()) <= size_t(n - 1));

      BridgePath ats = approach_then_swap(src, tgt);
      check_path(ats, src, tgt);
    }
  }
}

TEST_CASE("random ten-agent pairs bridge cleanly") {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 200; ++iter) {
    auto src = random_cs(10, rng);
    auto tgt = random_cs(10, rng);
    if (src == tgt) continue;
    check_path(split_then_merge(src, tgt), src, tgt);
    check_path(merge_then_split(src, tgt), src, tgt);
    check_path(approach_then_swap(src, tgt), src, tgt);
  }
}

TEST_CASE("swap repairs preserve the size profile after the approach") {
  // same level, same sizes, different memberships: pure swap territory
  auto src = to_cs(6, {{0, 1, 2}, {3, 4, 5}});
  auto tgt = to_cs(6, {{0, 4, 5}, {1, 2, 3}});
  BridgePath path = approach_then_swap(src, tgt);
  check_path(path, src, tgt);
  for (const BridgeMove& m : path.moves) CHECK(m.kind == MoveKind::kSwapStep);
}

TEST_CASE("path execution feeds intermediates to the sink") {
  auto vf = testutil::random_table(6, 4);
  auto src = CoalitionStructure::bottom(6);
  auto tgt = CoalitionStructure::top(6);
  BridgePath path = split_then_merge(src, tgt);

  CollectSink sink;
  sink.incumbent = 1e18;  // nothing can improve
  BridgeStats st = execute_path_strategy(BridgeStrategy::kSplitThenMerge, vf,
                                         src, vf.structure_value(src), tgt, sink);
  // strict intermediates only: source and target never reach the sink
  CHECK(st.nodes_emitted == sink.admitted.size());
  CHECK(st.improvements == 0);
  for (const auto& [node, value] : sink.admitted) {
    CHECK_FALSE(node == src);
    CHECK_FALSE(node == tgt);
    CHECK(value == doctest::Approx(vf.structure_value(node)));
  }
}

TEST_CASE("improvements are offered when the running value beats the incumbent") {
  // target value dwarfs everything, so late path nodes beat a low incumbent
  std::vector<double> values(1 << 4, 1.0);
  values[0b1111] = 100.0;
  TableValueFunction vf(4, std::move(values));
  auto src = CoalitionStructure::top(4);
  auto tgt = to_cs(4, {{0, 1, 2}, {3}});  // two merges away

  CollectSink sink;
  sink.incumbent = 4.0;  // the source's own value
  BridgeStats st = execute_path_strategy(BridgeStrategy::kMergeThenSplit, vf,
                                         src, 4.0, tgt, sink);
  CHECK(st.nodes_emitted > 0);
  // the walk passes the grand coalition (value 100) en route
  CHECK(st.improvements > 0);
  REQUIRE(!sink.offers.empty());
  CHECK(sink.offers[0].second > 4.0);
}

TEST_CASE("adjacent pairs short-circuit to nothing") {
  auto vf = testutil::random_table(5, 8);
  auto src = CoalitionStructure::bottom(5);
  auto tgt = src.split(0, AgentSet::of(5, {0, 2}));
  CollectSink sink;
  BridgeStats st = execute_path_strategy(BridgeStrategy::kAllThree, vf, src,
                                         vf.structure_value(src), tgt, sink);
  CHECK(st.nodes_emitted == 0);
  CHECK(sink.admitted.empty());
}

TEST_CASE("running all three strategies deduplicates shared nodes") {
  auto vf = testutil::random_table(6, 12);
  std::mt19937_64 rng(9);
  for (int iter = 0; iter < 20; ++iter) {
    auto src = random_cs(6, rng);
    auto tgt = random_cs(6, rng);
    if (src == tgt || structures_adjacent(src, tgt)) continue;
    CollectSink sink;
    sink.incumbent = 1e18;
    execute_path_strategy(BridgeStrategy::kAllThree, vf, src,
                          vf.structure_value(src), tgt, sink);
    std::set<Key128> keys;
    for (const auto& [node, value] : sink.admitted) {
      CHECK(keys.insert(node.canonical_key()).second);
      CHECK_FALSE(node == src);
      CHECK_FALSE(node == tgt);
    }
  }
}

TEST_CASE("dump writes one node per line") {
  auto src = CoalitionStructure::bottom(3);
  auto tgt = CoalitionStructure::top(3);
  BridgePath path = split_then_merge(src, tgt);
  std::ostringstream out;
  dump_path(path, out);
  std::string text = out.str();
  size_t lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == path.nodes.size());
  CHECK(text.find(tgt.to_string()) != std::string::npos);
}
