#include <map>
#include <random>
#include <set>

#include "csg/errors.hpp"
#include "csg/neighbors.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace csg;
using testutil::to_cs;

namespace {

std::set<Key128> stream_keys(const CoalitionStructure& cs) {
  std::set<Key128> keys;
  for_each_child(cs, [&](const CoalitionStructure& child, const MoveDelta&) {
    keys.insert(child.canonical_key());
    return true;
  });
  return keys;
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

}  // namespace

TEST_CASE("child counts match the closed forms and the enumeration") {
  auto grand = CoalitionStructure::bottom(4);
  CHECK(split_child_count(grand) == 7);  // 2^3 - 1
  CHECK(merge_child_count(grand) == 0);

  auto singles = CoalitionStructure::top(4);
  CHECK(split_child_count(singles) == 0);
  CHECK(merge_child_count(singles) == 6);  // C(4,2)

  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 100; ++iter) {
    uint32_t n = 2 + rng() % 7;  // up to 8 agents
    auto cs = random_cs(n, rng);
    size_t splits = 0, merges = 0;
    for_each_split_child(cs, [&](const CoalitionStructure&, const MoveDelta&) {
      ++splits;
      return true;
    });
    for_each_merge_child(cs, [&](const CoalitionStructure&, const MoveDelta&) {
      ++merges;
      return true;
    });
    CHECK(splits == split_child_count(cs));
    CHECK(merges == merge_child_count(cs));
    CHECK(stream_keys(cs) == testutil::ref_neighbor_keys(cs));
  }
}

TEST_CASE("the child stream is deterministic and stoppable") {
  auto cs = to_cs(5, {{0, 1, 2}, {3, 4}});
  std::vector<std::string> first_pass, second_pass;
  for_each_child(cs, [&](const CoalitionStructure& c, const MoveDelta&) {
    first_pass.push_back(c.to_string());
    return true;
  });
  for_each_child(cs, [&](const CoalitionStructure& c, const MoveDelta&) {
    second_pass.push_back(c.to_string());
    return true;
  });
  CHECK(first_pass == second_pass);
  CHECK(first_pass.size() == split_child_count(cs) + merge_child_count(cs));

  size_t seen = 0;
  for_each_child(cs, [&](const CoalitionStructure&, const MoveDelta&) {
    return ++seen < 3;
  });
  CHECK(seen == 3);
}

TEST_CASE("split parts keep the parent coalition's lowest member") {
  auto cs = to_cs(5, {{0, 1, 2}, {3, 4}});
  for_each_split_child(cs, [&](const CoalitionStructure&, const MoveDelta& d) {
    REQUIRE(d.removed.size() == 1);
    REQUIRE(d.added.size() == 2);
    // the departing part is listed second and owns the parent's lowest member
    CHECK(d.added[1].test(d.removed[0].lowest()));
    CHECK((d.added[0] | d.added[1]) == d.removed[0]);
    CHECK_FALSE(d.added[0].intersects(d.added[1]));
    return true;
  });
}

TEST_CASE("deltas price children consistently with a fresh evaluation") {
  auto vf = testutil::int_table(7, 21);  // integer values: sums are exact
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 30; ++iter) {
    auto cs = random_cs(7, rng);
    double parent = vf.structure_value(cs);
    for_each_child(cs, [&](const CoalitionStructure& child, const MoveDelta& d) {
      double v = parent;
      for (const AgentSet& c : d.removed) v -= vf.value(c);
      for (const AgentSet& c : d.added) v += vf.value(c);
      CHECK(v == vf.structure_value(child));
      return true;
    });
  }
}

TEST_CASE("random children are valid neighbors and reach every slot") {
  auto cs = to_cs(6, {{0, 1, 2, 3}, {4}, {5}});
  auto legal = testutil::ref_neighbor_keys(cs);
  std::mt19937_64 rng(17);

  // slots: splittable coalitions plus merge pairs
  std::map<std::string, int> slot_hits;
  for (int i = 0; i < 2000; ++i) {
    auto rc = sample_random_child(cs, rng);
    REQUIRE(rc.has_value());
    CHECK(legal.count(rc->child.canonical_key()) == 1);
    CHECK(structures_adjacent(cs, rc->child));
    if (rc->delta.removed.size() == 1) {
      slot_hits["split:" + std::to_string(rc->delta.removed[0].lowest())]++;
    } else {
      slot_hits["merge:" + std::to_string(rc->delta.removed[0].lowest()) + "+" +
                std::to_string(rc->delta.removed[1].lowest())]++;
    }
  }
  // one splittable coalition and three merge pairs
  CHECK(slot_hits.size() == 4);
  for (const auto& [slot, hits] : slot_hits) {
    CHECK_MESSAGE(hits > 300, slot, " drawn only ", hits, " times");
  }
}

TEST_CASE("the single-agent structure has no neighbors") {
  std::mt19937_64 rng(1);
  CHECK_FALSE(sample_random_child(CoalitionStructure::bottom(1), rng).has_value());
}

TEST_CASE("adjacency is one split or one merge") {
  auto cs = to_cs(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(structures_adjacent(cs, cs));
  CHECK(structures_adjacent(cs, CoalitionStructure::bottom(4)));
  CHECK(structures_adjacent(cs, to_cs(4, {{0}, {1}, {2, 3}})));
  CHECK_FALSE(structures_adjacent(cs, CoalitionStructure::top(4)));  // two moves
  CHECK_FALSE(structures_adjacent(cs, to_cs(4, {{0, 2}, {1, 3}})));  // swap
}
