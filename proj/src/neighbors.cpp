#include "csg/neighbors.hpp"

#include <algorithm>

namespace csg {

uint64_t split_child_count(const CoalitionStructure& cs) {
  uint64_t total = 0;
  for (const AgentSet& c : cs.coalitions()) {
    uint32_t s = c.size();
    if (s > 64) throw CapacityError("split_child_count: coalition too large");
    if (s >= 2) total += (uint64_t(1) << (s - 1)) - 1;
  }
  return total;
}

uint64_t merge_child_count(const CoalitionStructure& cs) {
  uint64_t k = cs.level();
  return k * (k - 1) / 2;
}

void for_each_split_child(const CoalitionStructure& cs,
                          const ChildVisitor& fn) {
  const uint32_t n = cs.n();
  for (size_t t = 0; t < cs.coalitions().size(); ++t) {
    const AgentSet& c = cs.coalitions()[t];
    uint32_t s = c.size();
    if (s < 2) continue;
    std::vector<AgentId> rest = c.members();
    AgentId anchor = rest.front();
    rest.erase(rest.begin());

    // bits == all-ones would make part == c; the loop stops just before it.
    // For coalitions beyond 64 members the stream is unbounded in principle
    // and the caller's early stop is the only exit.
    const bool bounded = rest.size() < 64;
    const uint64_t last =
        bounded ? ((uint64_t(1) << rest.size()) - 1) : ~uint64_t(0);
    for (uint64_t bits = 0; bits < last; ++bits) {
      AgentSet part = AgentSet::single(n, anchor);
      uint64_t b = bits;
      while (b) {
        int i = std::countr_zero(b);
        part.insert(rest[static_cast<size_t>(i)]);
        b &= b - 1;
      }
      MoveDelta delta;
      delta.removed.push_back(c);
      delta.added.push_back(c - part);
      delta.added.push_back(part);
      if (!fn(cs.split(t, part), delta)) return;
    }
  }
}

void for_each_merge_child(const CoalitionStructure& cs,
                          const ChildVisitor& fn) {
  const size_t k = cs.coalitions().size();
  for (size_t i = 0; i + 1 < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      MoveDelta delta;
      delta.removed.push_back(cs.coalitions()[i]);
      delta.removed.push_back(cs.coalitions()[j]);
      delta.added.push_back(cs.coalitions()[i] | cs.coalitions()[j]);
      if (!fn(cs.merge(i, j), delta)) return;
    }
  }
}

void for_each_child(const CoalitionStructure& cs, const ChildVisitor& fn) {
  bool keep_going = true;
  for_each_split_child(cs, [&](const CoalitionStructure& child,
                               const MoveDelta& d) {
    keep_going = fn(child, d);
    return keep_going;
  });
  if (!keep_going) return;
  for_each_merge_child(cs, fn);
}

std::optional<RandomChild> sample_random_child(const CoalitionStructure& cs,
                                               std::mt19937_64& rng) {
  const uint32_t n = cs.n();
  const auto& parts = cs.coalitions();
  std::vector<size_t> splittable;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() >= 2) splittable.push_back(i);
  }
  const size_t k = parts.size();
  const uint64_t merge_slots = uint64_t(k) * (k - 1) / 2;
  const uint64_t total = splittable.size() + merge_slots;
  if (total == 0) return std::nullopt;

  std::uniform_int_distribution<uint64_t> pick(0, total - 1);
  uint64_t slot = pick(rng);

  if (slot < splittable.size()) {
    size_t t = splittable[slot];
    const AgentSet& c = parts[t];
    std::vector<AgentId> rest = c.members();
    AgentId anchor = rest.front();
    rest.erase(rest.begin());
    std::uniform_int_distribution<int> coin(0, 1);
    AgentSet part(n);
    while (true) {
      part = AgentSet::single(n, anchor);
      for (AgentId a : rest) {
        if (coin(rng)) part.insert(a);
      }
      if (!(part == c)) break;  // resample the all-in case
    }
    MoveDelta delta;
    delta.removed.push_back(c);
    delta.added.push_back(c - part);
    delta.added.push_back(part);
    return RandomChild{cs.split(t, part), std::move(delta)};
  }

  uint64_t r = slot - splittable.size();
  for (size_t i = 0; i + 1 < k; ++i) {
    uint64_t row = k - 1 - i;
    if (r < row) {
      size_t j = i + 1 + static_cast<size_t>(r);
      MoveDelta delta;
      delta.removed.push_back(parts[i]);
      delta.removed.push_back(parts[j]);
      delta.added.push_back(parts[i] | parts[j]);
      return RandomChild{cs.merge(i, j), std::move(delta)};
    }
    r -= row;
  }
  return std::nullopt;  // unreachable
}

bool structures_adjacent(const CoalitionStructure& a,
                         const CoalitionStructure& b) {
  if (a.n() != b.n()) return false;
  int diff = int(a.level()) - int(b.level());
  if (diff != 1 && diff != -1) return false;
  const CoalitionStructure& fine = diff > 0 ? a : b;
  const CoalitionStructure& coarse = diff > 0 ? b : a;
  // one level apart: adjacency <=> fine refines coarse
  for (const AgentSet& fc : fine.coalitions()) {
    bool contained = false;
    for (const AgentSet& cc : coarse.coalitions()) {
      if (fc.is_subset_of(cc)) {
        contained = true;
        break;
      }
    }
    if (!contained) return false;
  }
  return true;
}

}  // namespace csg
