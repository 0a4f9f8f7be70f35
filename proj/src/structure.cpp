#include "csg/structure.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace csg {

namespace {

constexpr uint32_t kMaxAgents = 65535;  // packed form uses 16-bit block ids

void sort_canonical(std::vector<AgentSet>& parts) {
  std::sort(parts.begin(), parts.end(),
            [](const AgentSet& a, const AgentSet& b) {
              return a.lowest() < b.lowest();
            });
}

}  // namespace

Key128 packed_key(const PackedStructure& p) {
  return murmur3_x64_128(p.data(), p.size() * sizeof(uint16_t),
                         0xc5a11ab1e5ULL);
}

CoalitionStructure::CoalitionStructure(uint32_t n, std::vector<AgentSet> sorted)
    : n_(n), coalitions_(std::move(sorted)) {}

CoalitionStructure CoalitionStructure::bottom(uint32_t n) {
  if (n == 0 || n > kMaxAgents) throw CapacityError("agent count out of range");
  std::vector<AgentSet> parts;
  parts.push_back(AgentSet::full(n));
  return CoalitionStructure(n, std::move(parts));
}

CoalitionStructure CoalitionStructure::top(uint32_t n) {
  if (n == 0 || n > kMaxAgents) throw CapacityError("agent count out of range");
  std::vector<AgentSet> parts;
  parts.reserve(n);
  for (uint32_t a = 0; a < n; ++a) parts.push_back(AgentSet::single(n, a));
  return CoalitionStructure(n, std::move(parts));
}

CoalitionStructure CoalitionStructure::make(uint32_t n,
                                            std::vector<AgentSet> parts) {
  if (n == 0 || n > kMaxAgents) throw CapacityError("agent count out of range");
  AgentSet seen(n);
  for (const AgentSet& c : parts) {
    if (c.universe() != n) {
      throw InvalidMoveError("coalition universe mismatch");
    }
    if (c.empty()) throw InvalidMoveError("empty coalition");
    if (seen.intersects(c)) {
      throw InvalidMoveError("coalitions overlap");
    }
    seen |= c;
  }
  if (!(seen == AgentSet::full(n))) {
    throw InvalidMoveError("coalitions do not cover the agent set");
  }
  sort_canonical(parts);
  return CoalitionStructure(n, std::move(parts));
}

CoalitionStructure CoalitionStructure::unpack(const PackedStructure& packed) {
  uint32_t n = static_cast<uint32_t>(packed.size());
  if (n == 0) throw InvalidMoveError("empty packed structure");
  uint16_t blocks = 0;
  for (uint32_t a = 0; a < n; ++a) {
    if (packed[a] > blocks) {
      throw InvalidMoveError("packed structure is not in restricted-growth form");
    }
    if (packed[a] == blocks) ++blocks;
  }
  std::vector<AgentSet> parts(blocks, AgentSet(n));
  for (uint32_t a = 0; a < n; ++a) parts[packed[a]].insert(a);
  // first-appearance numbering already yields canonical order
  return CoalitionStructure(n, std::move(parts));
}

PackedStructure CoalitionStructure::pack() const {
  PackedStructure out(n_);
  for (size_t idx = 0; idx < coalitions_.size(); ++idx) {
    coalitions_[idx].for_each_member(
        [&](AgentId a) { out[a] = static_cast<uint16_t>(idx); });
  }
  return out;
}

CoalitionStructure CoalitionStructure::split(size_t target,
                                             const AgentSet& part) const {
  if (target >= coalitions_.size()) {
    throw InvalidMoveError("split: no such coalition");
  }
  const AgentSet& c = coalitions_[target];
  if (part.empty()) throw InvalidMoveError("split: empty part");
  if (!part.is_subset_of(c) || part == c) {
    throw InvalidMoveError("split: part must be a nonempty strict subset");
  }
  std::vector<AgentSet> parts;
  parts.reserve(coalitions_.size() + 1);
  for (size_t i = 0; i < coalitions_.size(); ++i) {
    if (i == target) {
      parts.push_back(c - part);
      parts.push_back(part);
    } else {
      parts.push_back(coalitions_[i]);
    }
  }
  sort_canonical(parts);
  return CoalitionStructure(n_, std::move(parts));
}

CoalitionStructure CoalitionStructure::merge(size_t i, size_t j) const {
  if (i == j || i >= coalitions_.size() || j >= coalitions_.size()) {
    throw InvalidMoveError("merge: bad coalition indices");
  }
  std::vector<AgentSet> parts;
  parts.reserve(coalitions_.size() - 1);
  for (size_t k = 0; k < coalitions_.size(); ++k) {
    if (k == j) continue;
    if (k == i) {
      parts.push_back(coalitions_[i] | coalitions_[j]);
    } else {
      parts.push_back(coalitions_[k]);
    }
  }
  sort_canonical(parts);
  return CoalitionStructure(n_, std::move(parts));
}

CoalitionStructure CoalitionStructure::swap_agents(size_t i, AgentId a,
                                                   size_t j, AgentId b) const {
  if (i == j || i >= coalitions_.size() || j >= coalitions_.size()) {
    throw InvalidMoveError("swap: bad coalition indices");
  }
  if (!coalitions_[i].test(a) || !coalitions_[j].test(b)) {
    throw InvalidMoveError("swap: agent not in the named coalition");
  }
  if (coalitions_[i].size() == 1 && coalitions_[j].size() == 1) {
    throw InvalidMoveError("swap: exchanging two singletons is a no-op");
  }
  std::vector<AgentSet> parts = coalitions_;
  parts[i].erase(a);
  parts[i].insert(b);
  parts[j].erase(b);
  parts[j].insert(a);
  sort_canonical(parts);
  return CoalitionStructure(n_, std::move(parts));
}

std::vector<CoalitionStructure> CoalitionStructure::swap_decomposition(
    size_t i, AgentId a, size_t j, AgentId b) const {
  // validate via the direct swap first; also gives us the expected endpoint
  CoalitionStructure result = swap_agents(i, a, j, b);

  std::vector<CoalitionStructure> steps;
  const uint32_t si = coalitions_[i].size();
  const uint32_t sj = coalitions_[j].size();
  AgentSet sa = AgentSet::single(n_, a);
  AgentSet sb = AgentSet::single(n_, b);

  auto index_of = [](const CoalitionStructure& cs, const AgentSet& c) {
    for (size_t k = 0; k < cs.coalitions().size(); ++k) {
      if (cs.coalitions()[k] == c) return k;
    }
    throw InvalidMoveError("swap decomposition lost a coalition");
  };

  if (si >= 2 && sj >= 2) {
    // Figure-style four steps: detach a, attach it to C_j, detach b, attach
    // b to the remainder of C_i.
    CoalitionStructure s1 = split(i, sa);
    CoalitionStructure s2 = s1.merge(index_of(s1, sa), index_of(s1, coalitions_[j]));
    AgentSet merged = coalitions_[j] | sa;
    CoalitionStructure s3 = s2.split(index_of(s2, merged), sb);
    AgentSet rest_i = coalitions_[i] - sa;
    CoalitionStructure s4 = s3.merge(index_of(s3, sb), index_of(s3, rest_i));
    steps = {s1, s2, s3, s4};
  } else if (si == 1) {
    // a is alone: fold it into C_j, then cut b back out
    CoalitionStructure s1 = merge(i, j);
    AgentSet merged = coalitions_[i] | coalitions_[j];
    CoalitionStructure s2 = s1.split(index_of(s1, merged), sb);
    steps = {s1, s2};
  } else {
    // b is alone: cut a out of C_i, then fold b into the remainder; the
    // detached {a} is already the final C_j
    CoalitionStructure s1 = split(i, sa);
    AgentSet rest_i = coalitions_[i] - sa;
    CoalitionStructure s2 = s1.merge(index_of(s1, sb), index_of(s1, rest_i));
    steps = {s1, s2};
  }

  if (!(steps.back() == result)) {
    throw InvalidMoveError("swap decomposition does not reach the swap result");
  }
  return steps;
}

std::string CoalitionStructure::to_string() const {
  std::string out = "{";
  for (size_t i = 0; i < coalitions_.size(); ++i) {
    if (i) out += ",";
    out += "{";
    bool first = true;
    coalitions_[i].for_each_member([&](AgentId a) {
      if (!first) out += ",";
      out += std::to_string(a);
      first = false;
    });
    out += "}";
  }
  out += "}";
  return out;
}

CoalitionStructure CoalitionStructure::parse(const std::string& text) {
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) {
      throw FormatError("structure text: expected '" + std::string(1, c) +
                        "' at offset " + std::to_string(pos));
    }
    ++pos;
  };

  std::vector<std::vector<AgentId>> groups;
  expect('{');
  skip_ws();
  while (true) {
    expect('{');
    std::vector<AgentId> group;
    while (true) {
      skip_ws();
      size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == start) {
        throw FormatError("structure text: expected agent index at offset " +
                          std::to_string(pos));
      }
      group.push_back(static_cast<AgentId>(std::stoul(text.substr(start, pos - start))));
      skip_ws();
      if (pos < text.size() && text[pos] == ',') { ++pos; continue; }
      break;
    }
    expect('}');
    groups.push_back(std::move(group));
    skip_ws();
    if (pos < text.size() && text[pos] == ',') { ++pos; continue; }
    break;
  }
  expect('}');
  skip_ws();
  if (pos != text.size()) {
    throw FormatError("structure text: trailing characters at offset " +
                      std::to_string(pos));
  }

  AgentId max_agent = 0;
  for (const auto& g : groups) {
    for (AgentId a : g) max_agent = std::max(max_agent, a);
  }
  uint32_t n = max_agent + 1;
  std::vector<AgentSet> parts;
  parts.reserve(groups.size());
  for (const auto& g : groups) {
    AgentSet c(n);
    for (AgentId a : g) {
      if (c.test(a)) throw FormatError("structure text: repeated agent " + std::to_string(a));
      c.insert(a);
    }
    parts.push_back(std::move(c));
  }
  try {
    return make(n, std::move(parts));
  } catch (const InvalidMoveError& e) {
    throw FormatError(std::string("structure text: ") + e.what());
  }
}

bool CoalitionStructure::lex_less(const CoalitionStructure& a,
                                  const CoalitionStructure& b) {
  size_t m = std::min(a.coalitions_.size(), b.coalitions_.size());
  for (size_t i = 0; i < m; ++i) {
    if (AgentSet::lex_less(a.coalitions_[i], b.coalitions_[i])) return true;
    if (AgentSet::lex_less(b.coalitions_[i], a.coalitions_[i])) return false;
  }
  return a.coalitions_.size() < b.coalitions_.size();
}

}  // namespace csg
