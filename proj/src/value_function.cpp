#include "csg/value_function.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace csg {

void ValueFunction::check(const AgentSet& coalition) const {
  if (coalition.universe() != n_) {
    throw ConfigError("value: coalition universe does not match the function");
  }
  if (coalition.empty()) {
    throw ConfigError("value: empty coalition");
  }
}

double ValueFunction::structure_value(const CoalitionStructure& cs) const {
  double total = 0.0;
  for (const AgentSet& c : cs.coalitions()) total += value(c);
  return total;
}

TableValueFunction::TableValueFunction(uint32_t n, std::vector<double> values)
    : ValueFunction(n), values_(std::move(values)) {
  if (n == 0 || n > kMaxTableAgents) {
    throw CapacityError("value table supports 1..25 agents");
  }
  if (values_.size() != (size_t(1) << n)) {
    throw ConfigError("value table has wrong size for its agent count");
  }
}

double TableValueFunction::value(const AgentSet& coalition) const {
  check(coalition);
  return values_[coalition.mask64()];
}

TableValueFunction TableValueFunction::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("value table: cannot open " + path);

  std::vector<std::pair<uint64_t, double>> entries;
  uint64_t max_mask = 0;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    uint64_t mask = 0;
    double v = 0;
    if (!(ls >> mask >> v)) {
      throw FormatError("value table: malformed line " + std::to_string(line_no));
    }
    std::string extra;
    if (ls >> extra) {
      throw FormatError("value table: trailing tokens on line " +
                        std::to_string(line_no));
    }
    if (mask == 0) {
      throw FormatError("value table: zero mask on line " + std::to_string(line_no));
    }
    if (v < 0) {
      throw FormatError("value table: negative value on line " +
                        std::to_string(line_no));
    }
    entries.emplace_back(mask, v);
    max_mask = std::max(max_mask, mask);
  }
  if (entries.empty()) throw FormatError("value table: no entries in " + path);

  uint32_t n = static_cast<uint32_t>(std::bit_width(max_mask));
  if (n > kMaxTableAgents) {
    throw FormatError("value table: largest mask implies more than 25 agents");
  }
  size_t want = (size_t(1) << n) - 1;
  std::vector<double> values(want + 1, -1.0);
  for (const auto& [mask, v] : entries) {
    if (values[mask] >= 0) {
      throw FormatError("value table: duplicate mask " + std::to_string(mask));
    }
    values[mask] = v;
  }
  if (entries.size() != want) {
    for (uint64_t m = 1; m <= want; ++m) {
      if (values[m] < 0) {
        throw FormatError("value table: missing entry for mask " +
                          std::to_string(m));
      }
    }
  }
  values[0] = 0.0;
  return TableValueFunction(n, std::move(values));
}

void TableValueFunction::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("value table: cannot write " + path);
  out << "# coalition value table, n = " << n_ << "\n";
  char buf[64];
  for (uint64_t mask = 1; mask < values_.size(); ++mask) {
    std::snprintf(buf, sizeof(buf), "%" PRIu64 " %.17g\n", mask, values_[mask]);
    out << buf;
  }
}

TableValueFunction TableValueFunction::materialize(const ValueFunction& vf) {
  uint32_t n = vf.agent_count();
  if (n == 0 || n > kMaxTableAgents) {
    throw CapacityError("materialize: agent count beyond table capacity");
  }
  std::vector<double> values(size_t(1) << n, 0.0);
  for (uint64_t mask = 1; mask < values.size(); ++mask) {
    AgentSet c(n);
    uint64_t m = mask;
    while (m) {
      c.insert(static_cast<AgentId>(std::countr_zero(m)));
      m &= m - 1;
    }
    values[mask] = vf.value(c);
  }
  return TableValueFunction(n, std::move(values));
}

Key128 TableValueFunction::digest() const {
  Key128 body = murmur3_x64_128(values_.data(), values_.size() * sizeof(double),
                                0x7ab1eULL);
  body.hi ^= n_;
  return body;
}

}  // namespace csg
