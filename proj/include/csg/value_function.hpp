#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "csg/structure.hpp"

namespace csg {

// Characteristic function v: nonempty coalitions -> nonnegative reals.
// Implementations must be pure: the same coalition always maps to the same
// value, with no observable state, so results are reproducible and safe to
// query from several search agents at once.
class ValueFunction {
 public:
  explicit ValueFunction(uint32_t n) : n_(n) {}
  virtual ~ValueFunction() = default;

  uint32_t agent_count() const { return n_; }

  virtual double value(const AgentSet& coalition) const = 0;

  // Sum of coalition values in canonical order, accumulated left to right.
  // The fixed association makes equal structures produce bit-equal values.
  double structure_value(const CoalitionStructure& cs) const;

 protected:
  void check(const AgentSet& coalition) const;

  uint32_t n_;
};

// Explicit table over all 2^n - 1 nonempty coalitions, indexed by bitmask.
// Practical up to n = 25 (the table itself is the limit).
class TableValueFunction final : public ValueFunction {
 public:
  // `values` indexed by mask; values[0] is ignored. Size must be 2^n.
  TableValueFunction(uint32_t n, std::vector<double> values);

  // File format: optional '#' comment lines, then one "<mask> <value>" pair
  // per line, decimal, covering every mask in [1, 2^n - 1] exactly once.
  // n is inferred from the largest mask.
  static TableValueFunction load(const std::string& path);
  void save(const std::string& path) const;

  // Evaluate a lazy function over every coalition; n must be <= 25.
  static TableValueFunction materialize(const ValueFunction& vf);

  double value(const AgentSet& coalition) const override;
  double value_by_mask(uint64_t mask) const { return values_[mask]; }

  // digest over the table contents; keys oracle side-car caches
  Key128 digest() const;

 private:
  std::vector<double> values_;
};

constexpr uint32_t kMaxTableAgents = 25;

}  // namespace csg
