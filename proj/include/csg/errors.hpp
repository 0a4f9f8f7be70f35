#pragma once

#include <stdexcept>
#include <string>

namespace csg {

// Structural move rejected (bad split part, bad merge indices, ...).
struct InvalidMoveError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input file (value tables, traces, structure text).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance exceeds a hard capacity (table width, enumeration size, ...).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad solver/experiment configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A metric is undefined for the given inputs (nonpositive denominator etc).
struct UndefinedMetricError : std::domain_error {
  using std::domain_error::domain_error;
};

// A report or trace failed an internal consistency check.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace csg
