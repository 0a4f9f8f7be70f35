#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace csg {

// 128-bit digest. Wide enough that distinct coalition structures collide only
// with negligible probability (~2^-64 per pair); all dedup/ownership maps key
// on this digest and accept that residual risk.
struct Key128 {
  uint64_t hi = 0;
  uint64_t lo = 0;

  friend auto operator<=>(const Key128&, const Key128&) = default;
};

std::string to_hex(const Key128& k);

// MurmurHash3 x64 128-bit variant. Stable across runs and platforms for the
// same byte sequence; used for canonical structure keys and coalition digests.
Key128 murmur3_x64_128(const void* data, size_t len, uint64_t seed);

// SplitMix64 step; also the basis of the keyed counter streams below.
uint64_t splitmix64(uint64_t& state);

// Deterministic draw stream keyed by (seed, digest). Each next_* call advances
// a counter; the sequence depends only on the key material, never on global
// state, so lazy value functions are pure functions of (spec, seed, coalition).
class KeyedStream {
 public:
  KeyedStream(uint64_t seed, const Key128& digest);

  uint64_t next_u64();
  // uniform in [0, 1)
  double next_unit();
  // uniform in (0, 1) -- safe for log()
  double next_open_unit();
  // standard normal via Box-Muller
  double next_normal();

 private:
  uint64_t state_;
  uint64_t counter_ = 0;
};

struct Key128Hash {
  size_t operator()(const Key128& k) const noexcept {
    return static_cast<size_t>(k.hi ^ (k.lo * 0x9e3779b97f4a7c15ULL));
  }
};

}  // namespace csg
