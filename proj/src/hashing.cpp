#include "csg/hashing.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

namespace csg {

namespace {

inline uint64_t rotl64(uint64_t x, int8_t r) {
  return (x << r) | (x >> (64 - r));
}

inline uint64_t fmix64(uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

inline uint64_t load_u64(const uint8_t* p) {
  uint64_t v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

}  // namespace

std::string to_hex(const Key128& k) {
  static const char* digits = "0123456789abcdef";
  std::string out(32, '0');
  uint64_t parts[2] = {k.hi, k.lo};
  for (int p = 0; p < 2; ++p) {
    for (int i = 0; i < 16; ++i) {
      out[p * 16 + i] = digits[(parts[p] >> (60 - 4 * i)) & 0xf];
    }
  }
  return out;
}

Key128 murmur3_x64_128(const void* data, size_t len, uint64_t seed) {
  const uint8_t* bytes = static_cast<const uint8_t*>(data);
  const size_t nblocks = len / 16;

  uint64_t h1 = seed;
  uint64_t h2 = seed;
  const uint64_t c1 = 0x87c37b91114253d5ULL;
  const uint64_t c2 = 0x4cf5ad432745937fULL;

  for (size_t i = 0; i < nblocks; ++i) {
    uint64_t k1 = load_u64(bytes + i * 16);
    uint64_t k2 = load_u64(bytes + i * 16 + 8);

    k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
    h1 = rotl64(h1, 27); h1 += h2; h1 = h1 * 5 + 0x52dce729;
    k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
    h2 = rotl64(h2, 31); h2 += h1; h2 = h2 * 5 + 0x38495ab5;
  }

  const uint8_t* tail = bytes + nblocks * 16;
  uint64_t k1 = 0;
  uint64_t k2 = 0;
  switch (len & 15) {
    case 15: k2 ^= uint64_t(tail[14]) << 48; [[fallthrough]];
    case 14: k2 ^= uint64_t(tail[13]) << 40; [[fallthrough]];
    case 13: k2 ^= uint64_t(tail[12]) << 32; [[fallthrough]];
    case 12: k2 ^= uint64_t(tail[11]) << 24; [[fallthrough]];
    case 11: k2 ^= uint64_t(tail[10]) << 16; [[fallthrough]];
    case 10: k2 ^= uint64_t(tail[9]) << 8; [[fallthrough]];
    case 9:  k2 ^= uint64_t(tail[8]);
             k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
             [[fallthrough]];
    case 8:  k1 ^= uint64_t(tail[7]) << 56; [[fallthrough]];
    case 7:  k1 ^= uint64_t(tail[6]) << 48; [[fallthrough]];
    case 6:  k1 ^= uint64_t(tail[5]) << 40; [[fallthrough]];
    case 5:  k1 ^= uint64_t(tail[4]) << 32; [[fallthrough]];
    case 4:  k1 ^= uint64_t(tail[3]) << 24; [[fallthrough]];
    case 3:  k1 ^= uint64_t(tail[2]) << 16; [[fallthrough]];
    case 2:  k1 ^= uint64_t(tail[1]) << 8; [[fallthrough]];
    case 1:  k1 ^= uint64_t(tail[0]);
             k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
  }

  h1 ^= uint64_t(len);
  h2 ^= uint64_t(len);
  h1 += h2;
  h2 += h1;
  h1 = fmix64(h1);
  h2 = fmix64(h2);
  h1 += h2;
  h2 += h1;
  return Key128{h1, h2};
}

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

KeyedStream::KeyedStream(uint64_t seed, const Key128& digest) {
  // fold the key material once so draws from nearby seeds are unrelated
  uint64_t s = seed ^ 0x6a09e667f3bcc908ULL;
  s = fmix64(s + digest.hi);
  s = fmix64(s + digest.lo);
  state_ = s;
}

uint64_t KeyedStream::next_u64() {
  uint64_t x = state_ + fmix64(++counter_ * 0xd1b54a32d192ed03ULL);
  return fmix64(x);
}

double KeyedStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double KeyedStream::next_open_unit() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double KeyedStream::next_normal() {
  double u1 = next_open_unit();
  double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace csg
