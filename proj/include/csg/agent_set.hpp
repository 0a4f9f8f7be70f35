#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "csg/errors.hpp"
#include "csg/hashing.hpp"

namespace csg {

using AgentId = uint32_t;

// Set of agent indices in [0, n). One inline 64-bit word, so instances over
// 64 or fewer agents never touch the heap; larger universes spill to a heap
// block sized at construction. All binary ops require equal universes.
class AgentSet {
 public:
  AgentSet() = default;

  explicit AgentSet(uint32_t n) : n_(n), words_(word_count(n), 0ULL) {}

  static AgentSet single(uint32_t n, AgentId a) {
    AgentSet s(n);
    s.insert(a);
    return s;
  }

  static AgentSet full(uint32_t n) {
    AgentSet s(n);
    for (size_t w = 0; w < s.words_.size(); ++w) s.words_[w] = ~0ULL;
    s.trim();
    return s;
  }

  static AgentSet of(uint32_t n, std::initializer_list<AgentId> members) {
    AgentSet s(n);
    for (AgentId a : members) s.insert(a);
    return s;
  }

  uint32_t universe() const { return n_; }

  bool test(AgentId a) const {
    return (words_[a >> 6] >> (a & 63)) & 1ULL;
  }

  void insert(AgentId a) {
    if (a >= n_) throw InvalidMoveError("agent index out of range");
    words_[a >> 6] |= 1ULL << (a & 63);
  }

  void erase(AgentId a) { words_[a >> 6] &= ~(1ULL << (a & 63)); }

  uint32_t size() const {
    uint32_t c = 0;
    for (uint64_t w : words_) c += static_cast<uint32_t>(std::popcount(w));
    return c;
  }

  bool empty() const {
    for (uint64_t w : words_) {
      if (w) return false;
    }
    return true;
  }

  // lowest member; undefined on empty sets
  AgentId lowest() const {
    for (size_t i = 0; i < words_.size(); ++i) {
      if (words_[i]) {
        return static_cast<AgentId>(i * 64 + std::countr_zero(words_[i]));
      }
    }
    return n_;
  }

  AgentSet& operator|=(const AgentSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  AgentSet& operator&=(const AgentSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  // set difference
  AgentSet& operator-=(const AgentSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  friend AgentSet operator|(AgentSet a, const AgentSet& b) { return a |= b; }
  friend AgentSet operator&(AgentSet a, const AgentSet& b) { return a &= b; }
  friend AgentSet operator-(AgentSet a, const AgentSet& b) { return a -= b; }

  bool operator==(const AgentSet& o) const {
    return n_ == o.n_ && words_ == o.words_;
  }

  bool is_subset_of(const AgentSet& o) const {
    for (size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~o.words_[i]) return false;
    }
    return true;
  }

  bool intersects(const AgentSet& o) const {
    for (size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & o.words_[i]) return true;
    }
    return false;
  }

  template <typename Fn>
  void for_each_member(Fn&& fn) const {
    for (size_t i = 0; i < words_.size(); ++i) {
      uint64_t w = words_[i];
      while (w) {
        fn(static_cast<AgentId>(i * 64 + std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  std::vector<AgentId> members() const {
    std::vector<AgentId> out;
    out.reserve(size());
    for_each_member([&](AgentId a) { out.push_back(a); });
    return out;
  }

  // digest of the member set; value functions key their draw streams on this
  Key128 digest() const {
    return murmur3_x64_128(words_.data(), words_.size() * sizeof(uint64_t),
                           0x5eedULL ^ n_);
  }

  // 64-bit fast path for table lookups; only valid when n <= 64
  uint64_t mask64() const { return words_.empty() ? 0 : words_[0]; }

  // first member with index >= pos, or universe() when none remain
  AgentId first_from(AgentId pos) const {
    if (pos >= n_) return n_;
    size_t wi = pos >> 6;
    uint64_t w = words_[wi] & (~0ULL << (pos & 63));
    while (true) {
      if (w) return static_cast<AgentId>(wi * 64 + std::countr_zero(w));
      if (++wi == words_.size()) return n_;
      w = words_[wi];
    }
  }

  // members-as-sorted-lists order: {0} < {0,1} < {0,2}; prefix is smaller
  static bool lex_less(const AgentSet& a, const AgentSet& b) {
    AgentId xa = a.first_from(0);
    AgentId xb = b.first_from(0);
    while (true) {
      bool ea = xa >= a.n_;
      bool eb = xb >= b.n_;
      if (ea || eb) return ea && !eb;
      if (xa != xb) return xa < xb;
      xa = a.first_from(xa + 1);
      xb = b.first_from(xb + 1);
    }
  }

 private:
  static size_t word_count(uint32_t n) { return (size_t(n) + 63) / 64; }

  void trim() {
    uint32_t rem = n_ & 63;
    if (rem && !words_.empty()) {
      words_.back() &= (1ULL << rem) - 1;
    }
  }

  uint32_t n_ = 0;
  boost::container::small_vector<uint64_t, 1> words_;
};

}  // namespace csg
