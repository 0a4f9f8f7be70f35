#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "csg/bridging.hpp"
#include "csg/structure.hpp"
#include "csg/value_function.hpp"

namespace csg {

enum class ChildSelect { kQuantity, kValue, kRandom };
enum class ConflictPolicy { kBypass, kManage };
enum class StartPolicy { kBottom, kTop, kRandom, kExplicit };
enum class ListTag : uint8_t { kOpen, kReserve, kSubstitute };

// Zero means "derive from the instance size": theta -> 2n, n_c -> min(2n, 128),
// n_a -> min(n, 64).
struct SolverConfig {
  uint32_t theta = 0;    // nodes an expansion may retain across all lists
  double omega = 0.995;  // admission ratio: open list wants v >= omega * best
  uint32_t n_c = 0;      // children examined per expansion (quantity mode)
  uint32_t n_a = 0;      // children retained per expansion
  ChildSelect child_select = ChildSelect::kValue;
  BridgeStrategy bridge = BridgeStrategy::kSplitThenMerge;
  ConflictPolicy conflict = ConflictPolicy::kManage;
  StartPolicy start = StartPolicy::kBottom;  // single-agent runs only
  std::optional<PackedStructure> start_structure;  // required iff kExplicit
  double time_limit_s = 0;                   // 0 -> unlimited
  uint64_t max_expansions = 0;               // 0 -> unlimited
  std::optional<double> target_value;        // stop once the incumbent reaches it
  uint64_t seed = 0;
  size_t max_list_nodes = 100000;  // per-list cap; worst entries evicted first
  bool logical_trace = false;      // trace ticks count expansions, not wall time
};

// validates and fills derived defaults
SolverConfig resolve_config(SolverConfig cfg, uint32_t n);

// enum <-> flag spellings ("value", "split_then_merge", ...); parsers throw
// ConfigError listing the accepted names
const char* to_string(ChildSelect v);
const char* to_string(ConflictPolicy v);
const char* to_string(StartPolicy v);
const char* to_string(BridgeStrategy v);
ChildSelect parse_child_select(const std::string& s);
ConflictPolicy parse_conflict_policy(const std::string& s);
StartPolicy parse_start_policy(const std::string& s);
BridgeStrategy parse_bridge_strategy(const std::string& s);

struct TraceEvent {
  double tick;        // wall milliseconds, or expansion count in logical mode
  double value;       // incumbent value after this improvement
  uint32_t level;     // coalition count of the new incumbent
  uint64_t expansions;
};

struct SearchClock {
  std::chrono::steady_clock::time_point start;
  std::atomic<uint64_t> expansions{0};
  bool logical = false;

  SearchClock() : start(std::chrono::steady_clock::now()) {}

  double wall_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
  double tick() const {
    return logical ? static_cast<double>(expansions.load(std::memory_order_relaxed))
                   : wall_ms();
  }
};

// Best structure found by any agent so far, plus the improvement trace.
// Published values are always fresh canonical evaluations, so the trace is
// strictly increasing and the final value reproduces exactly.
class SharedIncumbent {
 public:
  explicit SharedIncumbent(SearchClock& clock) : clock_(clock) {}

  double value() const { return value_.load(std::memory_order_acquire); }
  bool has_best() const;
  CoalitionStructure best() const;  // throws IntegrityError before any publish
  std::pair<CoalitionStructure, double> snapshot() const;

  // strict improvement or no-op; returns whether the candidate was installed
  bool try_improve(const CoalitionStructure& cand, double fresh_value,
                   uint32_t agent);

  std::vector<TraceEvent> trace() const;
  // trace restricted to one agent's publications
  std::vector<TraceEvent> agent_trace(uint32_t agent) const;

 private:
  SearchClock& clock_;
  mutable std::mutex mu_;
  std::atomic<double> value_{-std::numeric_limits<double>::infinity()};
  std::optional<CoalitionStructure> best_;
  std::vector<TraceEvent> trace_;
  std::vector<uint32_t> publisher_;  // parallel to trace_
};

// Admission control shared between agents (the conflict registry implements
// this; single-agent runs pass none and skip the bookkeeping entirely).
class AdmissionHooks {
 public:
  virtual ~AdmissionHooks() = default;
  // false: another agent holds this structure, drop it instead of storing
  virtual bool on_admit(const Key128& key, uint32_t agent, ListTag tag,
                        uint32_t rank) = 0;
  // Atomically claim the right to expand a popped node. False means the node
  // was transferred away or someone already expanded it; skip it.
  virtual bool begin_expand(const Key128& key, uint32_t agent) = 0;
};

struct Entry {
  double value;  // incrementally tracked; guidance only
  Key128 key;
  PackedStructure packed;
  ListTag origin;  // list the entry was admitted to (demotion re-tags)
};

// best first: higher value, then smaller key for a deterministic total order
struct EntryOrder {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.value != b.value) return a.value > b.value;
    return a.key < b.key;
  }
};

using ScoredList = std::multiset<Entry, EntryOrder>;

struct AgentStats {
  uint64_t expansions = 0;
  uint64_t children_generated = 0;
  uint64_t admitted_open = 0;
  uint64_t admitted_reserve = 0;
  uint64_t admitted_substitute = 0;
  uint64_t demotions = 0;        // stale open/substitute entries sent to reserve
  uint64_t capacity_dropped = 0;
  uint64_t conflict_dropped = 0;  // admissions refused by the registry
  uint64_t stale_pops = 0;        // pops whose expansion claim failed
  uint64_t bridges = 0;
  uint64_t bridge_nodes = 0;
  uint64_t bridge_improvements = 0;
  uint64_t list_promotions = 0;  // open refilled from substitute or reserve
};

// One searcher walking the coalition structure graph with the three-list
// memory discipline. step() performs one pop (which may demote, skip, or
// expand); expansion order follows the anytime loop: generate children,
// then bridge toward an improving node and publish it.
class SearchAgent final : public PathSink {
 public:
  SearchAgent(const ValueFunction& vf, const SolverConfig& resolved,
              uint32_t agent_id, SharedIncumbent& incumbent, SearchClock& clock,
              AdmissionHooks* hooks);

  // Publishes the start node as the first incumbent, then expands it so open
  // holds its admitted children. expand_start=false publishes only (used when
  // the expansion budget is already spent, or the registry refused the key).
  void seed(const CoalitionStructure& start, bool expand_start = true);
  bool step();  // false once every list is empty
  bool exhausted() const {
    return open_.empty() && reserve_.empty() && substitute_.empty();
  }

  uint32_t id() const { return id_; }
  const AgentStats& stats() const { return stats_; }
  const SolverConfig& config() const { return cfg_; }

  // audit support
  void enable_expansion_log() { log_expansions_ = true; }
  const std::vector<Key128>& expansion_log() const { return expanded_keys_; }
  std::vector<std::pair<ListTag, Key128>> list_keys() const;
  // retain only entries the predicate accepts (ownership sweep)
  void retain_entries(const std::function<bool(const Key128&)>& keep);

  // PathSink
  double incumbent_value() const override { return incumbent_.value(); }
  void admit_substitute(const CoalitionStructure& node, double value) override;
  void offer_improvement(const CoalitionStructure& node, double value) override;

 private:
  bool refill_open();
  void expand(Entry e);
  void admit(double value, const CoalitionStructure& cs, const Key128& key,
             ListTag tag);
  bool insert_bounded(ScoredList& list, Entry e);
  uint32_t rank_in(const ScoredList& list, double value,
                   const Key128& key) const;

  const ValueFunction& vf_;
  SolverConfig cfg_;
  uint32_t id_;
  SharedIncumbent& incumbent_;
  SearchClock& clock_;
  AdmissionHooks* hooks_;
  std::mt19937_64 rng_;

  ScoredList open_, reserve_, substitute_;
  AgentStats stats_;
  bool log_expansions_ = false;
  std::vector<Key128> expanded_keys_;
};

}  // namespace csg
