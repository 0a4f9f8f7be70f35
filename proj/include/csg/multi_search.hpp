#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "csg/search.hpp"

namespace csg {

struct RegistryStats {
  uint64_t claims = 0;
  uint64_t conflicts_detected = 0;  // admissions that hit a foreign owner
  uint64_t transfers = 0;           // conflicts resolved in the challenger's favor
  uint64_t duplicate_drops = 0;     // agent re-admitting its own structure
  uint64_t tombstone_drops = 0;     // admissions of already-expanded structures
};

// Shared ownership table: at most one agent holds any structure in its lists,
// and at most one agent ever expands it. Conflicts between a would-be admitter
// and the current owner either resolve by priority ranks (manage) or always in
// the owner's favor (bypass). Losers keep no record; a transferred loser
// discovers the loss when its stale copy fails begin_expand at pop time.
class ConflictRegistry final : public AdmissionHooks {
 public:
  explicit ConflictRegistry(ConflictPolicy policy) : policy_(policy) {}

  bool on_admit(const Key128& key, uint32_t agent, ListTag tag,
                uint32_t rank) override;
  bool begin_expand(const Key128& key, uint32_t agent) override;

  bool owned_by(const Key128& key, uint32_t agent) const;
  std::optional<uint32_t> expanded_by(const Key128& key) const;
  RegistryStats stats() const;

 private:
  struct Slot {
    uint32_t owner;
    ListTag tag;
    uint32_t rank;
    bool expanded;
  };

  mutable std::mutex mu_;
  std::unordered_map<Key128, Slot, Key128Hash> slots_;
  ConflictPolicy policy_;
  RegistryStats stats_;
};

struct AuditReport {
  bool exclusive_lists = true;    // P1: post-run lists are pairwise disjoint
  bool unique_expansions = true;  // P2: no structure expanded twice
  uint64_t list_keys_checked = 0;
  uint64_t expansions_checked = 0;
};

struct MultiStats {
  std::vector<AgentStats> agents;
  RegistryStats registry;
  std::optional<AuditReport> audit;
};

struct MultiConfig {
  SolverConfig base;
  uint32_t agents = 4;
  bool sequential = true;  // false: one thread per agent
  bool audit = false;      // record per-agent expansion logs and verify P1/P2
};

struct RunResult {
  CoalitionStructure best;
  double value;  // always equals a fresh structure_value(best)
  uint64_t expansions = 0;
  double elapsed_ms = 0;
  std::vector<TraceEvent> trace;                  // merged, all agents
  std::vector<std::vector<TraceEvent>> agent_traces;  // trace split by publisher
  MultiStats stats;
};

// Uniform random partition by sequential assignment: each agent joins one of
// the existing coalitions or opens a new one, all options equally likely.
CoalitionStructure random_structure(uint32_t n, std::mt19937_64& rng);

// Agent 0 starts at the bottom node, agent 1 at the top, the rest at random
// structures (re-drawn a bounded number of times to avoid duplicates). The
// single-agent case follows cfg.start instead.
std::vector<CoalitionStructure> assign_start_nodes(uint32_t n, uint32_t agents,
                                                   const SolverConfig& cfg);

// Run m agents against one value function until a budget or target is hit.
// A single agent runs without any registry, so m=1 reproduces the plain
// search exactly; the sequential driver round-robins one step at a time and
// is fully deterministic for a fixed seed.
RunResult run_multi(const ValueFunction& vf, const MultiConfig& mc);

}  // namespace csg
