#include "csg/multi_search.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <thread>
#include <unordered_set>

#include "csg/errors.hpp"

namespace csg {

bool ConflictRegistry::on_admit(const Key128& key, uint32_t agent, ListTag tag,
                                uint32_t rank) {
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, fresh] = slots_.try_emplace(key, Slot{agent, tag, rank, false});
  if (fresh) {
    ++stats_.claims;
    return true;
  }
  Slot& s = it->second;
  if (s.expanded) {
    ++stats_.tombstone_drops;
    return false;
  }
  if (s.owner == agent) {
    ++stats_.duplicate_drops;
    return false;
  }
  ++stats_.conflicts_detected;
  if (policy_ == ConflictPolicy::kBypass) return false;
  // manage: a strictly better queue position steals the node; ties keep the
  // incumbent owner
  if (rank < s.rank) {
    s = Slot{agent, tag, rank, false};
    ++stats_.transfers;
    return true;
  }
  return false;
}

bool ConflictRegistry::begin_expand(const Key128& key, uint32_t agent) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = slots_.find(key);
  if (it == slots_.end()) {
    // every stored entry passed on_admit, so this cannot happen; claim
    // defensively rather than crash
    slots_.emplace(key, Slot{agent, ListTag::kOpen, 0, true});
    ++stats_.claims;
    return true;
  }
  Slot& s = it->second;
  if (s.expanded || s.owner != agent) return false;
  s.expanded = true;
  return true;
}

bool ConflictRegistry::owned_by(const Key128& key, uint32_t agent) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = slots_.find(key);
  return it != slots_.end() && it->second.owner == agent;
}

std::optional<uint32_t> ConflictRegistry::expanded_by(const Key128& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = slots_.find(key);
  if (it == slots_.end() || !it->second.expanded) return std::nullopt;
  return it->second.owner;
}

RegistryStats ConflictRegistry::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return stats_;
}

CoalitionStructure random_structure(uint32_t n, std::mt19937_64& rng) {
  std::vector<AgentSet> parts;
  for (AgentId a = 0; a < n; ++a) {
    const size_t k = parts.size();
    std::uniform_int_distribution<size_t> pick(0, k);
    const size_t slot = pick(rng);
    if (slot == k) {
      parts.push_back(AgentSet::single(n, a));
    } else {
      parts[slot].insert(a);
    }
  }
  return CoalitionStructure::make(n, std::move(parts));
}

std::vector<CoalitionStructure> assign_start_nodes(uint32_t n, uint32_t agents,
                                                   const SolverConfig& cfg) {
  if (agents == 0) throw ConfigError("need at least one agent");
  std::vector<CoalitionStructure> starts;
  uint64_t state = cfg.seed ^ 0x5745a1c0de5eedULL;
  std::mt19937_64 rng(splitmix64(state));

  if (agents == 1) {
    switch (cfg.start) {
      case StartPolicy::kBottom: starts.push_back(CoalitionStructure::bottom(n)); break;
      case StartPolicy::kTop: starts.push_back(CoalitionStructure::top(n)); break;
      case StartPolicy::kRandom: starts.push_back(random_structure(n, rng)); break;
      case StartPolicy::kExplicit: {
        CoalitionStructure s = CoalitionStructure::unpack(*cfg.start_structure);
        if (s.n() != n) {
          throw ConfigError("start structure is over a different universe");
        }
        starts.push_back(std::move(s));
        break;
      }
    }
    return starts;
  }

  starts.push_back(CoalitionStructure::bottom(n));
  starts.push_back(CoalitionStructure::top(n));
  std::unordered_set<Key128, Key128Hash> used;
  for (const CoalitionStructure& s : starts) used.insert(s.canonical_key());
  while (starts.size() < agents) {
    CoalitionStructure cand = random_structure(n, rng);
    for (int attempt = 0; attempt < 64; ++attempt) {
      if (used.insert(cand.canonical_key()).second) break;
      cand = random_structure(n, rng);
    }
    // tiny universes run out of distinct structures; duplicates then lose
    // their seed admission and idle, which is harmless
    starts.push_back(std::move(cand));
  }
  return starts;
}

RunResult run_multi(const ValueFunction& vf, const MultiConfig& mc) {
  const uint32_t n = vf.agent_count();
  const SolverConfig cfg = resolve_config(mc.base, n);

  SearchClock clock;
  clock.logical = cfg.logical_trace;
  SharedIncumbent incumbent(clock);

  std::unique_ptr<ConflictRegistry> registry;
  if (mc.agents > 1) {
    registry = std::make_unique<ConflictRegistry>(cfg.conflict);
  }

  std::vector<std::unique_ptr<SearchAgent>> agents;
  agents.reserve(mc.agents);
  for (uint32_t id = 0; id < mc.agents; ++id) {
    agents.push_back(std::make_unique<SearchAgent>(vf, cfg, id, incumbent,
                                                   clock, registry.get()));
    if (mc.audit) agents.back()->enable_expansion_log();
  }

  const auto should_stop = [&]() {
    if (cfg.max_expansions &&
        clock.expansions.load(std::memory_order_relaxed) >=
            cfg.max_expansions) {
      return true;
    }
    if (cfg.time_limit_s > 0 && clock.wall_ms() >= cfg.time_limit_s * 1e3) {
      return true;
    }
    if (cfg.target_value && incumbent.value() >= *cfg.target_value) {
      return true;
    }
    return false;
  };

  const std::vector<CoalitionStructure> starts =
      assign_start_nodes(n, mc.agents, cfg);
  for (uint32_t id = 0; id < mc.agents; ++id) {
    // past the budget, later agents still publish their start but skip the
    // root expansion so the expansion cap holds
    agents[id]->seed(starts[id], !should_stop());
  }

  if (mc.sequential || mc.agents == 1) {
    bool progressed = true;
    while (progressed && !should_stop()) {
      progressed = false;
      for (auto& agent : agents) {
        if (should_stop()) break;
        if (agent->step()) progressed = true;
      }
    }
  } else {
    std::atomic<bool> done{false};
    std::vector<std::thread> threads;
    threads.reserve(mc.agents);
    for (auto& agent : agents) {
      threads.emplace_back([&, a = agent.get()]() {
        while (!done.load(std::memory_order_relaxed)) {
          if (should_stop()) {
            done.store(true, std::memory_order_relaxed);
            break;
          }
          if (!a->step()) break;
        }
      });
    }
    for (std::thread& t : threads) t.join();
  }

  // An agent that lost a structure by transfer still holds a stale copy;
  // sweep those out so the post-run lists reflect true ownership.
  if (registry) {
    for (auto& agent : agents) {
      const uint32_t id = agent->id();
      agent->retain_entries(
          [&](const Key128& key) { return registry->owned_by(key, id); });
    }
  }

  RunResult res{incumbent.best(),
                incumbent.value(),
                clock.expansions.load(),
                clock.wall_ms(),
                incumbent.trace(),
                {},
                {}};
  for (uint32_t id = 0; id < mc.agents; ++id) {
    res.agent_traces.push_back(incumbent.agent_trace(id));
  }
  for (auto& agent : agents) res.stats.agents.push_back(agent->stats());
  if (registry) res.stats.registry = registry->stats();

  if (mc.audit) {
    AuditReport report;
    std::unordered_map<Key128, uint32_t, Key128Hash> seen_list_keys;
    for (auto& agent : agents) {
      for (const auto& [tag, key] : agent->list_keys()) {
        ++report.list_keys_checked;
        auto [it, fresh] = seen_list_keys.try_emplace(key, agent->id());
        if (!fresh && it->second != agent->id()) {
          report.exclusive_lists = false;
        }
      }
    }
    std::unordered_map<Key128, uint32_t, Key128Hash> seen_expansions;
    for (auto& agent : agents) {
      for (const Key128& key : agent->expansion_log()) {
        ++report.expansions_checked;
        auto [it, fresh] = seen_expansions.try_emplace(key, agent->id());
        if (!fresh && it->second != agent->id()) {
          report.unique_expansions = false;
        }
      }
    }
    res.stats.audit = report;
  }
  return res;
}

}  // namespace csg
