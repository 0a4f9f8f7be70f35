#include "csg/search.hpp"

#include <algorithm>
#include <unordered_set>

#include "csg/errors.hpp"
#include "csg/neighbors.hpp"

namespace csg {

SolverConfig resolve_config(SolverConfig cfg, uint32_t n) {
  if (n == 0) throw ConfigError("agent universe is empty");
  if (!(cfg.omega > 0.0 && cfg.omega <= 1.0)) {
    throw ConfigError("omega must lie in (0, 1]");
  }
  if (cfg.theta == 0) cfg.theta = std::max(2u, 2 * n);
  if (cfg.n_c == 0) cfg.n_c = std::min(2 * n, 128u);
  if (cfg.n_c < 2) cfg.n_c = 2;
  if (cfg.n_a == 0) cfg.n_a = std::min({n, cfg.n_c - 1, 64u});
  if (cfg.n_a >= cfg.n_c) {
    throw ConfigError("n_a must be smaller than n_c (retain fewer than you examine)");
  }
  if (cfg.start == StartPolicy::kExplicit && !cfg.start_structure) {
    throw ConfigError("explicit start policy needs a start structure");
  }
  if (cfg.time_limit_s < 0) throw ConfigError("negative time limit");
  return cfg;
}

const char* to_string(ChildSelect v) {
  switch (v) {
    case ChildSelect::kQuantity: return "quantity";
    case ChildSelect::kValue: return "value";
    case ChildSelect::kRandom: return "random";
  }
  return "?";
}

const char* to_string(ConflictPolicy v) {
  return v == ConflictPolicy::kBypass ? "bypass" : "manage";
}

const char* to_string(StartPolicy v) {
  switch (v) {
    case StartPolicy::kBottom: return "bottom";
    case StartPolicy::kTop: return "top";
    case StartPolicy::kRandom: return "random";
    case StartPolicy::kExplicit: return "explicit";
  }
  return "?";
}

const char* to_string(BridgeStrategy v) {
  switch (v) {
    case BridgeStrategy::kSplitThenMerge: return "split_then_merge";
    case BridgeStrategy::kMergeThenSplit: return "merge_then_split";
    case BridgeStrategy::kApproachThenSwap: return "approach_then_swap";
    case BridgeStrategy::kAllThree: return "all";
  }
  return "?";
}

ChildSelect parse_child_select(const std::string& s) {
  if (s == "quantity") return ChildSelect::kQuantity;
  if (s == "value") return ChildSelect::kValue;
  if (s == "random") return ChildSelect::kRandom;
  throw ConfigError("child-select must be quantity, value, or random: " + s);
}

ConflictPolicy parse_conflict_policy(const std::string& s) {
  if (s == "bypass") return ConflictPolicy::kBypass;
  if (s == "manage") return ConflictPolicy::kManage;
  throw ConfigError("conflict must be bypass or manage: " + s);
}

StartPolicy parse_start_policy(const std::string& s) {
  if (s == "bottom") return StartPolicy::kBottom;
  if (s == "top") return StartPolicy::kTop;
  if (s == "random") return StartPolicy::kRandom;
  throw ConfigError(
      "start must be bottom, top, random, or a structure literal: " + s);
}

BridgeStrategy parse_bridge_strategy(const std::string& s) {
  if (s == "split_then_merge") return BridgeStrategy::kSplitThenMerge;
  if (s == "merge_then_split") return BridgeStrategy::kMergeThenSplit;
  if (s == "approach_then_swap") return BridgeStrategy::kApproachThenSwap;
  if (s == "all") return BridgeStrategy::kAllThree;
  throw ConfigError(
      "bridge must be split_then_merge, merge_then_split, approach_then_swap, "
      "or all: " +
      s);
}

bool SharedIncumbent::has_best() const {
  std::lock_guard<std::mutex> lock(mu_);
  return best_.has_value();
}

CoalitionStructure SharedIncumbent::best() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!best_) throw IntegrityError("no incumbent published yet");
  return *best_;
}

std::pair<CoalitionStructure, double> SharedIncumbent::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!best_) throw IntegrityError("no incumbent published yet");
  return {*best_, value_.load(std::memory_order_relaxed)};
}

bool SharedIncumbent::try_improve(const CoalitionStructure& cand,
                                  double fresh_value, uint32_t agent) {
  std::lock_guard<std::mutex> lock(mu_);
  if (best_ && !(fresh_value > value_.load(std::memory_order_relaxed))) {
    return false;
  }
  best_ = cand;
  value_.store(fresh_value, std::memory_order_release);
  trace_.push_back({clock_.tick(), fresh_value, cand.level(),
                    clock_.expansions.load(std::memory_order_relaxed)});
  publisher_.push_back(agent);
  return true;
}

std::vector<TraceEvent> SharedIncumbent::trace() const {
  std::lock_guard<std::mutex> lock(mu_);
  return trace_;
}

std::vector<TraceEvent> SharedIncumbent::agent_trace(uint32_t agent) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<TraceEvent> out;
  for (size_t i = 0; i < trace_.size(); ++i) {
    if (publisher_[i] == agent) out.push_back(trace_[i]);
  }
  return out;
}

namespace {

constexpr uint32_t kRankCap = 4096;

struct ChildCand {
  double value;
  Key128 key;
  CoalitionStructure cs;
};

bool cand_better(const ChildCand& a, const ChildCand& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.key < b.key;
}

struct Selection {
  std::vector<ChildCand> open;     // sorted best first
  std::vector<ChildCand> reserve;  // sorted best first
};

double delta_value(const ValueFunction& vf, double parent, const MoveDelta& d) {
  double v = parent;
  for (const AgentSet& c : d.removed) v -= vf.value(c);
  for (const AgentSet& c : d.added) v += vf.value(c);
  return v;
}

// Deterministic scan of the child stream; the best n_a children at or above
// the gate feed the open list, everything below the gate is kept for reserve.
Selection select_quantity(const ValueFunction& vf, const SolverConfig& cfg,
                          const CoalitionStructure& node, double node_value,
                          double gate, AgentStats& stats) {
  Selection out;
  std::unordered_set<Key128, Key128Hash> seen;
  std::vector<ChildCand> above;
  const uint64_t scan_cap = std::max<uint64_t>(256, 4ull * cfg.n_c);
  uint64_t scanned = 0;
  for_each_child(node, [&](const CoalitionStructure& child, const MoveDelta& d) {
    Key128 key = child.canonical_key();
    if (seen.insert(key).second) {
      ++stats.children_generated;
      double v = delta_value(vf, node_value, d);
      (v >= gate ? above : out.reserve).push_back({v, key, child});
    }
    // the quota asks for n_c children clearing the gate; stop once filled
    if (above.size() >= cfg.n_c) return false;
    return ++scanned < scan_cap;
  });
  std::sort(above.begin(), above.end(), cand_better);
  std::sort(out.reserve.begin(), out.reserve.end(), cand_better);
  if (above.size() > cfg.n_a) above.erase(above.begin() + cfg.n_a, above.end());
  out.open = std::move(above);
  return out;
}

// Iterative sampling with a falling acceptance bar. Each round draws n_a
// random children into a pool; a draw beating the bar ends the loop,
// otherwise the bar relaxes halfway toward the best child seen so far.
// The best n_a of the pool survive and classify against the gate.
Selection select_value(const ValueFunction& vf, std::mt19937_64& rng,
                       const SolverConfig& cfg, const CoalitionStructure& node,
                       double node_value, double gate, double incumbent,
                       AgentStats& stats) {
  std::unordered_set<Key128, Key128Hash> seen;
  std::vector<ChildCand> pool;
  double pool_best = -std::numeric_limits<double>::infinity();
  double bar = incumbent;
  bool beaten = false;
  for (int iter = 0; iter < 64 && !beaten; ++iter) {
    bool drew = false;
    for (uint32_t s = 0; s < cfg.n_a; ++s) {
      auto rc = sample_random_child(node, rng);
      if (!rc) break;
      drew = true;
      double v = delta_value(vf, node_value, rc->delta);
      Key128 key = rc->child.canonical_key();
      if (seen.insert(key).second) {
        ++stats.children_generated;
        pool.push_back({v, key, std::move(rc->child)});
        if (v > pool_best) pool_best = v;
      }
      if (v > bar) beaten = true;
    }
    if (!drew || pool.empty()) break;
    if (!beaten) bar -= (bar - pool_best) / 2;
  }
  std::sort(pool.begin(), pool.end(), cand_better);
  if (pool.size() > cfg.n_a) pool.erase(pool.begin() + cfg.n_a, pool.end());

  Selection out;
  for (ChildCand& c : pool) {
    (c.value >= gate ? out.open : out.reserve).push_back(std::move(c));
  }
  return out;
}

Selection select_random(const ValueFunction& vf, std::mt19937_64& rng,
                        const SolverConfig& cfg, const CoalitionStructure& node,
                        double node_value, double gate, AgentStats& stats) {
  Selection out;
  std::unordered_set<Key128, Key128Hash> seen;
  for (uint32_t s = 0; s < cfg.n_a; ++s) {
    auto rc = sample_random_child(node, rng);
    if (!rc) break;
    Key128 key = rc->child.canonical_key();
    if (!seen.insert(key).second) continue;
    ++stats.children_generated;
    double v = delta_value(vf, node_value, rc->delta);
    (v >= gate ? out.open : out.reserve)
        .push_back({v, key, std::move(rc->child)});
  }
  std::sort(out.open.begin(), out.open.end(), cand_better);
  std::sort(out.reserve.begin(), out.reserve.end(), cand_better);
  return out;
}

}  // namespace

SearchAgent::SearchAgent(const ValueFunction& vf, const SolverConfig& resolved,
                         uint32_t agent_id, SharedIncumbent& incumbent,
                         SearchClock& clock, AdmissionHooks* hooks)
    : vf_(vf),
      cfg_(resolved),
      id_(agent_id),
      incumbent_(incumbent),
      clock_(clock),
      hooks_(hooks) {
  uint64_t state = cfg_.seed + 0x9e3779b97f4a7c15ULL * (uint64_t(agent_id) + 1);
  rng_.seed(splitmix64(state));
}

void SearchAgent::seed(const CoalitionStructure& start, bool expand_start) {
  const double fresh = vf_.structure_value(start);
  incumbent_.try_improve(start, fresh, id_);
  if (!expand_start) return;
  Key128 key = start.canonical_key();
  if (hooks_) {
    // duplicate starts: whoever registers second walks away and idles
    if (!hooks_->on_admit(key, id_, ListTag::kOpen, 0)) {
      ++stats_.conflict_dropped;
      return;
    }
    if (!hooks_->begin_expand(key, id_)) {
      ++stats_.stale_pops;
      return;
    }
  }
  expand(Entry{fresh, key, start.pack(), ListTag::kOpen});
}

bool SearchAgent::step() {
  if (open_.empty() && !refill_open()) return false;
  Entry e = *open_.begin();
  open_.erase(open_.begin());

  // Entries admitted under an older incumbent may no longer deserve
  // expansion; push them down to reserve once. Reserve-origin entries have
  // already been through this and expand unconditionally.
  if (e.origin != ListTag::kReserve) {
    if (e.value < cfg_.omega * incumbent_.value()) {
      ++stats_.demotions;
      e.origin = ListTag::kReserve;
      insert_bounded(reserve_, std::move(e));
      return true;
    }
  }

  if (hooks_ && !hooks_->begin_expand(e.key, id_)) {
    ++stats_.stale_pops;
    return true;
  }

  expand(std::move(e));
  return true;
}

bool SearchAgent::refill_open() {
  if (!substitute_.empty()) {
    open_.swap(substitute_);
    ++stats_.list_promotions;
    return true;
  }
  if (!reserve_.empty()) {
    open_.swap(reserve_);
    ++stats_.list_promotions;
    return true;
  }
  return false;
}

void SearchAgent::expand(Entry e) {
  const CoalitionStructure node = CoalitionStructure::unpack(e.packed);
  clock_.expansions.fetch_add(1, std::memory_order_relaxed);
  ++stats_.expansions;
  if (log_expansions_) expanded_keys_.push_back(e.key);

  const double v_star = incumbent_.value();
  const double gate = cfg_.omega * v_star;

  Selection sel;
  switch (cfg_.child_select) {
    case ChildSelect::kQuantity:
      sel = select_quantity(vf_, cfg_, node, e.value, gate, stats_);
      break;
    case ChildSelect::kValue:
      sel = select_value(vf_, rng_, cfg_, node, e.value, gate, v_star, stats_);
      break;
    case ChildSelect::kRandom:
      sel = select_random(vf_, rng_, cfg_, node, e.value, gate, stats_);
      break;
  }

  // theta caps what one expansion may retain; open entries outrank reserve
  // ones by construction (they sit at or above the gate)
  if (sel.open.size() > cfg_.theta) {
    sel.open.erase(sel.open.begin() + cfg_.theta, sel.open.end());
    sel.reserve.clear();
  } else if (sel.open.size() + sel.reserve.size() > cfg_.theta) {
    sel.reserve.erase(sel.reserve.begin() + (cfg_.theta - sel.open.size()),
                      sel.reserve.end());
  }
  for (const ChildCand& c : sel.open) admit(c.value, c.cs, c.key, ListTag::kOpen);
  for (const ChildCand& c : sel.reserve) {
    admit(c.value, c.cs, c.key, ListTag::kReserve);
  }

  // anytime update: when the expanded node looks like an improvement, walk a
  // bridge from the current best toward it (harvesting intermediates), then
  // publish whichever end survives the fresh evaluation
  if (e.value > v_star) {
    const double fresh = vf_.structure_value(node);
    if (fresh > incumbent_.value() && incumbent_.has_best()) {
      auto [old_best, old_val] = incumbent_.snapshot();
      if (!(old_best == node)) {
        ++stats_.bridges;
        BridgeStats bs = execute_path_strategy(cfg_.bridge, vf_, old_best,
                                               old_val, node, *this);
        stats_.bridge_nodes += bs.nodes_emitted;
        stats_.bridge_improvements += bs.improvements;
      }
    }
    if (fresh > incumbent_.value()) incumbent_.try_improve(node, fresh, id_);
  }
}

void SearchAgent::admit(double value, const CoalitionStructure& cs,
                        const Key128& key, ListTag tag) {
  ScoredList& target = tag == ListTag::kOpen      ? open_
                       : tag == ListTag::kReserve ? reserve_
                                                  : substitute_;
  if (hooks_) {
    uint32_t rank = rank_in(target, value, key);
    if (!hooks_->on_admit(key, id_, tag, rank)) {
      ++stats_.conflict_dropped;
      return;
    }
  }
  if (insert_bounded(target, Entry{value, key, cs.pack(), tag})) {
    switch (tag) {
      case ListTag::kOpen: ++stats_.admitted_open; break;
      case ListTag::kReserve: ++stats_.admitted_reserve; break;
      case ListTag::kSubstitute: ++stats_.admitted_substitute; break;
    }
  }
}

bool SearchAgent::insert_bounded(ScoredList& list, Entry e) {
  if (cfg_.max_list_nodes && list.size() >= cfg_.max_list_nodes) {
    auto worst = std::prev(list.end());
    if (!EntryOrder{}(e, *worst)) {
      ++stats_.capacity_dropped;
      return false;
    }
    list.erase(worst);
    ++stats_.capacity_dropped;
  }
  list.insert(std::move(e));
  return true;
}

uint32_t SearchAgent::rank_in(const ScoredList& list, double value,
                              const Key128& key) const {
  Entry probe{value, key, {}, ListTag::kOpen};
  uint32_t rank = 0;
  for (auto it = list.begin(); it != list.end() && rank < kRankCap; ++it) {
    if (!EntryOrder{}(*it, probe)) break;
    ++rank;
  }
  return rank;
}

void SearchAgent::admit_substitute(const CoalitionStructure& node,
                                   double value) {
  admit(value, node, node.canonical_key(), ListTag::kSubstitute);
}

void SearchAgent::offer_improvement(const CoalitionStructure& node,
                                    double /*value*/) {
  const double fresh = vf_.structure_value(node);
  if (fresh > incumbent_.value()) incumbent_.try_improve(node, fresh, id_);
}

std::vector<std::pair<ListTag, Key128>> SearchAgent::list_keys() const {
  std::vector<std::pair<ListTag, Key128>> out;
  out.reserve(open_.size() + reserve_.size() + substitute_.size());
  for (const Entry& e : open_) out.emplace_back(ListTag::kOpen, e.key);
  for (const Entry& e : reserve_) out.emplace_back(ListTag::kReserve, e.key);
  for (const Entry& e : substitute_) {
    out.emplace_back(ListTag::kSubstitute, e.key);
  }
  return out;
}

void SearchAgent::retain_entries(
    const std::function<bool(const Key128&)>& keep) {
  for (ScoredList* list : {&open_, &reserve_, &substitute_}) {
    for (auto it = list->begin(); it != list->end();) {
      it = keep(it->key) ? std::next(it) : list->erase(it);
    }
  }
}

}  // namespace csg
