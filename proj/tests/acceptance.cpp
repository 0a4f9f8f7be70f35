// End-to-end qualification gate. Each criterion prints exactly one
// "PASS — ..." or "FAIL — ..." line; the process exits nonzero if any fail.
#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "csg/bench.hpp"
#include "csg/errors.hpp"
#include "csg/multi_search.hpp"
#include "csg/neighbors.hpp"
#include "csg/oracle.hpp"
#include "helpers.hpp"

using namespace csg;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, bool ok, const std::string& text) {
  std::printf("%s — %d. %s\n", ok ? "PASS" : "FAIL", idx, text.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ---- criterion 1: exact oracle vs independent enumeration ----

void criterion_1() {
  const auto t0 = Clock::now();
  uint64_t checked = 0, violations = 0;
  for (uint32_t n = 2; n <= 8; ++n) {
    for (uint32_t i = 0; i < 100; ++i) {
      TableValueFunction vf = testutil::random_table(n, 1000 * n + i);
      OracleResult dp = optimal_dp(vf);
      testutil::RefBest ref = testutil::ref_best(vf, n);
      ++checked;
      if (dp.value != ref.value || testutil::to_blocks(dp.optimum) != ref.blocks) {
        ++violations;
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = violations == 0 && secs < 60.0;
  report(1, ok,
         "oracle equals exhaustive enumeration on 700 instances (n 2..8), " +
             fmt("%.1f", secs) + " s, violations " + std::to_string(violations));
}

// ---- criteria 2-4 share the benchmark reports ----

ExperimentReport pascal_report(const std::string& out) {
  ExperimentSpec spec;
  spec.distribution = parse_distribution_spec("pascal", "");
  for (uint32_t n = 4; n <= 15; ++n) spec.n_values.push_back(n);
  spec.instances = 20;
  spec.agents = 4;
  spec.sequential = true;
  spec.budget_s = 5.0;
  spec.oracle = true;
  spec.stop_at_optimum = true;
  spec.seed = 301;
  spec.out_path = out;
  return run_experiment(spec);
}

ExperimentReport classic_report(const std::string& family, uint64_t seed,
                                const std::string& out) {
  ExperimentSpec spec;
  spec.distribution = parse_distribution_spec(family, "");
  for (uint32_t n = 10; n <= 15; ++n) spec.n_values.push_back(n);
  spec.instances = 20;
  spec.agents = 4;
  spec.sequential = true;
  spec.budget_s = 5.0;
  spec.oracle = true;
  spec.stop_at_optimum = true;
  spec.seed = seed;
  spec.out_path = out;
  return run_experiment(spec);
}

void criterion_2(const std::vector<const ExperimentReport*>& reports) {
  uint64_t rows = 0, violations = 0;
  for (const ExperimentReport* rep : reports) {
    for (const MetricsRow& r : rep->rows) {
      ++rows;
      if (!r.error.empty()) {
        ++violations;  // includes any best-above-optimum integrity trip
        continue;
      }
      if (!r.quality || !r.optimum) {
        ++violations;
        continue;
      }
      if (!(*r.quality > 0.0 && *r.quality <= 1.0)) ++violations;
      if (r.best_value > *r.optimum) ++violations;
    }
  }
  report(2, violations == 0,
         "heuristic never exceeds the oracle across " + std::to_string(rows) +
             " oracle rows, violations " + std::to_string(violations));
}

void criterion_3(const ExperimentReport& rep) {
  uint64_t with = 0, succ = 0, errors = 0;
  for (const MetricsRow& r : rep.rows) {
    if (!r.error.empty()) {
      ++errors;
      continue;
    }
    if (r.success) {
      ++with;
      if (*r.success) ++succ;
    }
  }
  const double rate = with ? double(succ) / double(with) : 0.0;
  const bool ok = errors == 0 && with == rep.rows.size() && rate >= 0.95;
  report(3, ok,
         "pascal success rate " + fmt("%.3f", rate) + " over " +
             std::to_string(with) + " instances (n 4..15, 20 x 5 s, m=4)");
}

void criterion_4(const std::vector<std::pair<std::string, const ExperimentReport*>>& reps) {
  bool ok = true;
  std::string detail;
  for (const auto& [family, rep] : reps) {
    double sum = 0;
    uint64_t with = 0, errors = 0;
    for (const MetricsRow& r : rep->rows) {
      if (!r.error.empty()) {
        ++errors;
        continue;
      }
      if (r.quality) {
        sum += *r.quality;
        ++with;
      }
    }
    const double mean = with ? sum / double(with) : 0.0;
    ok = ok && errors == 0 && with == rep->rows.size() && mean >= 0.98;
    if (!detail.empty()) detail += ", ";
    detail += family + " " + fmt("%.4f", mean);
  }
  report(4, ok, "mean quality (n 10..15, 20 x 5 s): " + detail);
}

// ---- criterion 5: bridging-path laws ----

struct PathCheck {
  uint64_t violations = 0;

  void endpoint(const BridgePath& p, const CoalitionStructure& target) {
    if (p.nodes.empty() || p.moves.size() != p.nodes.size() ||
        p.nodes.back().canonical_key() != target.canonical_key()) {
      ++violations;
    }
  }
  // every edge is one split or merge; levels move by exactly one
  void walk(const BridgePath& p, const CoalitionStructure& source) {
    const CoalitionStructure* prev = &source;
    for (size_t i = 0; i < p.nodes.size(); ++i) {
      const CoalitionStructure& cur = p.nodes[i];
      const int dl = int(cur.level()) - int(prev->level());
      if (dl != 1 && dl != -1) ++violations;
      if (p.moves[i].kind == MoveKind::kSplit && dl != 1) ++violations;
      if (p.moves[i].kind == MoveKind::kMerge && dl != -1) ++violations;
      if (!structures_adjacent(*prev, cur)) ++violations;
      prev = &cur;
    }
  }
};

void criterion_5() {
  PathCheck chk;
  uint64_t pairs = 0;

  for (uint32_t n = 2; n <= 7; ++n) {
    std::vector<CoalitionStructure> all;
    for (const auto& p : testutil::ref_partitions(n)) {
      all.push_back(testutil::to_cs(n, p));
    }
    for (const CoalitionStructure& a : all) {
      for (const CoalitionStructure& b : all) {
        if (a.canonical_key() == b.canonical_key()) continue;
        ++pairs;
        const uint32_t l1 = a.level(), l2 = b.level();
        BridgePath stm = split_then_merge(a, b);
        if (stm.moves.size() != size_t((n - l1) + (n - l2))) ++chk.violations;
        chk.endpoint(stm, b);
        BridgePath mts = merge_then_split(a, b);
        if (mts.moves.size() != size_t(l1 + l2 - 2)) ++chk.violations;
        chk.endpoint(mts, b);
        if (std::min(stm.moves.size(), mts.moves.size()) > size_t(n - 1)) {
          ++chk.violations;
        }
        BridgePath ats = approach_then_swap(a, b);
        chk.endpoint(ats, b);
      }
    }
  }

  // deep validation on random pairs at larger n
  std::mt19937_64 rng(505);
  uint64_t sampled = 0;
  while (sampled < 10000) {
    std::uniform_int_distribution<uint32_t> pick_n(8, 12);
    const uint32_t n = pick_n(rng);
    CoalitionStructure a = random_structure(n, rng);
    CoalitionStructure b = random_structure(n, rng);
    if (a.canonical_key() == b.canonical_key()) continue;
    ++sampled;
    const uint32_t l1 = a.level(), l2 = b.level();
    BridgePath stm = split_then_merge(a, b);
    if (stm.moves.size() != size_t((n - l1) + (n - l2))) ++chk.violations;
    chk.endpoint(stm, b);
    chk.walk(stm, a);
    BridgePath mts = merge_then_split(a, b);
    if (mts.moves.size() != size_t(l1 + l2 - 2)) ++chk.violations;
    chk.endpoint(mts, b);
    chk.walk(mts, a);
    if (std::min(stm.moves.size(), mts.moves.size()) > size_t(n - 1)) {
      ++chk.violations;
    }
    BridgePath ats = approach_then_swap(a, b);
    chk.endpoint(ats, b);
    chk.walk(ats, a);
  }

  report(5, chk.violations == 0,
         "bridging lengths and walks hold on " + std::to_string(pairs) +
             " exhaustive (n<=7) + 10000 random (n<=12) pairs, violations " +
             std::to_string(chk.violations));
}

// ---- criterion 6: exclusive lists, unique expansions ----

void criterion_6() {
  uint64_t runs = 0, violations = 0;
  const uint32_t ms[3] = {2, 4, 8};
  for (uint32_t i = 0; i < 50; ++i) {
    const uint32_t m = ms[i % 3];
    const uint32_t n = 6 + (i % 7);  // 6..12
    auto vf = make_distribution(parse_distribution_spec("uniform", ""), n,
                                7000 + i);
    MultiConfig mc;
    mc.base.seed = i;
    mc.base.max_expansions = 600;
    mc.base.logical_trace = true;
    mc.agents = m;
    mc.sequential = (i % 5 != 0);  // every fifth run threads
    mc.audit = true;
    RunResult res = run_multi(*vf, mc);
    ++runs;
    if (!res.stats.audit || !res.stats.audit->exclusive_lists ||
        !res.stats.audit->unique_expansions) {
      ++violations;
    }
  }
  report(6, violations == 0,
         "list exclusivity and expansion uniqueness audits on " +
             std::to_string(runs) + " runs (m in {2,4,8}, n 6..12), violations " +
             std::to_string(violations));
}

// ---- criterion 7: anytime traces and truncation ----

void criterion_7() {
  uint64_t runs = 0, violations = 0;
  const char* families[3] = {"uniform", "normal", "gamma"};
  const uint32_t ms[3] = {1, 2, 4};

  for (uint32_t i = 0; i < 60; ++i) {
    const uint32_t n = 6 + (i % 6);  // 6..11
    const uint32_t m = ms[i % 3];
    auto vf = make_distribution(
        parse_distribution_spec(families[i % 3], ""), n, 9000 + i);
    MultiConfig mc;
    mc.base.seed = 31 * i + 1;
    mc.base.max_expansions = 400;
    mc.base.logical_trace = true;
    mc.agents = m;
    RunResult res = run_multi(*vf, mc);
    ++runs;
    try {
      validate_trace(res.trace, "run");
    } catch (const IntegrityError&) {
      ++violations;
      continue;
    }
    if (res.trace.empty() || res.value != res.trace.back().value) {
      ++violations;
      continue;
    }

    // truncate at up to three publication timestamps and re-run
    std::vector<size_t> picks;
    for (size_t e = 0; e < res.trace.size() && picks.size() < 3; ++e) {
      if (res.trace[e].expansions >= m) {
        if (picks.empty() || e == res.trace.size() - 1 ||
            e == res.trace.size() / 2) {
          picks.push_back(e);
        }
      }
    }
    for (size_t e : picks) {
      const uint64_t cut = res.trace[e].expansions;
      double expect = res.trace[e].value;
      for (const TraceEvent& ev : res.trace) {
        if (ev.expansions <= cut) expect = ev.value;
      }
      MultiConfig trunc = mc;
      trunc.base.max_expansions = cut;
      RunResult rr = run_multi(*vf, trunc);
      ++runs;
      try {
        validate_trace(rr.trace, "truncated");
      } catch (const IntegrityError&) {
        ++violations;
        continue;
      }
      if (rr.value != expect) ++violations;
    }
  }
  report(7, violations == 0 && runs >= 200,
         "strictly increasing traces and exact truncation replay on " +
             std::to_string(runs) + " runs, violations " +
             std::to_string(violations));
}

// ---- criterion 8: one agent through the driver == bare engine ----

void criterion_8() {
  uint64_t violations = 0;
  const char* families[3] = {"uniform", "normal", "beta"};
  const StartPolicy starts[3] = {StartPolicy::kBottom, StartPolicy::kTop,
                                 StartPolicy::kRandom};
  for (uint32_t i = 0; i < 50; ++i) {
    const uint32_t n = 6 + (i % 7);
    auto vf = make_distribution(
        parse_distribution_spec(families[i % 3], ""), n, 4000 + i);

    SolverConfig base;
    base.seed = i;
    base.max_expansions = 300;
    base.logical_trace = true;
    base.start = starts[(i / 3) % 3];

    MultiConfig mc;
    mc.base = base;
    mc.agents = 1;
    RunResult driver = run_multi(*vf, mc);

    SolverConfig cfg = resolve_config(base, n);
    SearchClock clock;
    clock.logical = cfg.logical_trace;
    SharedIncumbent incumbent(clock);
    SearchAgent agent(*vf, cfg, 0, incumbent, clock, nullptr);
    const auto stop = [&]() {
      return clock.expansions.load() >= cfg.max_expansions;
    };
    agent.seed(assign_start_nodes(n, 1, cfg)[0], !stop());
    while (!stop() && agent.step()) {
    }

    bool same = driver.value == incumbent.value() &&
                driver.best.canonical_key() == incumbent.best().canonical_key() &&
                driver.expansions == clock.expansions.load();
    const auto manual = incumbent.trace();
    same = same && driver.trace.size() == manual.size();
    if (same) {
      for (size_t e = 0; e < manual.size(); ++e) {
        same = same && driver.trace[e].tick == manual[e].tick &&
               driver.trace[e].value == manual[e].value &&
               driver.trace[e].level == manual[e].level &&
               driver.trace[e].expansions == manual[e].expansions;
      }
    }
    if (!same) ++violations;
  }
  report(8, violations == 0,
         "m=1 driver is bit-identical to the bare engine on 50 instances, "
         "violations " +
             std::to_string(violations));
}

// ---- criterion 9: large lazy instance under a wall budget ----

void criterion_9() {
  const uint32_t n = 500;
  auto vf = make_distribution(
      parse_distribution_spec("agent-based-uniform", ""), n, 99);

  MultiConfig mc;
  mc.base.seed = 9;
  mc.base.time_limit_s = 10.0;
  mc.base.max_list_nodes = 20000;  // documented large-n setting
  mc.agents = 4;
  mc.sequential = true;

  const auto t0 = Clock::now();
  RunResult res = run_multi(*vf, mc);
  const double wall = seconds_since(t0);

  bool valid = res.best.n() == n;
  try {
    // re-validate the partition from its raw coalitions
    auto blocks = res.best.coalitions();
    CoalitionStructure again = CoalitionStructure::make(n, std::move(blocks));
    valid = valid && again.canonical_key() == res.best.canonical_key();
  } catch (const std::exception&) {
    valid = false;
  }

  const double singleton = vf->structure_value(CoalitionStructure::top(n));
  struct rusage ru;
  getrusage(RUSAGE_SELF, &ru);
  const double peak_gb = double(ru.ru_maxrss) / (1024.0 * 1024.0);

  const bool ok = wall <= 13.0 && valid && res.value >= singleton &&
                  res.expansions > 0 && peak_gb < 1.5;
  report(9, ok,
         "n=500 lazy run: " + fmt("%.1f", wall) + " s, value " +
             fmt("%.3g", res.value) + " >= singleton " + fmt("%.3g", singleton) +
             ", peak rss " + fmt("%.2f", peak_gb) + " GB < 1.50 GB");
}

// ---- criterion 10: byte-identical reports ----

void criterion_10() {
  ExperimentSpec spec;
  spec.distribution = parse_distribution_spec("uniform", "");
  spec.n_values = {6, 8};
  spec.instances = 5;
  spec.agents = 4;
  spec.sequential = true;
  spec.budget_s = 0;
  spec.budget_expansions = 400;
  spec.oracle = true;
  spec.seed = 77;

  testutil::TempDir d1, d2;
  spec.out_path = d1.file("r.csv");
  ExperimentReport a = run_experiment(spec);
  spec.out_path = d2.file("r.csv");
  ExperimentReport b = run_experiment(spec);

  const auto slurp = [](const std::string& p) {
    std::string text;
    if (FILE* f = std::fopen(p.c_str(), "rb")) {
      char buf[4096];
      size_t got;
      while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
      std::fclose(f);
    }
    return text;
  };
  const std::string csv1 = slurp(a.csv_path), csv2 = slurp(b.csv_path);
  const std::string sum1 = slurp(a.summary_path), sum2 = slurp(b.summary_path);
  const bool ok = !csv1.empty() && csv1 == csv2 && !sum1.empty() && sum1 == sum2;
  report(10, ok,
         "sequential re-runs write byte-identical reports (csv " +
             std::to_string(csv1.size()) + " B, summary " +
             std::to_string(sum1.size()) + " B)");
}

}  // namespace

int main() {
  criterion_1();

  testutil::TempDir bench_dir;
  ExperimentReport pascal = pascal_report(bench_dir.file("pascal.csv"));
  ExperimentReport normal =
      classic_report("normal", 401, bench_dir.file("normal.csv"));
  ExperimentReport uniform =
      classic_report("uniform", 402, bench_dir.file("uniform.csv"));
  ExperimentReport beta =
      classic_report("beta", 403, bench_dir.file("beta.csv"));

  criterion_2({&pascal, &normal, &uniform, &beta});
  criterion_3(pascal);
  criterion_4({{"normal", &normal}, {"uniform", &uniform}, {"beta", &beta}});
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
