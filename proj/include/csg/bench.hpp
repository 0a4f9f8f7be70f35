#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csg/distributions.hpp"
#include "csg/multi_search.hpp"

namespace csg {

// ---- anytime trace files: one JSON object per line ----
// {"elapsed_ms":t,"best_value":v,"level":l,"expansions":e}
// Under logical budgets elapsed_ms carries the expansion tick instead of wall
// time, which is what makes re-runs byte-comparable.

void write_trace(const std::string& path, const std::vector<TraceEvent>& events);
std::vector<TraceEvent> read_trace(const std::string& path);

// Strictly increasing values, nondecreasing ticks and expansion counts.
// Violations raise IntegrityError mentioning `name`.
void validate_trace(const std::vector<TraceEvent>& events,
                    const std::string& name);

// Global best-so-far envelope of several traces: merge all events by tick and
// keep those that raise the running maximum.
std::vector<TraceEvent> trace_envelope(
    const std::vector<std::vector<TraceEvent>>& traces);

// ---- experiment runner ----

struct ExperimentSpec {
  DistributionSpec distribution;
  std::vector<uint32_t> n_values;
  uint32_t instances = 20;
  SolverConfig solver;   // budgets below override its limits
  uint32_t agents = 4;
  bool sequential = true;
  // exactly one budget should be set; expansion budgets switch the solver to
  // logical ticks and make reports machine-independent
  double budget_s = 5.0;
  uint64_t budget_expansions = 0;
  bool oracle = false;           // exact optimum per instance; every n <= 25
  bool stop_at_optimum = true;   // with oracle on: halt once quality reaches 1
  uint64_t seed = 1;
  std::string out_path;          // CSV rows; "<out>.summary.json" beside it
};

struct MetricsRow {
  std::string distribution;
  uint32_t n = 0;
  uint64_t seed = 0;
  double best_value = 0;
  double elapsed_to_best = 0;  // ms, or expansion tick under logical budgets
  uint64_t expansions = 0;
  std::optional<double> optimum;
  std::optional<double> quality;        // best / optimum, present iff oracle ran
  std::optional<bool> success;          // quality == 1 within 1e-9 relative
  std::optional<double> gain_vs_singleton;
  std::string error;  // nonempty: this instance failed; metric cells are blank
};

struct AggregateRow {
  uint32_t n = 0;
  uint32_t instances = 0;  // rows without error
  double mean_best_value = 0;
  double mean_expansions = 0;
  std::optional<double> mean_quality;
  std::optional<double> success_rate;
  std::optional<double> mean_gain_vs_singleton;
};

struct ExperimentReport {
  std::vector<MetricsRow> rows;        // deterministic order: n, then instance
  std::vector<AggregateRow> aggregates;
  std::string csv_path;
  std::string summary_path;
};

// per-instance generator seed; pinned so specs name their instances
uint64_t instance_seed(uint64_t base, uint32_t n, uint32_t index);

// recomputed from rows only, so summary and raw sections cannot drift
std::vector<AggregateRow> aggregate_rows(const std::vector<MetricsRow>& rows);

// Run every (n, instance) point: generate the value function, solve under
// budget, optionally compare against the exact optimum, then write the CSV
// and the JSON summary. Instance failures become per-row error records.
// CSG_WORKERS (default 1) runs instances in parallel worker slots; rows keep
// their deterministic order regardless.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// success tolerance shared by the runner and the acceptance checks
constexpr double kSuccessRelTol = 1e-9;

}  // namespace csg
