#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csg/bench.hpp"
#include "csg/errors.hpp"
#include "csg/oracle.hpp"

namespace {

using namespace csg;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "2s", "500ms", "1.5m", bare seconds
double parse_duration_s(const std::string& text) {
  if (text.empty()) throw ConfigError("empty duration");
  double scale = 1.0;
  std::string num = text;
  auto ends_with = [&](const char* suffix) {
    const size_t len = std::char_traits<char>::length(suffix);
    return num.size() > len &&
           num.compare(num.size() - len, len, suffix) == 0;
  };
  if (ends_with("ms")) {
    scale = 1e-3;
    num.resize(num.size() - 2);
  } else if (ends_with("s")) {
    num.resize(num.size() - 1);
  } else if (ends_with("m")) {
    scale = 60.0;
    num.resize(num.size() - 1);
  }
  char* end = nullptr;
  const double v = std::strtod(num.c_str(), &end);
  if (end != num.c_str() + num.size() || v < 0) {
    throw ConfigError("cannot parse duration: " + text);
  }
  return v * scale;
}

struct ValueSourceOpts {
  std::string values_file;
  std::string dist;
  std::string dist_params;
  std::string dist_config;
  uint32_t n = 0;
  uint64_t seed = 0;
};

void add_value_source(CLI::App* cmd, ValueSourceOpts& o, bool n_is_list,
                      std::vector<uint32_t>* n_list) {
  cmd->add_option("--values-file", o.values_file,
                  "characteristic function table file");
  cmd->add_option("--dist", o.dist, "value distribution family");
  cmd->add_option("--dist-params", o.dist_params,
                  "family parameter overrides, k=v[,k=v...]");
  cmd->add_option("--dist-config", o.dist_config,
                  "JSON file with {family, params}");
  if (n_is_list) {
    cmd->add_option("--n", *n_list, "agent counts")->delimiter(',');
  } else {
    cmd->add_option("--n", o.n, "agent count");
  }
  cmd->add_option("--seed", o.seed, "instance seed");
}

DistributionSpec resolve_dist(const ValueSourceOpts& o) {
  if (!o.dist_config.empty()) return load_distribution_config(o.dist_config);
  return parse_distribution_spec(o.dist, o.dist_params);
}

std::shared_ptr<ValueFunction> build_vf(const ValueSourceOpts& o) {
  if (!o.values_file.empty()) {
    auto vf = std::make_shared<TableValueFunction>(
        TableValueFunction::load(o.values_file));
    if (o.n && o.n != vf->agent_count()) {
      throw ConfigError("--n disagrees with the values file");
    }
    return vf;
  }
  if (o.dist.empty() && o.dist_config.empty()) {
    throw ConfigError(
        "no value source: provide --values-file FILE, or --dist FAMILY "
        "--n N (optionally --dist-params/--dist-config, --seed)");
  }
  if (o.n == 0) throw ConfigError("--dist needs --n");
  return make_distribution(resolve_dist(o), o.n, o.seed);
}

struct SolverOpts {
  uint32_t theta = 0;
  double omega = 0.995;
  uint32_t nc = 0;
  uint32_t na = 0;
  std::string child_select = "value";
  std::string bridge = "split_then_merge";
  std::string conflict = "manage";
  std::string start = "bottom";
  std::string time_limit;
  uint64_t max_expansions = 0;
  size_t max_list_nodes = 100000;
};

void add_solver_flags(CLI::App* cmd, SolverOpts& o) {
  cmd->add_option("--theta", o.theta, "children kept per expansion (0: 2n)");
  cmd->add_option("--omega", o.omega, "open-list admission ratio");
  cmd->add_option("--nc", o.nc, "children examined per expansion (0: auto)");
  cmd->add_option("--na", o.na, "children retained per expansion (0: auto)");
  cmd->add_option("--child-select", o.child_select,
                  "quantity | value | random");
  cmd->add_option("--bridge", o.bridge,
                  "split_then_merge | merge_then_split | approach_then_swap "
                  "| all");
  cmd->add_option("--conflict", o.conflict, "bypass | manage");
  cmd->add_option("--start", o.start,
                  "bottom | top | random | a structure literal like "
                  "\"{{0,1},{2}}\" (single-agent runs)");
  cmd->add_option("--time-limit", o.time_limit, "wall budget, e.g. 2s, 500ms");
  cmd->add_option("--max-expansions", o.max_expansions,
                  "stop after this many expansions (also switches the trace "
                  "to logical ticks)");
  cmd->add_option("--max-list-nodes", o.max_list_nodes,
                  "per-list memory cap, 0 = unlimited");
}

SolverConfig to_config(const SolverOpts& o, uint64_t seed) {
  SolverConfig cfg;
  cfg.theta = o.theta;
  cfg.omega = o.omega;
  cfg.n_c = o.nc;
  cfg.n_a = o.na;
  cfg.child_select = parse_child_select(o.child_select);
  cfg.bridge = parse_bridge_strategy(o.bridge);
  cfg.conflict = parse_conflict_policy(o.conflict);
  if (!o.start.empty() && o.start.front() == '{') {
    cfg.start = StartPolicy::kExplicit;
    cfg.start_structure = CoalitionStructure::parse(o.start).pack();
  } else {
    cfg.start = parse_start_policy(o.start);
  }
  if (!o.time_limit.empty()) cfg.time_limit_s = parse_duration_s(o.time_limit);
  cfg.max_expansions = o.max_expansions;
  cfg.logical_trace = o.max_expansions > 0 && o.time_limit.empty();
  cfg.max_list_nodes = o.max_list_nodes;
  cfg.seed = seed;
  return cfg;
}

int run_solve(const ValueSourceOpts& vs, const SolverOpts& so, uint32_t agents,
              bool parallel, const std::string& out,
              const std::string& trace_prefix) {
  auto vf = build_vf(vs);
  MultiConfig mc;
  mc.base = to_config(so, vs.seed);
  if (mc.base.time_limit_s == 0 && mc.base.max_expansions == 0) {
    mc.base.time_limit_s = 2.0;  // never run unbounded from the CLI
  }
  mc.agents = agents;
  mc.sequential = !parallel;
  RunResult res = run_multi(*vf, mc);

  std::cout << "structure " << res.best.to_string() << "\n";
  std::cout << "value " << fmt_double(res.value) << "\n";
  std::cout << "expansions " << res.expansions << "\n";
  if (!out.empty()) {
    write_trace(out, res.trace);
    std::cout << "trace " << out << "\n";
  }
  if (!trace_prefix.empty()) {
    for (uint32_t id = 0; id < res.agent_traces.size(); ++id) {
      std::string path = trace_prefix + std::to_string(id) + ".jsonl";
      write_trace(path, res.agent_traces[id]);
      std::cout << "agent_trace " << path << "\n";
    }
  }
  std::cerr << "elapsed_ms " << fmt_double(res.elapsed_ms) << "\n";
  if (agents > 1) {
    std::cerr << "conflicts " << res.stats.registry.conflicts_detected
              << " transfers " << res.stats.registry.transfers << "\n";
  }
  return 0;
}

int run_bench(const ValueSourceOpts& vs, const SolverOpts& so,
              const std::vector<uint32_t>& n_values, uint32_t instances,
              uint32_t agents, bool parallel, const std::string& budget,
              uint64_t budget_expansions, bool oracle, bool no_stop,
              const std::string& out) {
  ExperimentSpec spec;
  spec.distribution = resolve_dist(vs);
  spec.n_values = n_values;
  spec.instances = instances;
  spec.solver = to_config(so, vs.seed);
  spec.agents = agents;
  spec.sequential = !parallel;
  if (budget_expansions) {
    spec.budget_expansions = budget_expansions;
    spec.budget_s = 0;
  } else if (!budget.empty()) {
    spec.budget_s = parse_duration_s(budget);
  }
  spec.oracle = oracle;
  spec.stop_at_optimum = !no_stop;
  spec.seed = vs.seed;
  spec.out_path = out;

  ExperimentReport report = run_experiment(spec);
  std::cout << "n\tinstances\tmean_value\tmean_quality\tsuccess_rate\t"
               "mean_gain\n";
  for (const AggregateRow& a : report.aggregates) {
    std::cout << a.n << '\t' << a.instances << '\t'
              << fmt_double(a.mean_best_value) << '\t'
              << (a.mean_quality ? fmt_double(*a.mean_quality) : "-") << '\t'
              << (a.success_rate ? fmt_double(*a.success_rate) : "-") << '\t'
              << (a.mean_gain_vs_singleton
                      ? fmt_double(*a.mean_gain_vs_singleton)
                      : "-")
              << "\n";
  }
  if (!report.csv_path.empty()) {
    std::cout << "report " << report.csv_path << "\n";
    std::cout << "summary " << report.summary_path << "\n";
  }
  return 0;
}

int run_oracle(const ValueSourceOpts& vs) {
  auto vf = build_vf(vs);
  OracleResult res = optimal_dp(*vf);
  std::cout << "structure " << res.optimum.to_string() << "\n";
  std::cout << "value " << fmt_double(res.value) << "\n";
  return 0;
}

int run_trace(const std::vector<std::string>& files, const std::string& out) {
  std::vector<std::vector<TraceEvent>> traces;
  for (const std::string& f : files) {
    std::vector<TraceEvent> t = read_trace(f);
    validate_trace(t, f);
    traces.push_back(std::move(t));
  }
  std::vector<TraceEvent> env = trace_envelope(traces);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw std::runtime_error("cannot open output file: " + out);
    os = &file;
  }
  *os << "tick\tvalue\tlevel\texpansions\n";
  for (const TraceEvent& e : env) {
    *os << fmt_double(e.tick) << '\t' << fmt_double(e.value) << '\t' << e.level
        << '\t' << e.expansions << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime coalition structure generation by multi-agent search"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "one-shot solve");
  ValueSourceOpts solve_vs;
  SolverOpts solve_so;
  uint32_t solve_agents = 4;
  bool solve_parallel = false;
  std::string solve_out;
  std::string solve_trace_prefix;
  add_value_source(solve, solve_vs, false, nullptr);
  add_solver_flags(solve, solve_so);
  solve->add_option("--agents", solve_agents, "search agents");
  solve->add_flag("--parallel", solve_parallel, "one thread per agent");
  solve->add_option("--out", solve_out, "write the anytime trace here");
  solve->add_option("--trace-prefix", solve_trace_prefix,
                    "also write per-agent traces to <prefix><id>.jsonl");

  // bench
  auto* bench = app.add_subcommand("bench", "batch experiment with report");
  ValueSourceOpts bench_vs;
  SolverOpts bench_so;
  std::vector<uint32_t> bench_n;
  uint32_t bench_instances = 20;
  uint32_t bench_agents = 4;
  bool bench_parallel = false;
  std::string bench_budget;
  uint64_t bench_budget_exp = 0;
  bool bench_oracle = false;
  bool bench_no_stop = false;
  std::string bench_out;
  add_value_source(bench, bench_vs, true, &bench_n);
  add_solver_flags(bench, bench_so);
  bench->add_option("--instances", bench_instances, "instances per n");
  bench->add_option("--agents", bench_agents, "search agents per solve");
  bench->add_flag("--parallel", bench_parallel, "threaded agents per solve");
  bench->add_option("--budget", bench_budget, "wall budget per instance");
  bench->add_option("--budget-expansions", bench_budget_exp,
                    "expansion budget per instance (deterministic reports)");
  bench->add_flag("--oracle", bench_oracle, "compare against the exact optimum");
  bench->add_flag("--no-stop-at-optimum", bench_no_stop,
                  "keep running after matching the optimum");
  bench->add_option("--out", bench_out, "CSV report path");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact optimum (n <= 25)");
  ValueSourceOpts oracle_vs;
  add_value_source(oracle, oracle_vs, false, nullptr);

  // trace
  auto* trace = app.add_subcommand("trace", "validate and merge trace files");
  std::vector<std::string> trace_files;
  std::string trace_out;
  trace->add_option("files", trace_files, "trace files (JSONL)")->required();
  trace->add_option("--out", trace_out, "write the merged table here");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) {
      return run_solve(solve_vs, solve_so, solve_agents, solve_parallel,
                       solve_out, solve_trace_prefix);
    }
    if (bench->parsed()) {
      if (bench_n.empty()) throw csg::ConfigError("bench needs --n");
      return run_bench(bench_vs, bench_so, bench_n, bench_instances,
                       bench_agents, bench_parallel, bench_budget,
                       bench_budget_exp, bench_oracle, bench_no_stop,
                       bench_out);
    }
    if (oracle->parsed()) return run_oracle(oracle_vs);
    if (trace->parsed()) return run_trace(trace_files, trace_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const csg::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return 3;
  } catch (const csg::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
