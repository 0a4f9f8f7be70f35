#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <vector>

#include "csg/bench.hpp"
#include "csg/oracle.hpp"

namespace py = pybind11;
using namespace csg;

namespace {

using PyPartition = std::vector<std::vector<uint32_t>>;

CoalitionStructure to_cs(uint32_t n, const PyPartition& parts) {
  std::vector<AgentSet> sets;
  sets.reserve(parts.size());
  for (const auto& members : parts) {
    AgentSet s(n);
    for (uint32_t a : members) s.insert(a);
    sets.push_back(std::move(s));
  }
  return CoalitionStructure::make(n, std::move(sets));
}

PyPartition from_cs(const CoalitionStructure& cs) {
  PyPartition out;
  out.reserve(cs.level());
  for (const AgentSet& c : cs.coalitions()) out.push_back(c.members());
  return out;
}

AgentSet to_set(uint32_t n, const std::vector<uint32_t>& members) {
  AgentSet s(n);
  for (uint32_t a : members) s.insert(a);
  return s;
}

py::dict run_solve(const std::shared_ptr<ValueFunction>& vf, uint32_t agents,
                   double time_limit_s, uint64_t max_expansions, uint64_t seed,
                   uint32_t theta, double omega, const std::string& child_select,
                   const std::string& bridge, const std::string& conflict,
                   const std::string& start, bool sequential) {
  MultiConfig mc;
  mc.base.theta = theta;
  mc.base.omega = omega;
  mc.base.child_select = parse_child_select(child_select);
  mc.base.bridge = parse_bridge_strategy(bridge);
  mc.base.conflict = parse_conflict_policy(conflict);
  if (!start.empty() && start.front() == '{') {
    mc.base.start = StartPolicy::kExplicit;
    mc.base.start_structure = CoalitionStructure::parse(start).pack();
  } else {
    mc.base.start = parse_start_policy(start);
  }
  mc.base.time_limit_s = time_limit_s;
  mc.base.max_expansions = max_expansions;
  mc.base.logical_trace = max_expansions > 0 && time_limit_s == 0;
  mc.base.seed = seed;
  mc.agents = agents;
  mc.sequential = sequential;
  if (mc.base.time_limit_s == 0 && mc.base.max_expansions == 0) {
    mc.base.time_limit_s = 2.0;
  }

  RunResult res = run_multi(*vf, mc);
  auto to_events = [](const std::vector<TraceEvent>& events) {
    py::list lst;
    for (const TraceEvent& e : events) {
      py::dict ev;
      ev["tick"] = e.tick;
      ev["value"] = e.value;
      ev["level"] = e.level;
      ev["expansions"] = e.expansions;
      lst.append(ev);
    }
    return lst;
  };
  py::list agent_traces;
  for (const auto& t : res.agent_traces) agent_traces.append(to_events(t));
  py::dict out;
  out["structure"] = from_cs(res.best);
  out["value"] = res.value;
  out["expansions"] = res.expansions;
  out["elapsed_ms"] = res.elapsed_ms;
  out["trace"] = to_events(res.trace);
  out["agent_traces"] = agent_traces;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "anytime coalition structure generation by multi-agent search";

  py::class_<ValueFunction, std::shared_ptr<ValueFunction>>(m, "ValueFunction")
      .def_property_readonly("n", &ValueFunction::agent_count)
      .def("value",
           [](const ValueFunction& vf, const std::vector<uint32_t>& members) {
             return vf.value(to_set(vf.agent_count(), members));
           })
      .def("structure_value",
           [](const ValueFunction& vf, const PyPartition& parts) {
             return vf.structure_value(to_cs(vf.agent_count(), parts));
           });

  m.def("table_from_file", [](const std::string& path) {
    return std::shared_ptr<ValueFunction>(
        std::make_shared<TableValueFunction>(TableValueFunction::load(path)));
  });

  m.def("table_from_values", [](uint32_t n, const std::vector<double>& values) {
    return std::shared_ptr<ValueFunction>(
        std::make_shared<TableValueFunction>(n, values));
  });

  m.def(
      "distribution",
      [](const std::string& family, uint32_t n, uint64_t seed,
         const std::map<std::string, double>& params) {
        DistributionSpec spec{family, {}};
        DistributionSpec defaults = parse_distribution_spec(family, "");
        spec.params = defaults.params;
        for (const auto& [k, v] : params) {
          if (!spec.params.count(k)) {
            throw ConfigError("unknown parameter for " + family + ": " + k);
          }
          spec.params[k] = v;
        }
        return make_distribution(spec, n, seed);
      },
      py::arg("family"), py::arg("n"), py::arg("seed") = 0,
      py::arg("params") = std::map<std::string, double>{});

  m.def("distribution_names", &distribution_names);

  m.def("solve", &run_solve, py::arg("vf"), py::arg("agents") = 4,
        py::arg("time_limit_s") = 0.0, py::arg("max_expansions") = 0,
        py::arg("seed") = 0, py::arg("theta") = 0, py::arg("omega") = 0.995,
        py::arg("child_select") = "value",
        py::arg("bridge") = "split_then_merge", py::arg("conflict") = "manage",
        py::arg("start") = "bottom", py::arg("sequential") = true);

  m.def("optimal", [](const std::shared_ptr<ValueFunction>& vf) {
    OracleResult res = optimal_dp(*vf);
    py::dict out;
    out["structure"] = from_cs(res.optimum);
    out["value"] = res.value;
    return out;
  });

  m.def("partition_count", &partition_count);

  m.def("bridge_path",
        [](const std::string& strategy, uint32_t n, const PyPartition& source,
           const PyPartition& target) {
          BridgePath path = build_bridge_path(parse_bridge_strategy(strategy),
                                              to_cs(n, source),
                                              to_cs(n, target));
          std::vector<PyPartition> out;
          out.reserve(path.nodes.size());
          for (const CoalitionStructure& node : path.nodes) {
            out.push_back(from_cs(node));
          }
          return out;
        });

  m.def("parse_structure", [](const std::string& text) {
    return from_cs(CoalitionStructure::parse(text));
  });

  py::register_exception<InvalidMoveError>(m, "InvalidMoveError",
                                           PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError",
                                        PyExc_RuntimeError);
  py::register_exception<IntegrityError>(m, "IntegrityError",
                                         PyExc_RuntimeError);
}
