// Python bindings. Graphs and configs cross the boundary as JSON text so the
// Python side works with plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "oscar/allocation.hpp"
#include "oscar/controller.hpp"
#include "oscar/errors.hpp"
#include "oscar/harness.hpp"
#include "oscar/routes.hpp"
#include "oscar/selection.hpp"
#include "oscar/serialization.hpp"

namespace py = pybind11;
using namespace oscar;

namespace {

std::vector<std::vector<std::uint32_t>> routes_between(const std::string& graph_json,
                                                       std::uint32_t s, std::uint32_t d,
                                                       int max_routes, int max_hops) {
  const QdnGraph g = graph_from_json(nlohmann::json::parse(graph_json));
  std::vector<std::vector<std::uint32_t>> out;
  for (const Route& r : candidate_routes(g, NodeId(s), NodeId(d), {max_routes, max_hops})) {
    std::vector<std::uint32_t> nodes;
    for (NodeId v : r.nodes()) nodes.push_back(static_cast<std::uint32_t>(v));
    out.push_back(std::move(nodes));
  }
  return out;
}

py::dict run(const std::string& config_json) {
  const ExperimentConfig config = config_from_json(nlohmann::json::parse(config_json));
  ExperimentResult result;
  {
    py::gil_scoped_release release;
    result = run_experiment(config);
  }
  py::dict summary;
  for (const auto& [policy, s] : result.mean) {
    py::dict row;
    row["final_utility"] = s.final_utility;
    row["final_success"] = s.final_success;
    row["final_cost_cum"] = s.final_cost_cum;
    row["violation_bound"] = s.violation_bound;
    summary[py::str(std::string(policy_name(policy)))] = row;
  }
  py::list runs;
  for (const PolicyRun& r : result.runs) {
    py::dict row;
    row["trial"] = r.trial;
    row["policy"] = std::string(policy_name(r.policy));
    row["utility_avg"] = r.metrics.utility_avg;
    row["success_avg"] = r.metrics.success_avg;
    row["cost_cum"] = r.metrics.cost_cum;
    row["violation"] = r.violation;
    row["violation_bound"] = r.violation_bound;
    std::vector<double> q;
    for (const SlotRecord& s : r.records) q.push_back(s.q_after);
    row["q"] = q;
    runs.append(row);
  }
  py::dict out;
  out["mean"] = summary;
  out["runs"] = runs;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entanglement routing simulator core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InfeasibleSelectionError>(m, "InfeasibleSelectionError",
                                                   PyExc_RuntimeError);

  m.def("channel_success_prob", &channel_success_prob, py::arg("attempt_prob"),
        py::arg("attempts"));
  m.def("edge_success_prob", &edge_success_prob, py::arg("channel_prob"), py::arg("channels"));
  m.def("delta_gap", &delta_gap, py::arg("V"), py::arg("max_requests"), py::arg("max_hops"),
        py::arg("min_channel_prob"));
  m.def("gibbs_accept_prob", &gibbs_accept_prob, py::arg("f_new"), py::arg("f_old"),
        py::arg("gamma"));
  m.def("queue_update", &queue_update, py::arg("q"), py::arg("cost"), py::arg("C"), py::arg("T"));
  m.def("drift_constant", &drift_constant, py::arg("max_slot_cost"), py::arg("C"), py::arg("T"));
  m.def("theorem1_rhs", &theorem1_rhs, py::arg("q0"), py::arg("T"), py::arg("D"));
  m.def("theorem2_gap", &theorem2_gap, py::arg("V"), py::arg("q0"), py::arg("T"),
        py::arg("delta"), py::arg("B"));
  m.def("check_assumption1", &check_assumption1, py::arg("C"), py::arg("F"), py::arg("L"),
        py::arg("T"));

  m.def("default_config_json", [] { return config_to_json(load_config("default")).dump(); });
  m.def(
      "trial_graph_json",
      [](const std::string& config_json, int trial) {
        const ExperimentConfig c = config_from_json(nlohmann::json::parse(config_json));
        return graph_to_json(trial_graph(c, trial)).dump();
      },
      py::arg("config_json"), py::arg("trial") = 0);
  m.def("candidate_routes_json", &routes_between, py::arg("graph_json"), py::arg("source"),
        py::arg("destination"), py::arg("max_routes") = 3, py::arg("max_hops") = 5);
  m.def("run_experiment_json", &run, py::arg("config_json"));
}
