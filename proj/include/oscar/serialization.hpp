#pragma once

// JSON documents for graphs and experiment configurations.
//
// Graph document:
//   { "attempts": 4000,
//     "nodes": [ {"id": 0, "qubits": 12, "x": 3.5, "y": 80.1}, ... ],
//     "edges": [ {"id": 0, "u": 0, "v": 4, "channels": 6, "attempt_prob": 0.0002}, ... ] }
// Node and edge ids must be dense and listed in order.
//
// Config document: see ExperimentConfig; every key is optional and falls
// back to the built-in default. The keys are listed in README.md.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "oscar/harness.hpp"

namespace oscar {

nlohmann::json graph_to_json(const QdnGraph& graph);
QdnGraph graph_from_json(const nlohmann::json& doc);
QdnGraph load_graph(const std::filesystem::path& path);
void save_graph(const QdnGraph& graph, const std::filesystem::path& path);

nlohmann::json config_to_json(const ExperimentConfig& config);
// Unknown keys are rejected with ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
// "default" (or an empty string) yields the built-in defaults.
ExperimentConfig load_config(const std::string& path_or_default);

}  // namespace oscar
