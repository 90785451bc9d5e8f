#include "oscar/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "oscar/errors.hpp"

namespace oscar {

using nlohmann::json;

namespace {

void allow_keys(const json& obj, std::string_view where,
                std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void read_range(const json& obj, const char* key, int& lo, int& hi) {
  if (!obj.contains(key)) return;
  const json& r = obj.at(key);
  if (!r.is_array() || r.size() != 2) throw ConfigError(std::string(key) + " must be [lo, hi]");
  lo = r[0].get<int>();
  hi = r[1].get<int>();
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

}  // namespace

json graph_to_json(const QdnGraph& graph) {
  json nodes = json::array();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const Node& n = graph.nodes()[i];
    nodes.push_back({{"id", i}, {"qubits", n.qubits}, {"x", n.x}, {"y", n.y}});
  }
  json edges = json::array();
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    const Edge& e = graph.edges()[i];
    edges.push_back({{"id", i},
                     {"u", index(e.u)},
                     {"v", index(e.v)},
                     {"channels", e.channels},
                     {"attempt_prob", e.attempt_prob}});
  }
  return {{"attempts", graph.attempts()}, {"nodes", nodes}, {"edges", edges}};
}

QdnGraph graph_from_json(const json& doc) {
  try {
    std::vector<Node> nodes;
    for (const json& n : doc.at("nodes")) {
      if (n.at("id").get<std::size_t>() != nodes.size()) {
        throw ConfigError("node ids must be dense and in order");
      }
      nodes.push_back({n.at("qubits").get<int>(), n.value("x", 0.0), n.value("y", 0.0)});
    }
    std::vector<Edge> edges;
    for (const json& e : doc.at("edges")) {
      if (e.at("id").get<std::size_t>() != edges.size()) {
        throw ConfigError("edge ids must be dense and in order");
      }
      edges.push_back({static_cast<NodeId>(e.at("u").get<std::uint32_t>()),
                       static_cast<NodeId>(e.at("v").get<std::uint32_t>()),
                       e.at("channels").get<int>(), e.at("attempt_prob").get<double>()});
    }
    return QdnGraph(std::move(nodes), std::move(edges), doc.at("attempts").get<int>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed graph document: ") + e.what());
  }
}

QdnGraph load_graph(const std::filesystem::path& path) { return graph_from_json(read_file(path)); }

void save_graph(const QdnGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << graph_to_json(graph).dump(2) << '\n';
}

json config_to_json(const ExperimentConfig& c) {
  json policies = json::array();
  for (Policy p : c.policies) policies.push_back(policy_name(p));
  json doc = {
      {"seed", c.seed},
      {"trials", c.trials},
      {"workers", c.workers},
      {"output_dir", c.output_dir},
      {"policies", policies},
      {"histogram_bin_width", c.histogram_bin_width},
      {"topology",
       {{"node_count", c.topology.node_count},
        {"alpha", c.topology.alpha},
        {"beta", c.topology.beta},
        {"side", c.topology.side},
        {"max_retries", c.topology.max_retries}}},
      {"capacities",
       {{"qubits", {c.capacities.qubits_lo, c.capacities.qubits_hi}},
        {"channels", {c.capacities.channels_lo, c.capacities.channels_hi}},
        {"mode", c.capacities.mode == CapacityMode::kStatic ? "static" : "redraw"}}},
      {"link", {{"attempt_prob", c.link.attempt_prob}, {"attempts", c.link.attempts}}},
      {"workload",
       {{"pairs", {c.workload.pairs_lo, c.workload.pairs_hi}},
        {"max_pairs", c.workload.max_pairs}}},
      {"routes", {{"max_routes", c.routes.max_routes}, {"max_hops", c.routes.max_hops}}},
      {"budget",
       {{"C", c.budget.C}, {"T", c.budget.T}, {"V", c.budget.V}, {"q0", c.budget.q0}}},
      {"gibbs",
       {{"gamma", c.gibbs.gamma},
        {"max_iters", c.gibbs.max_iters},
        {"stable_window", c.gibbs.stable_window},
        {"batch_disjoint", c.gibbs.batch_disjoint},
        {"init_retries", c.gibbs.init_retries}}},
      {"selection", {{"enumeration_cap", c.enumeration_cap}}},
  };
  doc["graph_file"] = c.graph_file ? json(*c.graph_file) : json(nullptr);
  return doc;
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  allow_keys(doc, "config",
             {"seed", "trials", "workers", "output_dir", "policies", "histogram_bin_width",
              "topology", "capacities", "link", "workload", "routes", "budget", "gibbs",
              "selection", "graph_file"});
  try {
    read(doc, "seed", c.seed);
    read(doc, "trials", c.trials);
    read(doc, "workers", c.workers);
    read(doc, "output_dir", c.output_dir);
    read(doc, "histogram_bin_width", c.histogram_bin_width);
    if (doc.contains("graph_file") && !doc.at("graph_file").is_null()) {
      c.graph_file = doc.at("graph_file").get<std::string>();
    }
    if (doc.contains("policies")) {
      c.policies.clear();
      for (const json& p : doc.at("policies")) c.policies.push_back(parse_policy(p.get<std::string>()));
    }
    if (doc.contains("topology")) {
      const json& t = doc.at("topology");
      allow_keys(t, "topology", {"node_count", "alpha", "beta", "side", "max_retries"});
      read(t, "node_count", c.topology.node_count);
      read(t, "alpha", c.topology.alpha);
      read(t, "beta", c.topology.beta);
      read(t, "side", c.topology.side);
      read(t, "max_retries", c.topology.max_retries);
    }
    if (doc.contains("capacities")) {
      const json& t = doc.at("capacities");
      allow_keys(t, "capacities", {"qubits", "channels", "mode"});
      read_range(t, "qubits", c.capacities.qubits_lo, c.capacities.qubits_hi);
      read_range(t, "channels", c.capacities.channels_lo, c.capacities.channels_hi);
      if (t.contains("mode")) {
        const auto mode = t.at("mode").get<std::string>();
        if (mode == "static") {
          c.capacities.mode = CapacityMode::kStatic;
        } else if (mode == "redraw") {
          c.capacities.mode = CapacityMode::kRedrawPerSlot;
        } else {
          throw ConfigError("capacities.mode must be 'static' or 'redraw'");
        }
      }
    }
    if (doc.contains("link")) {
      const json& t = doc.at("link");
      allow_keys(t, "link", {"attempt_prob", "attempts"});
      read(t, "attempt_prob", c.link.attempt_prob);
      read(t, "attempts", c.link.attempts);
    }
    if (doc.contains("workload")) {
      const json& t = doc.at("workload");
      allow_keys(t, "workload", {"pairs", "max_pairs"});
      read_range(t, "pairs", c.workload.pairs_lo, c.workload.pairs_hi);
      read(t, "max_pairs", c.workload.max_pairs);
    }
    if (doc.contains("routes")) {
      const json& t = doc.at("routes");
      allow_keys(t, "routes", {"max_routes", "max_hops"});
      read(t, "max_routes", c.routes.max_routes);
      read(t, "max_hops", c.routes.max_hops);
    }
    if (doc.contains("budget")) {
      const json& t = doc.at("budget");
      allow_keys(t, "budget", {"C", "T", "V", "q0"});
      read(t, "C", c.budget.C);
      read(t, "T", c.budget.T);
      read(t, "V", c.budget.V);
      read(t, "q0", c.budget.q0);
    }
    if (doc.contains("gibbs")) {
      const json& t = doc.at("gibbs");
      allow_keys(t, "gibbs", {"gamma", "max_iters", "stable_window", "batch_disjoint", "init_retries"});
      read(t, "gamma", c.gibbs.gamma);
      read(t, "max_iters", c.gibbs.max_iters);
      read(t, "stable_window", c.gibbs.stable_window);
      read(t, "batch_disjoint", c.gibbs.batch_disjoint);
      read(t, "init_retries", c.gibbs.init_retries);
    }
    if (doc.contains("selection")) {
      const json& t = doc.at("selection");
      allow_keys(t, "selection", {"enumeration_cap"});
      read(t, "enumeration_cap", c.enumeration_cap);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path_or_default) {
  if (path_or_default.empty() || path_or_default == "default") {
    ExperimentConfig c;
    c.validate();
    return c;
  }
  return config_from_json(read_file(path_or_default));
}

}  // namespace oscar
