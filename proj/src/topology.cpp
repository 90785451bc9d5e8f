#include "oscar/topology.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "oscar/errors.hpp"
#include "oscar/rng.hpp"

namespace oscar {

void WaxmanParams::validate() const {
  if (node_count < 2) throw ConfigError("node_count must be >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0,1]");
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0,1]");
  if (!(side > 0.0)) throw ConfigError("side length must be positive");
  if (max_retries < 1) throw ConfigError("max_retries must be >= 1");
}

void CapacityDistributions::validate() const {
  if (qubits_lo < 1 || qubits_lo > qubits_hi) throw ConfigError("qubit range must satisfy 1 <= lo <= hi");
  if (channels_lo < 1 || channels_lo > channels_hi) {
    throw ConfigError("channel range must satisfy 1 <= lo <= hi");
  }
}

void WorkloadParams::validate() const {
  if (pairs_lo < 1 || pairs_lo > pairs_hi) throw ConfigError("pair range must satisfy 1 <= lo <= hi");
  if (pairs_hi > max_pairs) throw ConfigError("pairs_hi must not exceed max_pairs");
}

double waxman_edge_probability(double distance, double max_distance, double alpha, double beta) {
  if (max_distance <= 0.0) return beta;
  return beta * std::exp(-distance / (alpha * max_distance));
}

namespace {

std::vector<Node> place_nodes(int count, double side, Rng& rng) {
  std::uniform_real_distribution<double> coord(0.0, side);
  std::vector<Node> nodes(static_cast<std::size_t>(count));
  for (Node& n : nodes) {
    n.x = coord(rng);
    n.y = coord(rng);
  }
  return nodes;
}

double distance(const Node& a, const Node& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double max_pair_distance(const std::vector<Node>& nodes) {
  double d = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) d = std::max(d, distance(nodes[i], nodes[j]));
  }
  return d;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> draw_waxman_edges(const std::vector<Node>& placed,
                                                                   double alpha, double beta,
                                                                   Rng& rng) {
  const double dmax = max_pair_distance(placed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < placed.size(); ++i) {
    for (std::size_t j = i + 1; j < placed.size(); ++j) {
      const double p = waxman_edge_probability(distance(placed[i], placed[j]), dmax, alpha, beta);
      if (unit(rng) < p) out.emplace_back(i, j);
    }
  }
  return out;
}

QdnGraph generate_waxman(const WaxmanParams& params, const CapacityDistributions& caps,
                         const LinkModel& link) {
  params.validate();
  caps.validate();
  Rng rng = make_rng(params.seed, Stream::kTopology);
  std::uniform_int_distribution<int> qubits(caps.qubits_lo, caps.qubits_hi);
  std::uniform_int_distribution<int> channels(caps.channels_lo, caps.channels_hi);

  for (int attempt = 0; attempt < params.max_retries; ++attempt) {
    std::vector<Node> nodes = place_nodes(params.node_count, params.side, rng);
    const auto pairs = draw_waxman_edges(nodes, params.alpha, params.beta, rng);
    for (Node& n : nodes) n.qubits = qubits(rng);
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
      edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), channels(rng),
                       link.attempt_prob});
    }
    QdnGraph graph(std::move(nodes), std::move(edges), link.attempts);
    if (graph.connected()) return graph;
  }
  throw GenerationError("no connected Waxman graph after " + std::to_string(params.max_retries) +
                        " draws");
}

double calibrate_waxman_beta(int node_count, double alpha, double side, double target_degree,
                             std::uint64_t seed, int samples) {
  if (node_count < 2) throw ConfigError("node_count must be >= 2");
  // Expected degree is linear in beta: E[deg] = beta * mean_i sum_j exp(-d_ij/(alpha dmax)) / n.
  Rng rng = make_rng(seed, Stream::kTopology, 0xCA11B);
  double weight = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto nodes = place_nodes(node_count, side, rng);
    const double dmax = max_pair_distance(nodes);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        sum += waxman_edge_probability(distance(nodes[i], nodes[j]), dmax, alpha, 1.0);
      }
    }
    weight += 2.0 * sum / static_cast<double>(node_count);
  }
  weight /= samples;
  return std::clamp(target_degree / weight, 1e-6, 1.0);
}

SlotCapacities sample_slot_capacities(const QdnGraph& graph, const CapacityDistributions& caps,
                                      int slot, std::uint64_t seed) {
  if (caps.mode == CapacityMode::kStatic) return SlotCapacities::base(graph);
  Rng rng = make_rng(seed, Stream::kCapacity, static_cast<std::uint64_t>(slot));
  std::uniform_int_distribution<int> qubits(caps.qubits_lo, caps.qubits_hi);
  std::uniform_int_distribution<int> channels(caps.channels_lo, caps.channels_hi);
  SlotCapacities out;
  out.qubits.resize(graph.node_count());
  out.channels.resize(graph.edge_count());
  for (int& q : out.qubits) q = qubits(rng);
  for (int& w : out.channels) w = channels(rng);
  return out;
}

std::vector<SdPair> sample_requests(const QdnGraph& graph, const WorkloadParams& workload,
                                    int slot, std::uint64_t seed) {
  workload.validate();
  if (graph.node_count() < 2) throw DomainError("request sampling needs at least two nodes");
  Rng rng = make_rng(seed, Stream::kWorkload, static_cast<std::uint64_t>(slot));
  std::uniform_int_distribution<int> count(workload.pairs_lo, workload.pairs_hi);
  const auto n = static_cast<std::uint32_t>(graph.node_count());
  std::uniform_int_distribution<std::uint32_t> first(0, n - 1);
  std::uniform_int_distribution<std::uint32_t> second(0, n - 2);
  const int k = count(rng);
  std::vector<SdPair> pairs;
  pairs.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const std::uint32_t s = first(rng);
    std::uint32_t d = second(rng);
    if (d >= s) ++d;  // uniform over the n-1 nodes other than s
    pairs.push_back({static_cast<NodeId>(s), static_cast<NodeId>(d)});
  }
  return pairs;
}

void write_workload_replay(std::ostream& os, const std::vector<std::vector<SdPair>>& slots) {
  for (std::size_t t = 0; t < slots.size(); ++t) {
    os << t << ':';
    for (const SdPair& p : slots[t]) os << ' ' << index(p.source) << '-' << index(p.destination);
    os << '\n';
  }
}

std::vector<std::vector<SdPair>> read_workload_replay(std::istream& is) {
  std::vector<std::vector<SdPair>> slots;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ConfigError("malformed replay line: " + line);
    const std::size_t t = std::stoul(line.substr(0, colon));
    if (t != slots.size()) throw ConfigError("replay slots must be consecutive from 0");
    std::istringstream rest(line.substr(colon + 1));
    std::vector<SdPair> pairs;
    std::string tok;
    while (rest >> tok) {
      const auto dash = tok.find('-');
      if (dash == std::string::npos) throw ConfigError("malformed pair: " + tok);
      pairs.push_back({static_cast<NodeId>(std::stoul(tok.substr(0, dash))),
                       static_cast<NodeId>(std::stoul(tok.substr(dash + 1)))});
    }
    slots.push_back(std::move(pairs));
  }
  return slots;
}

}  // namespace oscar
