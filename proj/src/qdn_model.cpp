#include "oscar/qdn_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "oscar/errors.hpp"
#include "oscar/rng.hpp"

namespace oscar {

QdnGraph::QdnGraph(std::vector<Node> nodes, std::vector<Edge> edges, int attempts)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), attempts_(attempts) {
  if (attempts_ < 1) throw DomainError("attempts per slot must be >= 1");
  adjacency_.resize(nodes_.size());
  for (const Node& n : nodes_) {
    if (n.qubits < 0) throw DomainError("negative qubit capacity");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  channel_prob_.reserve(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    const std::size_t a = index(e.u), b = index(e.v);
    if (a >= nodes_.size() || b >= nodes_.size()) throw DomainError("edge endpoint out of range");
    if (a == b) throw DomainError("self loop on node " + std::to_string(a));
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
      throw DomainError("duplicate edge between " + std::to_string(a) + " and " + std::to_string(b));
    }
    if (e.channels < 0) throw DomainError("negative channel capacity");
    if (!(e.attempt_prob > 0.0 && e.attempt_prob < 1.0)) {
      throw DomainError("attempt probability must lie in (0,1)");
    }
    const auto id = static_cast<EdgeId>(i);
    adjacency_[a].push_back({e.v, id});
    adjacency_[b].push_back({e.u, id});
    channel_prob_.push_back(channel_success_prob(e.attempt_prob, attempts_));
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end(),
              [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }
}

std::optional<EdgeId> QdnGraph::find_edge(NodeId a, NodeId b) const {
  const auto adj = neighbors(a);
  auto it = std::lower_bound(adj.begin(), adj.end(), b,
                             [](const Neighbor& n, NodeId v) { return n.node < v; });
  if (it != adj.end() && it->node == b) return it->edge;
  return std::nullopt;
}

double QdnGraph::min_channel_prob() const {
  if (channel_prob_.empty()) throw DomainError("graph has no edges");
  return *std::min_element(channel_prob_.begin(), channel_prob_.end());
}

long QdnGraph::total_channels() const {
  return std::accumulate(edges_.begin(), edges_.end(), 0L,
                         [](long acc, const Edge& e) { return acc + e.channels; });
}

double QdnGraph::mean_degree() const {
  if (nodes_.empty()) return 0.0;
  return 2.0 * static_cast<double>(edges_.size()) / static_cast<double>(nodes_.size());
}

bool QdnGraph::connected() const {
  if (nodes_.empty()) return true;
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (const Neighbor& n : adjacency_[v]) {
      if (!seen[index(n.node)]) {
        seen[index(n.node)] = 1;
        ++reached;
        frontier.push(index(n.node));
      }
    }
  }
  return reached == nodes_.size();
}

SlotCapacities SlotCapacities::base(const QdnGraph& graph) {
  SlotCapacities caps;
  caps.qubits.reserve(graph.node_count());
  for (const Node& n : graph.nodes()) caps.qubits.push_back(n.qubits);
  caps.channels.reserve(graph.edge_count());
  for (const Edge& e : graph.edges()) caps.channels.push_back(e.channels);
  return caps;
}

Route Route::from_nodes(const QdnGraph& graph, std::vector<NodeId> nodes) {
  if (nodes.size() < 2) throw DomainError("a route needs at least one hop");
  std::set<NodeId> seen(nodes.begin(), nodes.end());
  if (seen.size() != nodes.size()) throw DomainError("route repeats a node");
  Route r;
  r.edges_.reserve(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const auto e = graph.find_edge(nodes[i], nodes[i + 1]);
    if (!e) {
      throw DomainError("no edge between " + std::to_string(index(nodes[i])) + " and " +
                        std::to_string(index(nodes[i + 1])));
    }
    r.edges_.push_back(*e);
  }
  r.nodes_ = std::move(nodes);
  return r;
}

void Allocation::set(RequestId request, EdgeId edge, int channels) {
  if (channels < 1) throw DomainError("channel count must be >= 1");
  auto [it, inserted] = entries_.try_emplace({request, edge}, channels);
  if (!inserted) {
    cost_ -= it->second;
    it->second = channels;
  }
  cost_ += channels;
}

int Allocation::at(RequestId request, EdgeId edge) const {
  auto it = entries_.find({request, edge});
  if (it == entries_.end()) {
    throw MissingAllocationError("no allocation for request " + std::to_string(index(request)) +
                                 " on edge " + std::to_string(index(edge)));
  }
  return it->second;
}

std::optional<int> Allocation::find(RequestId request, EdgeId edge) const {
  auto it = entries_.find({request, edge});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double channel_success_prob(double attempt_prob, int attempts) {
  if (!(attempt_prob > 0.0 && attempt_prob < 1.0)) {
    throw DomainError("attempt probability must lie in (0,1)");
  }
  if (attempts < 1) throw DomainError("attempts must be >= 1");
  return -std::expm1(static_cast<double>(attempts) * std::log1p(-attempt_prob));
}

namespace {

void check_edge_args(double channel_prob, double channels) {
  if (!(channel_prob > 0.0 && channel_prob <= 1.0)) {
    throw DomainError("channel probability must lie in (0,1]");
  }
  if (!(channels >= 1.0)) throw DomainError("channel count must be >= 1");
}

}  // namespace

double edge_success_prob(double channel_prob, double channels) {
  check_edge_args(channel_prob, channels);
  if (channel_prob == 1.0) return 1.0;
  return -std::expm1(channels * std::log1p(-channel_prob));
}

double log_edge_success_prob(double channel_prob, double channels) {
  check_edge_args(channel_prob, channels);
  if (channel_prob == 1.0) return 0.0;
  // ln(1 - (1-p)^n) = log1p(-exp(n ln(1-p)))
  return std::log1p(-std::exp(channels * std::log1p(-channel_prob)));
}

double route_success_prob(const QdnGraph& graph, const Route& route, RequestId request,
                          const Allocation& alloc) {
  double p = 1.0;
  for (EdgeId e : route.edges()) {
    p *= edge_success_prob(graph.channel_prob(e), alloc.at(request, e));
  }
  return p;
}

double slot_utility(const QdnGraph& graph, std::span<const SelectedRoute> routes,
                    const Allocation& alloc) {
  double u = 0.0;
  for (const SelectedRoute& sr : routes) {
    for (EdgeId e : sr.route->edges()) {
      u += log_edge_success_prob(graph.channel_prob(e), alloc.at(sr.request, e));
    }
  }
  return u;
}

SlotLoads compute_loads(const QdnGraph& graph, std::span<const SelectedRoute> routes,
                        const Allocation& alloc) {
  SlotLoads loads{std::vector<long>(graph.node_count(), 0),
                  std::vector<long>(graph.edge_count(), 0)};
  for (const SelectedRoute& sr : routes) {
    for (EdgeId e : sr.route->edges()) {
      const long n = alloc.at(sr.request, e);
      const Edge& edge = graph.edge(e);
      loads.edge[index(e)] += n;
      loads.node[index(edge.u)] += n;
      loads.node[index(edge.v)] += n;
    }
  }
  return loads;
}

FeasibilityReport verify_feasible(const QdnGraph& graph, const SlotCapacities& caps,
                                  std::span<const SelectedRoute> routes,
                                  const Allocation& alloc) {
  FeasibilityReport report;
  const SlotLoads loads = compute_loads(graph, routes, alloc);
  for (std::size_t v = 0; v < loads.node.size(); ++v) {
    if (loads.node[v] > caps.qubits.at(v)) {
      report.violations.push_back(
          {CapacityViolation::Kind::kNode, v, loads.node[v], caps.qubits[v]});
    }
  }
  for (std::size_t e = 0; e < loads.edge.size(); ++e) {
    if (loads.edge[e] > caps.channels.at(e)) {
      report.violations.push_back(
          {CapacityViolation::Kind::kEdge, e, loads.edge[e], caps.channels[e]});
    }
  }
  report.feasible = report.violations.empty();
  return report;
}

std::string FeasibilityReport::to_string() const {
  if (feasible) return "feasible";
  std::ostringstream os;
  for (const CapacityViolation& v : violations) {
    os << (v.kind == CapacityViolation::Kind::kNode ? "node " : "edge ") << v.id << ": load "
       << v.load << " > cap " << v.cap << '\n';
  }
  return os.str();
}

double monte_carlo_route_success(const QdnGraph& graph, const Route& route, RequestId request,
                                 const Allocation& alloc, long samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("samples must be >= 1");
  std::vector<std::pair<double, int>> hops;
  for (EdgeId e : route.edges()) hops.emplace_back(graph.channel_prob(e), alloc.at(request, e));

  Rng rng(derive_seed(seed, Stream::kMonteCarlo));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long successes = 0;
  for (long s = 0; s < samples; ++s) {
    bool ok = true;
    for (const auto& [p, n] : hops) {
      bool linked = false;
      // Draw every channel so that the stream consumption per sample is fixed.
      for (int c = 0; c < n; ++c) linked |= unit(rng) < p;
      ok = ok && linked;
    }
    successes += ok ? 1 : 0;
  }
  return static_cast<double>(successes) / static_cast<double>(samples);
}

}  // namespace oscar
