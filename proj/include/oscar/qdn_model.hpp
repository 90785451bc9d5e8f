#pragma once

// Quantum data network graph, routes, channel allocations and the
// probabilistic link model shared by every other module.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace oscar {

enum class NodeId : std::uint32_t {};
enum class EdgeId : std::uint32_t {};
enum class RequestId : std::uint32_t {};

constexpr std::size_t index(NodeId v) { return static_cast<std::size_t>(v); }
constexpr std::size_t index(EdgeId e) { return static_cast<std::size_t>(e); }
constexpr std::size_t index(RequestId r) { return static_cast<std::size_t>(r); }

struct Node {
  int qubits = 0;
  // Placement in the generation area; informational only.
  double x = 0.0;
  double y = 0.0;
};

struct Edge {
  NodeId u{};
  NodeId v{};
  int channels = 0;
  double attempt_prob = 0.0;  // per-attempt link success probability

  NodeId other(NodeId w) const { return w == u ? v : u; }
  bool touches(NodeId w) const { return w == u || w == v; }
};

struct Neighbor {
  NodeId node;
  EdgeId edge;
};

// Undirected graph with per-node qubit capacities and per-edge channel
// capacities. Immutable after construction.
class QdnGraph {
 public:
  QdnGraph() = default;
  // Throws DomainError when an invariant is broken (self loop, duplicate
  // edge, probability outside (0,1), attempts < 1, negative capacity).
  QdnGraph(std::vector<Node> nodes, std::vector<Edge> edges, int attempts);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Node& node(NodeId v) const { return nodes_.at(index(v)); }
  const Edge& edge(EdgeId e) const { return edges_.at(index(e)); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int attempts() const { return attempts_; }

  // Neighbors of v sorted by neighbor id.
  std::span<const Neighbor> neighbors(NodeId v) const { return adjacency_.at(index(v)); }
  std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;

  // Per-channel success probability p_e after all attempts in a slot.
  double channel_prob(EdgeId e) const { return channel_prob_.at(index(e)); }
  double min_channel_prob() const;
  long total_channels() const;
  double mean_degree() const;
  bool connected() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> channel_prob_;
  int attempts_ = 1;
};

struct SlotCapacities {
  std::vector<int> qubits;    // per node
  std::vector<int> channels;  // per edge

  static SlotCapacities base(const QdnGraph& graph);
};

// Simple path between two nodes, stored both as edges and as nodes.
class Route {
 public:
  Route() = default;
  // Builds the route through consecutive nodes; throws DomainError when a
  // hop is not an edge of the graph or a node repeats.
  static Route from_nodes(const QdnGraph& graph, std::vector<NodeId> nodes);

  std::span<const EdgeId> edges() const { return edges_; }
  std::span<const NodeId> nodes() const { return nodes_; }
  std::size_t hops() const { return edges_.size(); }
  NodeId source() const { return nodes_.front(); }
  NodeId destination() const { return nodes_.back(); }

  friend bool operator==(const Route&, const Route&) = default;

 private:
  std::vector<EdgeId> edges_;
  std::vector<NodeId> nodes_;
};

// Non-owning pairing of a request with the route chosen for it.
struct SelectedRoute {
  RequestId request;
  const Route* route;
};

// Positive integer channel count per (request, edge).
class Allocation {
 public:
  using Key = std::pair<RequestId, EdgeId>;

  void set(RequestId request, EdgeId edge, int channels);
  // Throws MissingAllocationError when absent.
  int at(RequestId request, EdgeId edge) const;
  std::optional<int> find(RequestId request, EdgeId edge) const;
  long cost() const { return cost_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<Key, int>& entries() const { return entries_; }

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  std::map<Key, int> entries_;
  long cost_ = 0;
};

// p_e = 1 - (1 - p_tilde)^attempts.
double channel_success_prob(double attempt_prob, int attempts);
// P_e(n) = 1 - (1 - p_e)^n, defined for real n >= 1.
double edge_success_prob(double channel_prob, double channels);
// ln P_e(n), evaluated without forming P_e first.
double log_edge_success_prob(double channel_prob, double channels);

double route_success_prob(const QdnGraph& graph, const Route& route, RequestId request,
                          const Allocation& alloc);
// Sum over requests of ln P(route, allocation); zero for no requests.
double slot_utility(const QdnGraph& graph, std::span<const SelectedRoute> routes,
                    const Allocation& alloc);

struct CapacityViolation {
  enum class Kind { kNode, kEdge };
  Kind kind;
  std::size_t id;
  long load;
  long cap;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<CapacityViolation> violations;
  std::string to_string() const;
};

// Per-node qubit loads and per-edge channel loads of an allocation.
struct SlotLoads {
  std::vector<long> node;
  std::vector<long> edge;
};
SlotLoads compute_loads(const QdnGraph& graph, std::span<const SelectedRoute> routes,
                        const Allocation& alloc);

FeasibilityReport verify_feasible(const QdnGraph& graph, const SlotCapacities& caps,
                                  std::span<const SelectedRoute> routes,
                                  const Allocation& alloc);

// Fraction of `samples` independent trials in which every edge of the
// route gets at least one successful channel.
double monte_carlo_route_success(const QdnGraph& graph, const Route& route, RequestId request,
                                 const Allocation& alloc, long samples, std::uint64_t seed);

}  // namespace oscar
