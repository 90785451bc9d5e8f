#include "oscar/routes.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <set>

#include "oscar/errors.hpp"

namespace oscar {

void RouteConfig::validate() const {
  if (max_routes < 1) throw ConfigError("max_routes must be >= 1");
  if (max_hops < 1) throw ConfigError("max_hops must be >= 1");
}

namespace {

using Path = std::vector<NodeId>;

struct ByHopsThenNodes {
  bool operator()(const Path& a, const Path& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

constexpr int kUnreached = std::numeric_limits<int>::max();

// Lexicographically smallest among the minimum-hop paths from `from` to
// `to` that avoid the banned nodes and edges.
std::optional<Path> shortest_path(const QdnGraph& graph, NodeId from, NodeId to,
                                  const std::vector<char>& banned_node,
                                  const std::vector<char>& banned_edge, int hop_limit) {
  std::vector<int> dist(graph.node_count(), kUnreached);
  std::queue<NodeId> frontier;
  dist[index(to)] = 0;
  frontier.push(to);
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    if (v == from) break;
    for (const Neighbor& n : graph.neighbors(v)) {
      if (banned_edge[index(n.edge)] || banned_node[index(n.node)]) continue;
      if (dist[index(n.node)] != kUnreached) continue;
      dist[index(n.node)] = dist[index(v)] + 1;
      frontier.push(n.node);
    }
  }
  if (dist[index(from)] == kUnreached || dist[index(from)] > hop_limit) return std::nullopt;

  Path path{from};
  NodeId cur = from;
  while (cur != to) {
    for (const Neighbor& n : graph.neighbors(cur)) {
      if (banned_edge[index(n.edge)] || banned_node[index(n.node)]) continue;
      if (dist[index(n.node)] == dist[index(cur)] - 1) {
        cur = n.node;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

}  // namespace

std::vector<Route> candidate_routes(const QdnGraph& graph, NodeId s, NodeId d,
                                    const RouteConfig& config) {
  config.validate();
  if (s == d) throw DomainError("source and destination must differ");
  if (index(s) >= graph.node_count() || index(d) >= graph.node_count()) {
    throw DomainError("request endpoint out of range");
  }

  std::vector<char> banned_node(graph.node_count(), 0);
  std::vector<char> banned_edge(graph.edge_count(), 0);
  std::vector<Path> accepted;
  auto first = shortest_path(graph, s, d, banned_node, banned_edge, config.max_hops);
  if (!first) return {};
  accepted.push_back(std::move(*first));

  std::set<Path, ByHopsThenNodes> tentative;
  while (static_cast<int>(accepted.size()) < config.max_routes) {
    const Path& prev = accepted.back();
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
      const NodeId spur = prev[i];
      std::fill(banned_node.begin(), banned_node.end(), 0);
      std::fill(banned_edge.begin(), banned_edge.end(), 0);
      for (const Path& p : accepted) {
        if (p.size() > i + 1 && std::equal(prev.begin(), prev.begin() + i + 1, p.begin())) {
          banned_edge[index(*graph.find_edge(p[i], p[i + 1]))] = 1;
        }
      }
      for (std::size_t j = 0; j < i; ++j) banned_node[index(prev[j])] = 1;

      auto spur_path = shortest_path(graph, spur, d, banned_node, banned_edge,
                                     config.max_hops - static_cast<int>(i));
      if (!spur_path) continue;
      Path total(prev.begin(), prev.begin() + i);
      total.insert(total.end(), spur_path->begin(), spur_path->end());
      tentative.insert(std::move(total));
    }
    if (tentative.empty()) break;
    accepted.push_back(*tentative.begin());
    tentative.erase(tentative.begin());
  }

  std::vector<Route> routes;
  routes.reserve(accepted.size());
  for (Path& p : accepted) routes.push_back(Route::from_nodes(graph, std::move(p)));
  return routes;
}

const std::vector<Route>& RouteCache::get(NodeId s, NodeId d) {
  std::lock_guard lock(mutex_);
  auto it = cache_.find({s, d});
  if (it == cache_.end()) {
    it = cache_.emplace(std::pair{s, d}, candidate_routes(*graph_, s, d, config_)).first;
  }
  return it->second;
}

}  // namespace oscar
