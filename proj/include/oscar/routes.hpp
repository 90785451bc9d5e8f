#pragma once

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "oscar/qdn_model.hpp"

namespace oscar {

struct RouteConfig {
  int max_routes = 3;  // R
  // L. Five keeps C >= F L T for the default budget and still reaches
  // every pair in the default topologies.
  int max_hops = 5;

  void validate() const;
};

struct SdRequest {
  RequestId id{};
  NodeId source{};
  NodeId destination{};
  std::vector<Route> candidates;

  bool servable() const { return !candidates.empty(); }
};

// Up to R loopless routes from s to d with at most L hops, ordered by hop
// count and then by node-id sequence. Empty when d is out of reach.
std::vector<Route> candidate_routes(const QdnGraph& graph, NodeId s, NodeId d,
                                    const RouteConfig& config);

// Memoizes candidate_routes per (s, d). Safe for concurrent lookups.
class RouteCache {
 public:
  RouteCache(const QdnGraph& graph, RouteConfig config) : graph_(&graph), config_(config) {}

  const std::vector<Route>& get(NodeId s, NodeId d);
  const RouteConfig& config() const { return config_; }

 private:
  const QdnGraph* graph_;
  RouteConfig config_;
  std::mutex mutex_;
  std::map<std::pair<NodeId, NodeId>, std::vector<Route>> cache_;
};

}  // namespace oscar
