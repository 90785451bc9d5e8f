#pragma once

// Hand-built graphs and random small instances for tests.

#include <algorithm>
#include <random>
#include <tuple>
#include <vector>

#include "oscar/qdn_model.hpp"
#include "oscar/routes.hpp"

namespace oscar::testing {

struct EdgeSpec {
  int u;
  int v;
  int channels;
  double p;  // per-channel success, used with a single attempt
};

inline QdnGraph make_graph(int nodes, const std::vector<EdgeSpec>& specs, int qubits = 100) {
  std::vector<Node> ns(static_cast<std::size_t>(nodes), Node{qubits, 0.0, 0.0});
  std::vector<Edge> es;
  for (const EdgeSpec& s : specs) {
    es.push_back({NodeId(s.u), NodeId(s.v), s.channels, s.p});
  }
  return QdnGraph(std::move(ns), std::move(es), 1);
}

inline Route path(const QdnGraph& g, std::vector<int> nodes) {
  std::vector<NodeId> ids;
  for (int n : nodes) ids.push_back(NodeId(static_cast<std::uint32_t>(n)));
  return Route::from_nodes(g, std::move(ids));
}

inline SdRequest request(const QdnGraph& g, int id, int s, int d, RouteConfig config = {}) {
  const NodeId src{static_cast<std::uint32_t>(s)};
  const NodeId dst{static_cast<std::uint32_t>(d)};
  return {RequestId(static_cast<std::uint32_t>(id)), src, dst,
          candidate_routes(g, src, dst, config)};
}

// Connected random graph: a random spanning tree plus extra edges.
inline QdnGraph random_graph(std::mt19937_64& rng, int nodes, int extra_edges, int channels_lo,
                             int channels_hi, int qubits_lo, int qubits_hi, double p_lo,
                             double p_hi) {
  std::uniform_int_distribution<int> ch(channels_lo, channels_hi);
  std::uniform_int_distribution<int> qb(qubits_lo, qubits_hi);
  std::uniform_real_distribution<double> pr(p_lo, p_hi);
  std::vector<Node> ns;
  for (int i = 0; i < nodes; ++i) ns.push_back({qb(rng), 0.0, 0.0});
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < nodes; ++i) {
    pairs.emplace_back(std::uniform_int_distribution<int>(0, i - 1)(rng), i);
  }
  std::uniform_int_distribution<int> node(0, nodes - 1);
  for (int k = 0, tries = 0; k < extra_edges && tries < 1000; ++tries) {
    int a = node(rng), b = node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (std::find(pairs.begin(), pairs.end(), std::pair{a, b}) != pairs.end()) continue;
    if (std::find(pairs.begin(), pairs.end(), std::pair{b, a}) != pairs.end()) continue;
    pairs.emplace_back(a, b);
    ++k;
  }
  std::vector<Edge> es;
  for (auto [a, b] : pairs) {
    es.push_back({NodeId(static_cast<std::uint32_t>(a)), NodeId(static_cast<std::uint32_t>(b)),
                  ch(rng), pr(rng)});
  }
  return QdnGraph(std::move(ns), std::move(es), 1);
}

}  // namespace oscar::testing
