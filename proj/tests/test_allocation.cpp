#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oscar/allocation.hpp"
#include "oscar/errors.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

namespace oscar {
namespace {

using testing::make_graph;
using testing::path;

std::vector<SelectedRoute> select(const std::vector<Route>& routes) {
  std::vector<SelectedRoute> out;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    out.push_back({RequestId(static_cast<std::uint32_t>(i)), &routes[i]});
  }
  return out;
}

std::vector<const Route*> pointers(const std::vector<Route>& routes) {
  std::vector<const Route*> out;
  for (const Route& r : routes) out.push_back(&r);
  return out;
}

TEST(Objective, Examples) {
  const QdnGraph g = make_graph(2, {{0, 1, 5, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1})};
  Allocation a;
  a.set(RequestId(0), EdgeId(0), 2);
  const auto sel = select(routes);
  EXPECT_NEAR(per_slot_objective(g, sel, a, {1.0, 0.0, {}}), std::log(0.75), 1e-12);
  EXPECT_NEAR(per_slot_objective(g, sel, a, {2.0, 0.0, {}}), 2 * std::log(0.75), 1e-12);

  // V=1, q=1 and an edge whose P_e(2) is exactly 0.5.
  Allocation c;
  c.set(RequestId(0), EdgeId(0), 2);
  const double p = 1.0 - std::sqrt(0.5);
  const QdnGraph k = make_graph(2, {{0, 1, 5, p}});
  const std::vector<Route> kr{path(k, {0, 1})};
  EXPECT_NEAR(per_slot_objective(k, select(kr), c, {1.0, 1.0, {}}), std::log(0.5) - 2, 1e-12);
  EXPECT_NEAR(per_slot_objective(k, select(kr), c, {1.0, 1.0, {}}), -2.6931, 1e-4);
}

TEST(Relaxed, StationarityRootExample) {
  const QdnGraph g = make_graph(2, {{0, 1, 10, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1})};
  const RelaxedSolution s = solve_relaxed(g, SlotCapacities::base(g), select(routes), {1.0, 0.1, {}});
  ASSERT_EQ(s.entries.size(), 1u);
  EXPECT_NEAR(s.entries[0].channels, testing::oracle_stationary_point(0.5, 1.0, 0.1, 10.0), 1e-6);
  // Closed form: 0.5^n = 0.1 / (ln 2 + 0.1).
  EXPECT_NEAR(s.entries[0].channels, std::log2((std::log(2.0) + 0.1) / 0.1), 1e-6);
  EXPECT_NEAR(s.value(RequestId(0), EdgeId(0)), s.entries[0].channels, 0.0);
  EXPECT_THROW(s.value(RequestId(3), EdgeId(0)), MissingAllocationError);
}

TEST(Relaxed, SingleVariableMatchesBisection) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> pr(0.05, 0.95), vr(0.5, 50.0), qr(0.0, 2.0);
  std::uniform_int_distribution<int> cap(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const double p = pr(rng), V = vr(rng), q = qr(rng) * (trial % 4 == 0 ? 0.0 : 1.0);
    const int w = cap(rng);
    const QdnGraph g = make_graph(2, {{0, 1, w, p}});
    const std::vector<Route> routes{path(g, {0, 1})};
    const RelaxedSolution s =
        solve_relaxed(g, SlotCapacities::base(g), select(routes), {V, q, {}});
    EXPECT_NEAR(s.entries[0].channels, testing::oracle_stationary_point(p, V, q, w), 1e-6)
        << "p=" << p << " V=" << V << " q=" << q << " cap=" << w;
  }
}

TEST(Relaxed, HugePriceGivesAllOnes) {
  const QdnGraph g = make_graph(3, {{0, 1, 6, 0.5}, {1, 2, 6, 0.3}});
  const std::vector<Route> routes{path(g, {0, 1, 2})};
  // V (ln P(2) - ln P(1)) = ln 1.5 < 1 for p=0.5, and smaller still for 0.3.
  const RelaxedSolution s = solve_relaxed(g, SlotCapacities::base(g), select(routes), {1.0, 1.0, {}});
  for (const RelaxedEntry& e : s.entries) EXPECT_NEAR(e.channels, 1.0, 1e-9);
}

TEST(Relaxed, FreeChannelsSaturateCapacity) {
  const QdnGraph g = make_graph(3, {{0, 1, 6, 0.5}, {1, 2, 4, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1}), path(g, {0, 1}), path(g, {1, 2})};
  const RelaxedSolution s = solve_relaxed(g, SlotCapacities::base(g), select(routes), {1.0, 0.0, {}});
  double on_first = 0.0;
  for (const RelaxedEntry& e : s.entries) {
    if (e.edge == EdgeId(0)) on_first += e.channels;
    if (e.edge == EdgeId(1)) EXPECT_NEAR(e.channels, 4.0, 1e-6);
  }
  EXPECT_NEAR(on_first, 6.0, 1e-6);
}

TEST(Relaxed, MultiVariableMatchesGrid) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int trial = 0; checked < 25; ++trial) {
    const QdnGraph g = testing::random_graph(rng, 4, 2, 1, 5, 2, 8, 0.2, 0.9);
    std::vector<Route> routes;
    std::uniform_int_distribution<int> node(0, 3);
    for (int r = 0; r < 2; ++r) {
      const int s = node(rng);
      const int d = (s + 1 + node(rng) % 3) % 4;
      const auto paths = testing::oracle_all_simple_paths(g, NodeId(s), NodeId(d), 2);
      if (!paths.empty()) routes.push_back(Route::from_nodes(g, paths.front()));
    }
    const auto vars = testing::variables_of(g, pointers(routes));
    if (vars.empty() || vars.size() > 4) continue;
    const SlotCapacities caps = SlotCapacities::base(g);
    const double V = 1.0, q = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    if (!testing::oracle_feasible(g, caps, vars, std::vector<double>(vars.size(), 1.0))) continue;
    const RelaxedSolution s = solve_relaxed(g, caps, select(routes), {V, q, {}});
    const double grid = testing::oracle_grid_optimum(g, caps, vars, V, q, 8.0);
    EXPECT_NEAR(s.objective, grid, 1e-4 * std::max(1.0, std::abs(grid))) << "trial " << trial;
    EXPECT_GE(s.dual_bound, s.objective - 1e-9);
    ++checked;
  }
}

RelaxedSolution fake_relaxed(const std::vector<Route>& routes, std::vector<double> values) {
  RelaxedSolution s;
  std::size_t k = 0;
  for (std::size_t r = 0; r < routes.size(); ++r) {
    for (EdgeId e : routes[r].edges()) {
      s.entries.push_back({RequestId(static_cast<std::uint32_t>(r)), e, values.at(k++)});
    }
  }
  return s;
}

TEST(Rounding, FloorWhenPriceIsHigh) {
  const QdnGraph g = make_graph(3, {{0, 1, 6, 0.5}, {1, 2, 6, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1, 2})};
  const Allocation a = round_allocation(g, SlotCapacities::base(g), select(routes),
                                        fake_relaxed(routes, {2.7, 1.2}), {1.0, 1e6, {}});
  EXPECT_EQ(a.at(RequestId(0), EdgeId(0)), 2);
  EXPECT_EQ(a.at(RequestId(0), EdgeId(1)), 1);
}

TEST(Rounding, IntegralInputIsKept) {
  const QdnGraph g = make_graph(2, {{0, 1, 2, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1})};
  const Allocation a = round_allocation(g, SlotCapacities::base(g), select(routes),
                                        fake_relaxed(routes, {2.0}), {1.0, 0.0, {}});
  EXPECT_EQ(a.at(RequestId(0), EdgeId(0)), 2);
}

TEST(Rounding, SurplusFillsFreeCapacity) {
  const QdnGraph g = make_graph(2, {{0, 1, 3, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1})};
  const Allocation a = round_allocation(g, SlotCapacities::base(g), select(routes),
                                        fake_relaxed(routes, {1.9}), {1.0, 0.0, {}});
  EXPECT_EQ(a.at(RequestId(0), EdgeId(0)), 3);
}

TEST(Rounding, SurplusGoesToLargestGainThenLowestKey) {
  // Two requests on the same 1-hop edge with four spare channels; equal
  // gains, so the first request moves first and they alternate.
  const QdnGraph g = make_graph(2, {{0, 1, 4, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1}), path(g, {0, 1})};
  const Allocation a = round_allocation(g, SlotCapacities::base(g), select(routes),
                                        fake_relaxed(routes, {1.0, 1.0}), {1.0, 0.0, {}});
  EXPECT_EQ(a.at(RequestId(0), EdgeId(0)), 2);
  EXPECT_EQ(a.at(RequestId(1), EdgeId(0)), 2);

  const QdnGraph h = make_graph(2, {{0, 1, 3, 0.5}});
  const Allocation b = round_allocation(h, SlotCapacities::base(h), select(routes),
                                        fake_relaxed(routes, {1.0, 1.0}), {1.0, 0.0, {}});
  EXPECT_EQ(b.at(RequestId(0), EdgeId(0)), 2);
  EXPECT_EQ(b.at(RequestId(1), EdgeId(0)), 1);
}

struct RandomInstance {
  QdnGraph graph;
  SlotCapacities caps;
  std::vector<Route> routes;
};

RandomInstance random_instance(std::mt19937_64& rng, int nodes, int requests, int max_hops,
                               int cap_hi) {
  for (;;) {
    QdnGraph g = testing::random_graph(rng, nodes, nodes / 2, 1, cap_hi, 2, 2 * cap_hi, 0.2, 0.9);
    std::vector<Route> routes;
    std::uniform_int_distribution<int> node(0, nodes - 1);
    for (int r = 0; r < requests; ++r) {
      const int s = node(rng);
      int d = node(rng);
      if (s == d) d = (d + 1) % nodes;
      const auto paths = testing::oracle_all_simple_paths(g, NodeId(s), NodeId(d), max_hops);
      if (paths.empty()) break;
      routes.push_back(Route::from_nodes(g, paths[rng() % paths.size()]));
    }
    if (static_cast<int>(routes.size()) != requests) continue;
    SlotCapacities caps = SlotCapacities::base(g);
    if (!minimum_allocation_feasible(g, caps, select(routes))) continue;
    return {std::move(g), std::move(caps), std::move(routes)};
  }
}

TEST(Rounding, InvariantsOnRandomInstances) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    RandomInstance in = random_instance(rng, 6, 1 + trial % 3, 3, 6);
    const auto sel = select(in.routes);
    const ObjectiveParams params{std::uniform_real_distribution<double>(0.5, 20)(rng),
                                 std::uniform_real_distribution<double>(0.0, 2.0)(rng),
                                 {}};
    const RelaxedSolution relaxed = solve_relaxed(in.graph, in.caps, sel, params);
    const Allocation a = round_allocation(in.graph, in.caps, sel, relaxed, params);
    for (const RelaxedEntry& e : relaxed.entries) {
      const int n = a.at(e.request, e.edge);
      EXPECT_GE(n, 1);
      EXPECT_LE(e.channels - n, 1.0);
    }
    EXPECT_TRUE(verify_feasible(in.graph, in.caps, sel, a).feasible) << "trial " << trial;
  }
}

TEST(Allocate, WithinDeltaOfIntegerOptimum) {
  std::mt19937_64 rng(4321);
  for (int trial = 0; trial < 100; ++trial) {
    const int requests = 1 + trial % 2;
    RandomInstance in = random_instance(rng, 5, requests, 3, 6);
    const auto sel = select(in.routes);
    const auto vars = testing::variables_of(in.graph, pointers(in.routes));
    if (vars.size() > 6) continue;
    const double V = std::uniform_real_distribution<double>(0.5, 10)(rng);
    const double q = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const AllocationResult got = allocate(in.graph, in.caps, sel, {V, q, {}});
    const double best = testing::oracle_integer_optimum(in.graph, in.caps, vars, V, q, 6);
    int L = 0;
    for (const Route& r : in.routes) L = std::max(L, static_cast<int>(r.hops()));
    const double delta = delta_gap(V, requests, L, in.graph.min_channel_prob());
    EXPECT_LE(best - got.objective, delta + 1e-9) << "trial " << trial;
    EXPECT_LE(got.objective, best + 1e-9);
    EXPECT_NEAR(got.objective, per_slot_objective(in.graph, sel, got.allocation, {V, q, {}}),
                1e-9);
  }
}

TEST(Allocate, OnlyAllOnesFeasible) {
  const QdnGraph g = make_graph(3, {{0, 1, 1, 0.5}, {1, 2, 1, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1, 2})};
  const AllocationResult r = allocate(g, SlotCapacities::base(g), select(routes), {100.0, 0.0, {}});
  EXPECT_EQ(r.allocation.cost(), 2);
}

TEST(Allocate, InfeasibleSelection) {
  const QdnGraph g = make_graph(2, {{0, 1, 1, 0.5}});
  const std::vector<Route> routes{path(g, {0, 1}), path(g, {0, 1})};
  const SlotCapacities caps = SlotCapacities::base(g);
  EXPECT_FALSE(minimum_allocation_feasible(g, caps, select(routes)));
  EXPECT_THROW(allocate(g, caps, select(routes), {1.0, 0.0, {}}), InfeasibleSelectionError);
  EXPECT_FALSE(try_allocate(g, caps, select(routes), {1.0, 0.0, {}}));
}

TEST(Allocate, CostCapIsHard) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance in = random_instance(rng, 6, 2, 3, 6);
    const auto sel = select(in.routes);
    long ones = 0;
    for (const Route& r : in.routes) ones += static_cast<long>(r.hops());
    const long cap = ones + trial % 5;
    const AllocationResult r = allocate(in.graph, in.caps, sel, {10.0, 0.0, cap});
    EXPECT_LE(r.allocation.cost(), cap);
    EXPECT_TRUE(verify_feasible(in.graph, in.caps, sel, r.allocation).feasible);
    EXPECT_THROW(allocate(in.graph, in.caps, sel, {10.0, 0.0, ones - 1}), InfeasibleSelectionError);
  }
}

TEST(Allocate, CostNeverRisesWithPrice) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance in = random_instance(rng, 6, 1 + trial % 3, 3, 6);
    const auto sel = select(in.routes);
    long previous = std::numeric_limits<long>::max();
    for (double q : {0.0, 0.05, 0.2, 0.5, 1.0, 3.0, 100.0}) {
      const long cost = allocate(in.graph, in.caps, sel, {5.0, q, {}}).allocation.cost();
      EXPECT_LE(cost, previous) << "trial " << trial << " q=" << q;
      previous = cost;
    }
  }
}

TEST(DeltaGap, Examples) {
  EXPECT_NEAR(delta_gap(1, 1, 1, 0.5), std::log(1.5), 1e-15);
  EXPECT_NEAR(delta_gap(1, 1, 1, 0.5), 0.4055, 1e-4);
  EXPECT_NEAR(delta_gap(2, 1, 1, 0.5), 2 * std::log(1.5), 1e-15);
  EXPECT_NEAR(delta_gap(1, 1, 1, 1.0 - 1e-12), 0.0, 1e-11);
}

TEST(ObjectiveParams, Validation) {
  EXPECT_THROW((ObjectiveParams{0.0, 0.0, {}}.validate()), DomainError);
  EXPECT_THROW((ObjectiveParams{1.0, -1.0, {}}.validate()), DomainError);
}

}  // namespace
}  // namespace oscar
