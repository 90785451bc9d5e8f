#pragma once

// Channel allocation for a fixed route selection: continuous relaxation of
// the per-slot drift-plus-penalty problem, then down-rounding plus greedy
// surplus assignment.

#include <optional>
#include <span>
#include <vector>

#include "oscar/qdn_model.hpp"

namespace oscar {

struct ObjectiveParams {
  double V = 1.0;  // utility weight
  double q = 0.0;  // virtual queue length, prices each channel
  // Hard limit on total channels in the slot (myopic baselines).
  std::optional<long> cost_cap;

  void validate() const;
};

struct SolverOptions {
  // Stop once dual bound - primal value <= tolerance * max(1, |primal|).
  double gap_tolerance = 1e-6;
  int max_sweeps = 10000;
};

struct RelaxedEntry {
  RequestId request;
  EdgeId edge;
  double channels;
};

struct RelaxedSolution {
  std::vector<RelaxedEntry> entries;  // one per (request, route edge), in route order
  double objective = 0.0;             // relaxed objective at `entries`
  double dual_bound = 0.0;            // upper bound on the relaxed optimum
  int sweeps = 0;

  // Throws MissingAllocationError when absent.
  double value(RequestId request, EdgeId edge) const;
};

struct AllocationResult {
  Allocation allocation;
  double objective = 0.0;
};

// V * slot_utility - q * cost.
double per_slot_objective(const QdnGraph& graph, std::span<const SelectedRoute> routes,
                          const Allocation& alloc, const ObjectiveParams& params);

// True when one channel per route edge fits every capacity and the cap.
bool minimum_allocation_feasible(const QdnGraph& graph, const SlotCapacities& caps,
                                 std::span<const SelectedRoute> routes,
                                 std::optional<long> cost_cap = std::nullopt);

// Throws InfeasibleSelectionError when the all-ones allocation is
// infeasible and NonConvergenceError if the gap target is not reached.
RelaxedSolution solve_relaxed(const QdnGraph& graph, const SlotCapacities& caps,
                              std::span<const SelectedRoute> routes,
                              const ObjectiveParams& params, const SolverOptions& options = {});

Allocation round_allocation(const QdnGraph& graph, const SlotCapacities& caps,
                            std::span<const SelectedRoute> routes, const RelaxedSolution& relaxed,
                            const ObjectiveParams& params);

AllocationResult allocate(const QdnGraph& graph, const SlotCapacities& caps,
                          std::span<const SelectedRoute> routes, const ObjectiveParams& params,
                          const SolverOptions& options = {});

// nullopt instead of InfeasibleSelectionError.
std::optional<AllocationResult> try_allocate(const QdnGraph& graph, const SlotCapacities& caps,
                                             std::span<const SelectedRoute> routes,
                                             const ObjectiveParams& params,
                                             const SolverOptions& options = {});

// Rounding loss bound V * F * L * ln(2 - p_min).
double delta_gap(double V, int max_requests, int max_hops, double min_channel_prob);

}  // namespace oscar
