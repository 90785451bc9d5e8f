#pragma once

// Route selection for one slot: exhaustive search over the product of
// candidate sets, or Gibbs sampling over single-request route changes.

#include <cstdint>
#include <span>
#include <vector>

#include "oscar/allocation.hpp"
#include "oscar/routes.hpp"

namespace oscar {

struct GibbsParams {
  double gamma = 500.0;
  // Zero means the default for F requests: 200 * F iterations, and a
  // stability window of 5 * F proposals without a change.
  int max_iters = 0;
  int stable_window = 0;
  std::uint64_t seed = 0;
  // Propose for several requests at once when their candidate sets share
  // no edge.
  bool batch_disjoint = false;
  int init_retries = 100;

  void validate() const;
};

struct SelectionResult {
  std::vector<std::size_t> choice;  // candidate index per request, same order as the requests
  Allocation allocation;
  double objective = 0.0;
  bool exhaustive = false;
  long evaluations = 0;

  std::vector<SelectedRoute> routes(std::span<const SdRequest> requests) const;
};

struct GibbsStep {
  int iteration;
  std::vector<std::size_t> proposal;
  double f_old;
  double f_new;
  bool accepted;
};

constexpr long kDefaultEnumerationCap = 10000;

// Size of the joint candidate space, saturating at the largest finite double.
double selection_space_size(std::span<const SdRequest> requests);

std::vector<SelectedRoute> selected_routes(std::span<const SdRequest> requests,
                                           std::span<const std::size_t> choice);

// Scores one joint selection; objective is -infinity when even the all-ones
// allocation is infeasible.
struct Evaluation {
  double objective;
  std::optional<AllocationResult> result;
};
Evaluation evaluate_selection(const QdnGraph& graph, const SlotCapacities& caps,
                              std::span<const SdRequest> requests,
                              std::span<const std::size_t> choice, const ObjectiveParams& params);

// Throws EnumerationCapError above the cap and InfeasibleSelectionError
// when no combination is feasible.
SelectionResult exhaustive_select(const QdnGraph& graph, const SlotCapacities& caps,
                                  std::span<const SdRequest> requests,
                                  const ObjectiveParams& params,
                                  long enumeration_cap = kDefaultEnumerationCap);

// Probability of moving to the proposed selection:
// 1 / (1 + exp((f_old - f_new) / gamma)).
double gibbs_accept_prob(double f_new, double f_old, double gamma);

// Returns the best selection visited. Throws InfeasibleSelectionError when
// no feasible starting selection is found.
SelectionResult gibbs_select(const QdnGraph& graph, const SlotCapacities& caps,
                             std::span<const SdRequest> requests, const ObjectiveParams& params,
                             const GibbsParams& gibbs, std::vector<GibbsStep>* trace = nullptr);

// Exhaustive when the joint space fits the cap, Gibbs otherwise.
SelectionResult select_routes(const QdnGraph& graph, const SlotCapacities& caps,
                              std::span<const SdRequest> requests, const ObjectiveParams& params,
                              const GibbsParams& gibbs,
                              long enumeration_cap = kDefaultEnumerationCap);

}  // namespace oscar
