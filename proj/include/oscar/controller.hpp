#pragma once

// Long-horizon control: the virtual-queue policy (OSCAR), the fixed and
// adaptive per-slot budget baselines, and evaluators for the budget
// violation and optimality-gap bounds.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oscar/selection.hpp"

namespace oscar {

enum class Policy { kOscar, kMyopicFixed, kMyopicAdaptive };

std::string_view policy_name(Policy policy);  // "oscar", "mf", "ma"
Policy parse_policy(std::string_view name);

struct BudgetParams {
  long C = 5000;  // total channel budget over the horizon
  int T = 200;    // horizon in slots
  double V = 2500.0;
  double q0 = 10.0;

  void validate() const;
  double per_slot() const { return static_cast<double>(C) / T; }
};

struct ControllerState {
  Policy policy = Policy::kOscar;
  double q = 0.0;
  long cumulative_cost = 0;
  int t = 0;

  static ControllerState initial(Policy policy, const BudgetParams& budget);
};

struct SlotRecord {
  int t = 0;
  Policy policy = Policy::kOscar;
  std::vector<double> success_probs;  // one per served request
  double utility = 0.0;               // sum of ln success over served requests
  long cost = 0;
  double q_after = 0.0;
  int requests = 0;
  int unserved = 0;
  bool exhaustive = false;
  std::optional<long> cost_cap;
};

struct SlotOutcome {
  std::optional<SelectionResult> selection;  // empty when the slot went unserved
  SlotRecord record;
  ControllerState next;
};

// Everything observed at the start of a slot.
struct SlotInput {
  const QdnGraph& graph;
  const SlotCapacities& caps;
  std::span<const SdRequest> requests;  // unservable requests count as unserved
  GibbsParams gibbs{};
  long enumeration_cap = kDefaultEnumerationCap;
};

// q' = max(0, q + cost - C/T).
double queue_update(double q, long cost, long C, int T);

long fixed_slot_cap(const BudgetParams& budget);
// floor((C - spent) / (T - t)), never negative.
long adaptive_slot_cap(const BudgetParams& budget, long spent, int t);

// Each requires state.policy to match and throws std::invalid_argument
// otherwise. An infeasible slot is recorded as unserved with zero cost.
SlotOutcome oscar_slot(const SlotInput& in, const ControllerState& state,
                       const BudgetParams& budget);
SlotOutcome mf_slot(const SlotInput& in, const ControllerState& state, const BudgetParams& budget);
SlotOutcome ma_slot(const SlotInput& in, const ControllerState& state, const BudgetParams& budget);
// Dispatches on state.policy.
SlotOutcome run_slot(const SlotInput& in, const ControllerState& state,
                     const BudgetParams& budget);

// B = (c_max - C/T)^2 / 2.
double drift_constant(double max_slot_cost, long C, int T);
// D = delta + B - V F L ln(p_min).
double drift_bound(double delta, double B, double V, int F, int L, double min_channel_prob);
// sqrt(q0^2/T^2 + 2D/T) - q0/T.
double theorem1_rhs(double q0, int T, double D);
// (delta + B)/V + q0^2/(2 V T).
double theorem2_gap(double V, double q0, int T, double delta, double B);
// C >= F L T.
bool check_assumption1(long C, int F, int L, int T);

}  // namespace oscar
