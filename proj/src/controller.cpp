#include "oscar/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oscar/errors.hpp"

namespace oscar {

std::string_view policy_name(Policy policy) {
  switch (policy) {
    case Policy::kOscar: return "oscar";
    case Policy::kMyopicFixed: return "mf";
    case Policy::kMyopicAdaptive: return "ma";
  }
  return "unknown";
}

Policy parse_policy(std::string_view name) {
  if (name == "oscar") return Policy::kOscar;
  if (name == "mf") return Policy::kMyopicFixed;
  if (name == "ma") return Policy::kMyopicAdaptive;
  throw ConfigError("unknown policy '" + std::string(name) + "' (expected oscar, mf or ma)");
}

void BudgetParams::validate() const {
  if (C <= 0) throw ConfigError("budget C must be positive");
  if (T < 1) throw ConfigError("horizon T must be >= 1");
  if (!(V > 0.0)) throw ConfigError("V must be positive");
  if (!(q0 >= 0.0)) throw ConfigError("q0 must be nonnegative");
}

ControllerState ControllerState::initial(Policy policy, const BudgetParams& budget) {
  return {policy, budget.q0, 0, 0};
}

double queue_update(double q, long cost, long C, int T) {
  return std::max(0.0, q + static_cast<double>(cost) - static_cast<double>(C) / T);
}

long fixed_slot_cap(const BudgetParams& budget) { return budget.C / budget.T; }

long adaptive_slot_cap(const BudgetParams& budget, long spent, int t) {
  const long remaining_slots = budget.T - t;
  if (remaining_slots <= 0) return 0;
  return std::max(0L, (budget.C - spent) / remaining_slots);
}

namespace {

SlotOutcome solve_slot(const SlotInput& in, const ControllerState& state,
                       const BudgetParams& budget, const ObjectiveParams& params) {
  std::vector<SdRequest> servable;
  for (const SdRequest& r : in.requests) {
    if (r.servable()) servable.push_back(r);
  }

  SlotOutcome out;
  SlotRecord& rec = out.record;
  rec.t = state.t;
  rec.policy = state.policy;
  rec.requests = static_cast<int>(in.requests.size());
  rec.cost_cap = params.cost_cap;
  rec.unserved = rec.requests - static_cast<int>(servable.size());

  if (!servable.empty()) {
    try {
      SelectionResult sel =
          select_routes(in.graph, in.caps, servable, params, in.gibbs, in.enumeration_cap);
      const auto routes = sel.routes(servable);
      for (const SelectedRoute& sr : routes) {
        rec.success_probs.push_back(
            route_success_prob(in.graph, *sr.route, sr.request, sel.allocation));
      }
      rec.utility = slot_utility(in.graph, routes, sel.allocation);
      rec.cost = sel.allocation.cost();
      rec.exhaustive = sel.exhaustive;
      out.selection = std::move(sel);
    } catch (const InfeasibleSelectionError&) {
      rec.unserved = rec.requests;
    }
  }

  out.next = state;
  out.next.q = queue_update(state.q, rec.cost, budget.C, budget.T);
  out.next.cumulative_cost += rec.cost;
  out.next.t = state.t + 1;
  rec.q_after = out.next.q;
  return out;
}

void require_policy(const ControllerState& state, Policy expected) {
  if (state.policy != expected) {
    throw std::invalid_argument("controller state belongs to policy " +
                                std::string(policy_name(state.policy)));
  }
}

}  // namespace

SlotOutcome oscar_slot(const SlotInput& in, const ControllerState& state,
                       const BudgetParams& budget) {
  require_policy(state, Policy::kOscar);
  return solve_slot(in, state, budget, {budget.V, state.q, std::nullopt});
}

SlotOutcome mf_slot(const SlotInput& in, const ControllerState& state, const BudgetParams& budget) {
  require_policy(state, Policy::kMyopicFixed);
  return solve_slot(in, state, budget, {budget.V, 0.0, fixed_slot_cap(budget)});
}

SlotOutcome ma_slot(const SlotInput& in, const ControllerState& state, const BudgetParams& budget) {
  require_policy(state, Policy::kMyopicAdaptive);
  const long cap = adaptive_slot_cap(budget, state.cumulative_cost, state.t);
  return solve_slot(in, state, budget, {budget.V, 0.0, cap});
}

SlotOutcome run_slot(const SlotInput& in, const ControllerState& state,
                     const BudgetParams& budget) {
  switch (state.policy) {
    case Policy::kOscar: return oscar_slot(in, state, budget);
    case Policy::kMyopicFixed: return mf_slot(in, state, budget);
    case Policy::kMyopicAdaptive: return ma_slot(in, state, budget);
  }
  throw std::invalid_argument("unknown policy");
}

double drift_constant(double max_slot_cost, long C, int T) {
  const double d = max_slot_cost - static_cast<double>(C) / T;
  return 0.5 * d * d;
}

double drift_bound(double delta, double B, double V, int F, int L, double min_channel_prob) {
  if (!(min_channel_prob > 0.0 && min_channel_prob < 1.0)) {
    throw DomainError("minimum channel probability must lie in (0,1)");
  }
  return delta + B - V * F * L * std::log(min_channel_prob);
}

double theorem1_rhs(double q0, int T, double D) {
  if (T < 1) throw DomainError("T must be >= 1");
  if (D < 0.0 || q0 < 0.0) throw DomainError("q0 and D must be nonnegative");
  const double a = q0 / T;
  // sqrt(a^2 + b) - a, rearranged to avoid cancellation for large q0.
  const double b = 2.0 * D / T;
  if (b == 0.0) return 0.0;
  return b / (std::sqrt(a * a + b) + a);
}

double theorem2_gap(double V, double q0, int T, double delta, double B) {
  if (!(V > 0.0)) throw DomainError("V must be positive");
  if (T < 1) throw DomainError("T must be >= 1");
  return (delta + B) / V + q0 * q0 / (2.0 * V * T);
}

bool check_assumption1(long C, int F, int L, int T) {
  return C >= static_cast<long>(F) * L * T;
}

}  // namespace oscar
