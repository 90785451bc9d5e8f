#include "oscar/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "oscar/errors.hpp"
#include "oscar/rng.hpp"

namespace oscar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_candidates(std::span<const SdRequest> requests) {
  for (const SdRequest& r : requests) {
    if (!r.servable()) {
      throw DomainError("request " + std::to_string(index(r.id)) + " has no candidate route");
    }
  }
}

SelectionResult to_result(std::vector<std::size_t> choice, AllocationResult alloc) {
  SelectionResult out;
  out.choice = std::move(choice);
  out.allocation = std::move(alloc.allocation);
  out.objective = alloc.objective;
  return out;
}

// Odometer increment with the last request varying fastest.
bool advance(std::vector<std::size_t>& choice, std::span<const SdRequest> requests) {
  for (std::size_t pos = requests.size(); pos-- > 0;) {
    if (++choice[pos] < requests[pos].candidates.size()) return true;
    choice[pos] = 0;
  }
  return false;
}

}  // namespace

void GibbsParams::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (max_iters < 0 || stable_window < 0) throw ConfigError("iteration limits must be >= 0");
  if (init_retries < 1) throw ConfigError("init_retries must be >= 1");
}

std::vector<SelectedRoute> SelectionResult::routes(std::span<const SdRequest> requests) const {
  return selected_routes(requests, choice);
}

double selection_space_size(std::span<const SdRequest> requests) {
  double size = 1.0;
  for (const SdRequest& r : requests) size *= static_cast<double>(r.candidates.size());
  return std::min(size, std::numeric_limits<double>::max());
}

std::vector<SelectedRoute> selected_routes(std::span<const SdRequest> requests,
                                           std::span<const std::size_t> choice) {
  std::vector<SelectedRoute> out;
  out.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    out.push_back({requests[i].id, &requests[i].candidates.at(choice[i])});
  }
  return out;
}

Evaluation evaluate_selection(const QdnGraph& graph, const SlotCapacities& caps,
                              std::span<const SdRequest> requests,
                              std::span<const std::size_t> choice, const ObjectiveParams& params) {
  const auto routes = selected_routes(requests, choice);
  auto result = try_allocate(graph, caps, routes, params);
  if (!result) return {kNegInf, std::nullopt};
  const double f = result->objective;
  return {f, std::move(result)};
}

SelectionResult exhaustive_select(const QdnGraph& graph, const SlotCapacities& caps,
                                  std::span<const SdRequest> requests,
                                  const ObjectiveParams& params, long enumeration_cap) {
  require_candidates(requests);
  if (selection_space_size(requests) > static_cast<double>(enumeration_cap)) {
    throw EnumerationCapError("joint route space exceeds the enumeration cap of " +
                              std::to_string(enumeration_cap) + "; use Gibbs selection");
  }

  std::vector<std::size_t> choice(requests.size(), 0);
  std::optional<SelectionResult> best;
  long evaluations = 0;
  do {
    Evaluation ev = evaluate_selection(graph, caps, requests, choice, params);
    ++evaluations;
    // Strict improvement keeps the lexicographically first maximizer.
    if (ev.result && (!best || ev.objective > best->objective)) {
      best = to_result(choice, std::move(*ev.result));
    }
  } while (advance(choice, requests));
  if (!best) throw InfeasibleSelectionError("no route combination admits a feasible allocation");
  best->exhaustive = true;
  best->evaluations = evaluations;
  return std::move(*best);
}

double gibbs_accept_prob(double f_new, double f_old, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (f_new == kNegInf) return 0.0;
  if (f_old == kNegInf) return 1.0;
  const double z = std::clamp((f_old - f_new) / gamma, -700.0, 700.0);
  return 1.0 / (1.0 + std::exp(z));
}

SelectionResult gibbs_select(const QdnGraph& graph, const SlotCapacities& caps,
                             std::span<const SdRequest> requests, const ObjectiveParams& params,
                             const GibbsParams& gibbs, std::vector<GibbsStep>* trace) {
  gibbs.validate();
  require_candidates(requests);
  const int F = std::max<int>(1, static_cast<int>(requests.size()));
  const int max_iters = gibbs.max_iters > 0 ? gibbs.max_iters : 200 * F;
  const int window = gibbs.stable_window > 0 ? gibbs.stable_window : 5 * F;

  Rng rng(gibbs.seed);
  std::map<std::vector<std::size_t>, Evaluation> memo;
  long evaluations = 0;
  auto score = [&](const std::vector<std::size_t>& choice) -> const Evaluation& {
    auto it = memo.find(choice);
    if (it == memo.end()) {
      ++evaluations;
      it = memo.emplace(choice, evaluate_selection(graph, caps, requests, choice, params)).first;
    }
    return it->second;
  };
  auto draw = [&rng](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };

  std::vector<std::size_t> current(requests.size());
  bool feasible = false;
  for (int attempt = 0; attempt < gibbs.init_retries && !feasible; ++attempt) {
    for (std::size_t i = 0; i < requests.size(); ++i) current[i] = draw(requests[i].candidates.size());
    feasible = score(current).result.has_value();
  }
  if (!feasible) throw InfeasibleSelectionError("no feasible initial route selection found");

  std::vector<std::size_t> movable;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (requests[i].candidates.size() > 1) movable.push_back(i);
  }
  std::vector<std::set<EdgeId>> footprint(requests.size());
  if (gibbs.batch_disjoint) {
    for (std::size_t i = 0; i < requests.size(); ++i) {
      for (const Route& r : requests[i].candidates) {
        footprint[i].insert(r.edges().begin(), r.edges().end());
      }
    }
  }
  auto propose_for = [&](std::vector<std::size_t>& proposal, std::size_t i) {
    const std::size_t alt = draw(requests[i].candidates.size() - 1);
    proposal[i] = alt >= current[i] ? alt + 1 : alt;
  };

  double f_cur = score(current).objective;
  std::vector<std::size_t> best = current;
  double f_best = f_cur;
  int stable = 0;
  for (int it = 1; it <= max_iters && stable < window; ++it) {
    if (movable.empty()) {
      ++stable;
      continue;
    }
    std::vector<std::size_t> proposal = current;
    const std::size_t lead = movable[draw(movable.size())];
    propose_for(proposal, lead);
    if (gibbs.batch_disjoint) {
      std::set<EdgeId> used = footprint[lead];
      for (std::size_t i : movable) {
        if (i == lead) continue;
        const bool disjoint = std::none_of(footprint[i].begin(), footprint[i].end(),
                                           [&used](EdgeId e) { return used.contains(e); });
        if (!disjoint) continue;
        used.insert(footprint[i].begin(), footprint[i].end());
        propose_for(proposal, i);
      }
    }

    const double f_new = score(proposal).objective;
    const double accept = gibbs_accept_prob(f_new, f_cur, gibbs.gamma);
    const bool accepted = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < accept;
    if (trace) trace->push_back({it, proposal, f_cur, f_new, accepted});
    if (accepted) {
      current = std::move(proposal);
      f_cur = f_new;
      stable = 0;
      if (f_cur > f_best) {
        f_best = f_cur;
        best = current;
      }
    } else {
      ++stable;
    }
  }

  const Evaluation& ev = score(best);
  SelectionResult out = to_result(best, *ev.result);
  out.evaluations = evaluations;
  return out;
}

SelectionResult select_routes(const QdnGraph& graph, const SlotCapacities& caps,
                              std::span<const SdRequest> requests, const ObjectiveParams& params,
                              const GibbsParams& gibbs, long enumeration_cap) {
  if (selection_space_size(requests) <= static_cast<double>(enumeration_cap)) {
    return exhaustive_select(graph, caps, requests, params, enumeration_cap);
  }
  return gibbs_select(graph, caps, requests, params, gibbs);
}

}  // namespace oscar
