#include "oscar/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oscar/errors.hpp"

namespace oscar {

void ObjectiveParams::validate() const {
  if (!(V > 0.0)) throw DomainError("V must be positive");
  if (!(q >= 0.0)) throw DomainError("queue length must be nonnegative");
  if (cost_cap && *cost_cap < 0) throw DomainError("cost cap must be nonnegative");
}

double RelaxedSolution::value(RequestId request, EdgeId edge) const {
  for (const RelaxedEntry& e : entries) {
    if (e.request == request && e.edge == edge) return e.channels;
  }
  throw MissingAllocationError("no relaxed value for request " + std::to_string(index(request)) +
                               " on edge " + std::to_string(index(edge)));
}

double per_slot_objective(const QdnGraph& graph, std::span<const SelectedRoute> routes,
                          const Allocation& alloc, const ObjectiveParams& params) {
  double cost = 0.0;
  for (const SelectedRoute& sr : routes) {
    for (EdgeId e : sr.route->edges()) cost += alloc.at(sr.request, e);
  }
  return params.V * slot_utility(graph, routes, alloc) - params.q * cost;
}

namespace {

// ln(1 - e^{-s}) caps out here; e^{-50} is far below double resolution of 1.
constexpr double kMaxDecay = 50.0;

struct Variable {
  RequestId request;
  EdgeId edge;
  double decay;  // s = -ln(1 - p_e), so 1 - P_e(n) = e^{-s n}
  double upper;
};

struct Constraint {
  std::vector<int> members;
  double cap;
};

// Separable concave program: maximize sum_i V ln(1 - e^{-s_i x_i}) - q x_i
// subject to sum_{i in k} x_i <= cap_k and 1 <= x_i <= upper_i.
struct Problem {
  std::vector<Variable> vars;
  std::vector<Constraint> cons;
  std::vector<std::vector<int>> var_cons;
  bool min_feasible = true;
};

Problem build_problem(const QdnGraph& graph, const SlotCapacities& caps,
                      std::span<const SelectedRoute> routes, std::optional<long> cost_cap) {
  Problem pb;
  std::vector<int> node_con(graph.node_count(), -1);
  std::vector<int> edge_con(graph.edge_count(), -1);
  auto attach = [&pb](std::vector<int>& slot, std::size_t key, double cap, int var) {
    if (slot[key] < 0) {
      slot[key] = static_cast<int>(pb.cons.size());
      pb.cons.push_back({{}, cap});
    }
    pb.cons[static_cast<std::size_t>(slot[key])].members.push_back(var);
    pb.var_cons[static_cast<std::size_t>(var)].push_back(slot[key]);
  };

  for (const SelectedRoute& sr : routes) {
    for (EdgeId e : sr.route->edges()) {
      const int var = static_cast<int>(pb.vars.size());
      const double s = std::min(-std::log1p(-graph.channel_prob(e)), kMaxDecay);
      pb.vars.push_back({sr.request, e, s, 0.0});
      pb.var_cons.emplace_back();
      const Edge& edge = graph.edge(e);
      attach(edge_con, index(e), caps.channels.at(index(e)), var);
      attach(node_con, index(edge.u), caps.qubits.at(index(edge.u)), var);
      attach(node_con, index(edge.v), caps.qubits.at(index(edge.v)), var);
    }
  }
  if (cost_cap) {
    Constraint budget{{}, static_cast<double>(*cost_cap)};
    for (std::size_t i = 0; i < pb.vars.size(); ++i) {
      budget.members.push_back(static_cast<int>(i));
      pb.var_cons[i].push_back(static_cast<int>(pb.cons.size()));
    }
    pb.cons.push_back(std::move(budget));
  }

  for (const Constraint& k : pb.cons) {
    if (static_cast<double>(k.members.size()) > k.cap) pb.min_feasible = false;
  }
  // Every other member of a constraint needs at least one unit.
  for (std::size_t i = 0; i < pb.vars.size(); ++i) {
    double upper = std::numeric_limits<double>::infinity();
    for (int k : pb.var_cons[i]) {
      const Constraint& c = pb.cons[static_cast<std::size_t>(k)];
      upper = std::min(upper, c.cap - static_cast<double>(c.members.size() - 1));
    }
    pb.vars[i].upper = std::max(1.0, upper);
  }
  return pb;
}

class DualSolver {
 public:
  DualSolver(const Problem& pb, const ObjectiveParams& params)
      : pb_(pb), V_(params.V), q_(params.q) {
    lambda_.assign(pb.cons.size(), 0.0);
    price_.assign(pb.vars.size(), q_);
    x_.resize(pb.vars.size());
  }

  RelaxedSolution solve(const SolverOptions& options) {
    RelaxedSolution out;
    std::vector<double> primal(pb_.vars.size());
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
      for (std::size_t k = 0; k < pb_.cons.size(); ++k) update_multiplier(k);
      for (std::size_t i = 0; i < x_.size(); ++i) x_[i] = best_response(i, price_[i]);

      const double dual = dual_value();
      project_feasible(primal);
      const double value = objective(primal);
      if (dual - value <= options.gap_tolerance * std::max(1.0, std::abs(value))) {
        out.objective = value;
        out.dual_bound = dual;
        out.sweeps = sweep;
        out.entries.reserve(primal.size());
        for (std::size_t i = 0; i < primal.size(); ++i) {
          out.entries.push_back({pb_.vars[i].request, pb_.vars[i].edge, primal[i]});
        }
        return out;
      }
    }
    throw NonConvergenceError("relaxed allocation did not reach the duality-gap target in " +
                              std::to_string(options.max_sweeps) + " sweeps");
  }

 private:
  // Maximizer of V ln(1 - e^{-s x}) - c x over [1, upper]. Stationarity
  // V s / (e^{s x} - 1) = c gives x = log1p(V s / c) / s.
  double best_response(std::size_t i, double price) const {
    const Variable& v = pb_.vars[i];
    if (price <= 0.0) return v.upper;
    const double x = std::log1p(V_ * v.decay / price) / v.decay;
    return std::clamp(x, 1.0, v.upper);
  }

  // d x / d price on the unclamped branch.
  double response_slope(std::size_t i, double price) const {
    const Variable& v = pb_.vars[i];
    if (price <= 0.0) return 0.0;
    const double x = std::log1p(V_ * v.decay / price) / v.decay;
    if (x <= 1.0 || x >= v.upper) return 0.0;
    return -V_ / (price * (price + V_ * v.decay));
  }

  // Exact coordinate maximization of the dual in lambda_k: the load of
  // constraint k is nonincreasing in lambda_k, so solve load = cap with a
  // bracketed Newton iteration (or keep lambda_k = 0 when slack).
  void update_multiplier(std::size_t k) {
    const Constraint& con = pb_.cons[k];
    const double old = lambda_[k];
    auto load_at = [&](double lam, double* slope) {
      double load = 0.0, d = 0.0;
      for (int m : con.members) {
        const auto i = static_cast<std::size_t>(m);
        const double price = price_[i] - old + lam;
        load += best_response(i, price);
        if (slope) d += response_slope(i, price);
      }
      if (slope) *slope = d;
      return load;
    };

    double next = 0.0;
    if (load_at(0.0, nullptr) > con.cap) {
      double lo = 0.0, hi = 0.0;
      for (int m : con.members) {
        const auto i = static_cast<std::size_t>(m);
        const Variable& v = pb_.vars[i];
        // Price at which this member drops to its lower bound of 1.
        const double floor_price = V_ * v.decay / std::expm1(v.decay);
        hi = std::max(hi, floor_price - (price_[i] - old));
      }
      double lam = std::clamp(old, lo, hi);
      if (lam <= lo) lam = 0.5 * (lo + hi);
      const double tol = 1e-12 * std::max(1.0, con.cap);
      for (int it = 0; it < 200; ++it) {
        double slope = 0.0;
        const double h = load_at(lam, &slope) - con.cap;
        if (std::abs(h) <= tol) break;
        if (h > 0.0) lo = lam; else hi = lam;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
        double cand = slope < 0.0 ? lam - h / slope : 0.5 * (lo + hi);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        lam = cand;
      }
      next = lam;
    }
    if (next != old) {
      for (int m : con.members) price_[static_cast<std::size_t>(m)] += next - old;
      lambda_[k] = next;
    }
  }

  double term(std::size_t i, double x) const {
    return V_ * std::log1p(-std::exp(-pb_.vars[i].decay * x)) - q_ * x;
  }

  double objective(const std::vector<double>& x) const {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) f += term(i, x[i]);
    return f;
  }

  double dual_value() const {
    double d = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) d += term(i, x_[i]) - (price_[i] - q_) * x_[i];
    for (std::size_t k = 0; k < lambda_.size(); ++k) d += lambda_[k] * pb_.cons[k].cap;
    return d;
  }

  // Shrinks variables of overloaded constraints toward 1 until every
  // constraint holds; all-ones is feasible so the scaling is well defined.
  void project_feasible(std::vector<double>& out) const {
    out = x_;
    std::vector<double> theta(out.size(), 1.0);
    for (const Constraint& con : pb_.cons) {
      double load = 0.0;
      for (int m : con.members) load += out[static_cast<std::size_t>(m)];
      if (load <= con.cap) continue;
      const double base = static_cast<double>(con.members.size());
      const double t = load > base ? (con.cap - base) / (load - base) : 0.0;
      for (int m : con.members) {
        auto& th = theta[static_cast<std::size_t>(m)];
        th = std::min(th, std::max(0.0, t));
      }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 + theta[i] * (out[i] - 1.0);
  }

  const Problem& pb_;
  double V_;
  double q_;
  std::vector<double> lambda_;
  std::vector<double> price_;  // q + sum of multipliers on the variable's constraints
  std::vector<double> x_;
};

[[noreturn]] void throw_infeasible() {
  throw InfeasibleSelectionError("one channel per route edge already exceeds a capacity");
}

}  // namespace

bool minimum_allocation_feasible(const QdnGraph& graph, const SlotCapacities& caps,
                                 std::span<const SelectedRoute> routes,
                                 std::optional<long> cost_cap) {
  return build_problem(graph, caps, routes, cost_cap).min_feasible;
}

RelaxedSolution solve_relaxed(const QdnGraph& graph, const SlotCapacities& caps,
                              std::span<const SelectedRoute> routes,
                              const ObjectiveParams& params, const SolverOptions& options) {
  params.validate();
  const Problem pb = build_problem(graph, caps, routes, params.cost_cap);
  if (!pb.min_feasible) throw_infeasible();
  if (pb.vars.empty()) return {};
  return DualSolver(pb, params).solve(options);
}

Allocation round_allocation(const QdnGraph& graph, const SlotCapacities& caps,
                            std::span<const SelectedRoute> routes, const RelaxedSolution& relaxed,
                            const ObjectiveParams& params) {
  params.validate();
  const Problem pb = build_problem(graph, caps, routes, params.cost_cap);
  if (!pb.min_feasible) throw_infeasible();

  const std::size_t nvars = pb.vars.size();
  std::vector<int> n(nvars);
  std::vector<double> load(pb.cons.size(), 0.0);
  for (std::size_t i = 0; i < nvars; ++i) {
    const bool aligned = relaxed.entries.size() == nvars &&
                         relaxed.entries[i].request == pb.vars[i].request &&
                         relaxed.entries[i].edge == pb.vars[i].edge;
    const double x = aligned ? relaxed.entries[i].channels
                             : relaxed.value(pb.vars[i].request, pb.vars[i].edge);
    n[i] = std::max(1, static_cast<int>(std::floor(x)));
    for (int k : pb.var_cons[i]) load[static_cast<std::size_t>(k)] += n[i];
  }

  auto gain = [&](std::size_t i) {
    const double p = graph.channel_prob(pb.vars[i].edge);
    return params.V * (log_edge_success_prob(p, n[i] + 1) - log_edge_success_prob(p, n[i])) -
           params.q;
  };
  auto fits = [&](std::size_t i) {
    for (int k : pb.var_cons[i]) {
      if (load[static_cast<std::size_t>(k)] + 1.0 > pb.cons[static_cast<std::size_t>(k)].cap) {
        return false;
      }
    }
    return true;
  };

  // Surplus: one channel at a time to the best positive-gain increment that
  // still fits; ties go to the smallest (request, edge).
  for (;;) {
    std::optional<std::size_t> best;
    double best_gain = 0.0;
    for (std::size_t i = 0; i < nvars; ++i) {
      if (!fits(i)) continue;
      const double g = gain(i);
      if (g <= 0.0) continue;
      const bool better =
          !best || g > best_gain ||
          (g == best_gain && std::pair{pb.vars[i].request, pb.vars[i].edge} <
                                 std::pair{pb.vars[*best].request, pb.vars[*best].edge});
      if (better) {
        best = i;
        best_gain = g;
      }
    }
    if (!best) break;
    ++n[*best];
    for (int k : pb.var_cons[*best]) load[static_cast<std::size_t>(k)] += 1.0;
  }

  Allocation alloc;
  for (std::size_t i = 0; i < nvars; ++i) alloc.set(pb.vars[i].request, pb.vars[i].edge, n[i]);
  return alloc;
}

AllocationResult allocate(const QdnGraph& graph, const SlotCapacities& caps,
                          std::span<const SelectedRoute> routes, const ObjectiveParams& params,
                          const SolverOptions& options) {
  const RelaxedSolution relaxed = solve_relaxed(graph, caps, routes, params, options);
  AllocationResult out;
  out.allocation = round_allocation(graph, caps, routes, relaxed, params);
  out.objective = per_slot_objective(graph, routes, out.allocation, params);
  return out;
}

std::optional<AllocationResult> try_allocate(const QdnGraph& graph, const SlotCapacities& caps,
                                             std::span<const SelectedRoute> routes,
                                             const ObjectiveParams& params,
                                             const SolverOptions& options) {
  if (!minimum_allocation_feasible(graph, caps, routes, params.cost_cap)) return std::nullopt;
  return allocate(graph, caps, routes, params, options);
}

double delta_gap(double V, int max_requests, int max_hops, double min_channel_prob) {
  if (!(min_channel_prob > 0.0 && min_channel_prob < 1.0)) {
    throw DomainError("minimum channel probability must lie in (0,1)");
  }
  return V * max_requests * max_hops * std::log(2.0 - min_channel_prob);
}

}  // namespace oscar
