#include "oscar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "oscar/errors.hpp"
#include "oscar/rng.hpp"
#include "oscar/serialization.hpp"

namespace oscar {

void ExperimentConfig::validate() const {
  topology.validate();
  capacities.validate();
  workload.validate();
  routes.validate();
  budget.validate();
  gibbs.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (policies.empty()) throw ConfigError("at least one policy is required");
  if (enumeration_cap < 1) throw ConfigError("enumeration_cap must be >= 1");
  if (!(histogram_bin_width > 0.0 && histogram_bin_width <= 1.0)) {
    throw ConfigError("histogram_bin_width must lie in (0,1]");
  }
  if (!(link.attempt_prob > 0.0 && link.attempt_prob < 1.0)) {
    throw ConfigError("link.attempt_prob must lie in (0,1)");
  }
  if (link.attempts < 1) throw ConfigError("link.attempts must be >= 1");
}

RunMetrics compute_metrics(std::span<const SlotRecord> records) {
  RunMetrics m;
  double utility_sum = 0.0, success_sum = 0.0;
  long cost_sum = 0, served = 0, unserved = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SlotRecord& r = records[i];
    utility_sum += r.utility;
    cost_sum += r.cost;
    for (double p : r.success_probs) success_sum += p;
    served += static_cast<long>(r.success_probs.size());
    unserved += r.unserved;
    const double slots = static_cast<double>(i + 1);
    m.utility_avg.push_back(utility_sum / slots);
    m.success_avg.push_back(served > 0 ? success_sum / static_cast<double>(served) : 0.0);
    m.cost_avg.push_back(static_cast<double>(cost_sum) / slots);
    m.cost_cum.push_back(cost_sum);
  }
  if (!records.empty()) {
    m.final_utility = m.utility_avg.back();
    m.final_success = m.success_avg.back();
    m.final_cost_avg = m.cost_avg.back();
    m.final_cost_cum = m.cost_cum.back();
  }
  m.served = served;
  m.unserved = unserved;
  return m;
}

long Histogram::total() const {
  long n = 0;
  for (long c : counts) n += c;
  return n;
}

Histogram histogram_success_rates(std::span<const SlotRecord> records, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) throw DomainError("bin width must lie in (0,1]");
  Histogram h;
  h.bin_width = bin_width;
  const auto bins = static_cast<std::size_t>(std::ceil(1.0 / bin_width - 1e-9));
  h.counts.assign(bins, 0);
  for (const SlotRecord& r : records) {
    for (double p : r.success_probs) {
      auto b = static_cast<std::size_t>(std::floor(p / bin_width));
      ++h.counts[std::min(b, bins - 1)];
    }
  }
  return h;
}

QdnGraph trial_graph(const ExperimentConfig& config, int trial) {
  if (config.graph_file) return load_graph(*config.graph_file);
  WaxmanParams params = config.topology;
  params.seed = config.trial_seed(trial);
  return generate_waxman(params, config.capacities, config.link);
}

double violation_bound(const ExperimentConfig& config, const QdnGraph& graph) {
  double max_slot_cost = 0.0;
  for (const Edge& e : graph.edges()) {
    const int cap = config.capacities.mode == CapacityMode::kStatic
                        ? e.channels
                        : std::max(e.channels, config.capacities.channels_hi);
    max_slot_cost += cap;
  }
  const BudgetParams& b = config.budget;
  const int F = config.workload.max_pairs;
  const int L = config.routes.max_hops;
  const double p_min = graph.min_channel_prob();
  const double delta = delta_gap(b.V, F, L, p_min);
  const double B = drift_constant(max_slot_cost, b.C, b.T);
  return theorem1_rhs(b.q0, b.T, drift_bound(delta, B, b.V, F, L, p_min));
}

PolicyRun run_policy(const ExperimentConfig& config, const QdnGraph& graph, int trial,
                     Policy policy) {
  const std::uint64_t seed = config.trial_seed(trial);
  RouteCache cache(graph, config.routes);
  ControllerState state = ControllerState::initial(policy, config.budget);

  PolicyRun run;
  run.trial = trial;
  run.policy = policy;
  run.records.reserve(static_cast<std::size_t>(config.budget.T));
  for (int t = 0; t < config.budget.T; ++t) {
    const SlotCapacities caps = sample_slot_capacities(graph, config.capacities, t, seed);
    const auto pairs = sample_requests(graph, config.workload, t, seed);
    std::vector<SdRequest> requests;
    requests.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      requests.push_back({static_cast<RequestId>(i), pairs[i].source, pairs[i].destination,
                          cache.get(pairs[i].source, pairs[i].destination)});
    }
    GibbsParams gibbs = config.gibbs;
    gibbs.seed = derive_seed(seed, Stream::kSelection, static_cast<std::uint64_t>(t));
    const SlotInput in{graph, caps, requests, gibbs, config.enumeration_cap};
    SlotOutcome outcome = run_slot(in, state, config.budget);
    run.records.push_back(std::move(outcome.record));
    state = outcome.next;
  }
  run.metrics = compute_metrics(run.records);
  run.violation = static_cast<double>(run.metrics.final_cost_cum) / config.budget.T -
                  config.budget.per_slot();
  run.violation_bound = violation_bound(config, graph);
  return run;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<QdnGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(config.trials));
  for (int k = 0; k < config.trials; ++k) graphs.push_back(trial_graph(config, k));

  const std::size_t npol = config.policies.size();
  const std::size_t njobs = graphs.size() * npol;
  ExperimentResult result;
  result.runs.resize(njobs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < njobs; job = next++) {
      try {
        const int trial = static_cast<int>(job / npol);
        result.runs[job] =
            run_policy(config, graphs[static_cast<std::size_t>(trial)], trial, config.policies[job % npol]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(config.workers, static_cast<int>(njobs));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (Policy p : config.policies) {
    PolicySummary s;
    int n = 0;
    for (const PolicyRun& run : result.runs) {
      if (run.policy != p) continue;
      s.final_utility += run.metrics.final_utility;
      s.final_success += run.metrics.final_success;
      s.final_cost_cum += static_cast<double>(run.metrics.final_cost_cum);
      s.violation_bound += run.violation_bound;
      ++n;
    }
    s.final_utility /= n;
    s.final_success /= n;
    s.final_cost_cum /= n;
    s.violation_bound /= n;
    result.mean[p] = s;
  }
  return result;
}

namespace {

// Fixed formatting so identical runs produce identical bytes.
std::ostream& fmt(std::ostream& os) { return os << std::setprecision(10); }

}  // namespace

void write_slots_csv(std::ostream& os, const ExperimentResult& result) {
  fmt(os) << "trial,policy,t,utility_avg,success_avg,cost,cost_cum,q,unserved\n";
  for (const PolicyRun& run : result.runs) {
    for (std::size_t i = 0; i < run.records.size(); ++i) {
      const SlotRecord& r = run.records[i];
      os << run.trial << ',' << policy_name(run.policy) << ',' << r.t << ','
         << run.metrics.utility_avg[i] << ',' << run.metrics.success_avg[i] << ',' << r.cost
         << ',' << run.metrics.cost_cum[i] << ',' << r.q_after << ',' << r.unserved << '\n';
    }
  }
}

void write_summary_csv(std::ostream& os, const ExperimentResult& result) {
  fmt(os) << "trial,policy,final_utility,final_success,final_cost_avg,final_cost_cum,served,"
             "unserved,violation,violation_bound\n";
  for (const PolicyRun& run : result.runs) {
    const RunMetrics& m = run.metrics;
    os << run.trial << ',' << policy_name(run.policy) << ',' << m.final_utility << ','
       << m.final_success << ',' << m.final_cost_avg << ',' << m.final_cost_cum << ','
       << m.served << ',' << m.unserved << ',' << run.violation << ',' << run.violation_bound
       << '\n';
  }
  for (const auto& [policy, s] : result.mean) {
    os << "mean," << policy_name(policy) << ',' << s.final_utility << ',' << s.final_success
       << ",," << s.final_cost_cum << ",,,," << s.violation_bound << '\n';
  }
}

void write_histogram_csv(std::ostream& os, const ExperimentResult& result, double bin_width) {
  fmt(os) << "policy,bin_lo,bin_hi,count\n";
  std::map<Policy, std::vector<SlotRecord>> pooled;
  for (const PolicyRun& run : result.runs) {
    auto& dst = pooled[run.policy];
    dst.insert(dst.end(), run.records.begin(), run.records.end());
  }
  for (const auto& [policy, records] : pooled) {
    const Histogram h = histogram_success_rates(records, bin_width);
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      os << policy_name(policy) << ',' << b * bin_width << ','
         << std::min(1.0, (b + 1) * bin_width) << ',' << h.counts[b] << '\n';
    }
  }
}

void write_experiment(const ExperimentResult& result, const ExperimentConfig& config,
                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("slots.csv");
    write_slots_csv(out, result);
  }
  {
    auto out = open("summary.csv");
    write_summary_csv(out, result);
  }
  {
    auto out = open("histogram.csv");
    write_histogram_csv(out, result, config.histogram_bin_width);
  }
  {
    auto out = open("config.json");
    out << config_to_json(config).dump(2) << '\n';
  }
}

bool MonteCarloCheck::within(double k_sigma) const {
  // The floor keeps near-certain routes from demanding an exact match.
  return std::abs(empirical - analytic) <= k_sigma * std::max(sigma, 1e-12);
}

std::vector<MonteCarloCheck> monte_carlo_validation(const QdnGraph& graph,
                                                    const RouteConfig& routes, int instances,
                                                    long samples, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kMonteCarlo, 0x7A11D);
  const auto n = static_cast<std::uint32_t>(graph.node_count());
  std::uniform_int_distribution<std::uint32_t> node(0, n - 1);
  std::uniform_int_distribution<int> channels(1, 4);
  std::vector<MonteCarloCheck> out;
  for (int i = 0; i < instances;) {
    const NodeId s{node(rng)};
    const NodeId d{node(rng)};
    if (s == d) continue;
    const auto candidates = candidate_routes(graph, s, d, routes);
    if (candidates.empty()) continue;
    const Route& route =
        candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    const RequestId req{0};
    Allocation alloc;
    for (EdgeId e : route.edges()) alloc.set(req, e, channels(rng));
    const double p = route_success_prob(graph, route, req, alloc);
    const double emp = monte_carlo_route_success(graph, route, req, alloc, samples,
                                                 derive_seed(seed, Stream::kMonteCarlo,
                                                             static_cast<std::uint64_t>(i)));
    out.push_back({s, d, route.hops(), p, emp,
                   std::sqrt(p * (1.0 - p) / static_cast<double>(samples))});
    ++i;
  }
  return out;
}

std::string_view sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::kBudget: return "C";
    case SweepParameter::kNodeCount: return "node_count";
    case SweepParameter::kV: return "V";
    case SweepParameter::kQ0: return "q0";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "C") return SweepParameter::kBudget;
  if (name == "node_count") return SweepParameter::kNodeCount;
  if (name == "V") return SweepParameter::kV;
  if (name == "q0") return SweepParameter::kQ0;
  throw ConfigError("unknown sweep parameter '" + std::string(name) +
                    "' (expected C, node_count, V or q0)");
}

ExperimentConfig with_parameter(const ExperimentConfig& base, SweepParameter p, double value) {
  ExperimentConfig c = base;
  switch (p) {
    case SweepParameter::kBudget:
      c.budget.C = std::lround(value);
      break;
    case SweepParameter::kNodeCount:
      c.topology.node_count = static_cast<int>(std::lround(value));
      c.topology.beta = calibrate_waxman_beta(c.topology.node_count, c.topology.alpha,
                                              c.topology.side, 4.0, c.seed);
      break;
    case SweepParameter::kV:
      c.budget.V = value;
      break;
    case SweepParameter::kQ0:
      c.budget.q0 = value;
      break;
  }
  c.validate();
  return c;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepParameter parameter,
                            const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (double v : values) {
    const ExperimentResult result = run_experiment(with_parameter(config, parameter, v));
    for (Policy p : config.policies) {
      const PolicySummary& s = result.mean.at(p);
      rows.push_back({parameter, v, p, s.final_utility, s.final_success, s.final_cost_cum,
                      s.violation_bound});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  fmt(os) << "param,value,policy,final_utility,final_success,final_cost,violation_bound\n";
  for (const SweepRow& r : rows) {
    os << sweep_parameter_name(r.parameter) << ',' << r.value << ',' << policy_name(r.policy)
       << ',' << r.final_utility << ',' << r.final_success << ',' << r.final_cost << ','
       << r.violation_bound << '\n';
  }
}

}  // namespace oscar
