#pragma once

// Experiment orchestration: configuration, paired multi-trial runs of each
// policy, running-average metrics, parameter sweeps and CSV output.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oscar/controller.hpp"
#include "oscar/routes.hpp"
#include "oscar/topology.hpp"

namespace oscar {

struct ExperimentConfig {
  WaxmanParams topology;
  CapacityDistributions capacities;
  LinkModel link;
  WorkloadParams workload;
  RouteConfig routes;
  BudgetParams budget;
  GibbsParams gibbs;
  long enumeration_cap = kDefaultEnumerationCap;
  std::vector<Policy> policies{Policy::kOscar, Policy::kMyopicFixed, Policy::kMyopicAdaptive};
  int trials = 5;
  std::uint64_t seed = 1;
  int workers = 1;
  double histogram_bin_width = 0.02;
  std::optional<std::string> graph_file;  // use this graph instead of Waxman draws
  std::string output_dir = "out";

  void validate() const;
  std::uint64_t trial_seed(int trial) const { return seed + static_cast<std::uint64_t>(trial); }
};

struct RunMetrics {
  std::vector<double> utility_avg;  // running mean of slot utility
  std::vector<double> success_avg;  // running mean over requests served so far
  std::vector<double> cost_avg;     // running mean of slot cost
  std::vector<long> cost_cum;
  double final_utility = 0.0;
  double final_success = 0.0;
  double final_cost_avg = 0.0;
  long final_cost_cum = 0;
  long served = 0;
  long unserved = 0;
};

RunMetrics compute_metrics(std::span<const SlotRecord> records);

struct Histogram {
  double bin_width = 0.02;
  std::vector<long> counts;  // bin i covers [i w, (i+1) w), the last bin includes 1

  long total() const;
};

Histogram histogram_success_rates(std::span<const SlotRecord> records, double bin_width = 0.02);

struct PolicyRun {
  int trial = 0;
  Policy policy = Policy::kOscar;
  std::vector<SlotRecord> records;
  RunMetrics metrics;
  // Budget violation (1/T) sum c - C/T and its bound for this run's graph.
  double violation = 0.0;
  double violation_bound = 0.0;
};

struct PolicySummary {
  double final_utility = 0.0;
  double final_success = 0.0;
  double final_cost_cum = 0.0;
  double violation_bound = 0.0;
};

struct ExperimentResult {
  std::vector<PolicyRun> runs;  // ordered by trial, then by configured policy order
  std::map<Policy, PolicySummary> mean;
};

// Graph used by a trial: the configured file or a Waxman draw seeded by
// the trial seed.
QdnGraph trial_graph(const ExperimentConfig& config, int trial);

// Theorem-1 right-hand side for this configuration on `graph`.
double violation_bound(const ExperimentConfig& config, const QdnGraph& graph);

PolicyRun run_policy(const ExperimentConfig& config, const QdnGraph& graph, int trial,
                     Policy policy);
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_slots_csv(std::ostream& os, const ExperimentResult& result);
void write_summary_csv(std::ostream& os, const ExperimentResult& result);
void write_histogram_csv(std::ostream& os, const ExperimentResult& result, double bin_width);
// slots.csv, summary.csv, histogram.csv and config.json under `dir`.
void write_experiment(const ExperimentResult& result, const ExperimentConfig& config,
                      const std::filesystem::path& dir);

struct MonteCarloCheck {
  NodeId source;
  NodeId destination;
  std::size_t hops;
  double analytic;
  double empirical;
  double sigma;  // binomial standard error at the analytic probability

  bool within(double k_sigma) const;
};

// Random requests on `graph` with random channel counts in [1, 4] on a
// random candidate route; compares the closed-form route success with a
// channel-level simulation.
std::vector<MonteCarloCheck> monte_carlo_validation(const QdnGraph& graph,
                                                    const RouteConfig& routes, int instances,
                                                    long samples, std::uint64_t seed);

enum class SweepParameter { kBudget, kNodeCount, kV, kQ0 };
std::string_view sweep_parameter_name(SweepParameter p);  // "C", "node_count", "V", "q0"
SweepParameter parse_sweep_parameter(std::string_view name);

// Copy of `base` with one parameter replaced. Node-count changes also
// recalibrate Waxman beta for a mean degree of about 4.
ExperimentConfig with_parameter(const ExperimentConfig& base, SweepParameter p, double value);

struct SweepRow {
  SweepParameter parameter;
  double value;
  Policy policy;
  double final_utility;
  double final_success;
  double final_cost;
  double violation_bound;
};

std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepParameter parameter,
                            const std::vector<double>& values);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace oscar
