// Command-line front end: topology, run, sweep, bounds and validate.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oscar/controller.hpp"
#include "oscar/errors.hpp"
#include "oscar/harness.hpp"
#include "oscar/serialization.hpp"
#include "oscar/topology.hpp"

namespace {

namespace fs = std::filesystem;
using namespace oscar;

struct CommonFlags {
  std::string config = "default";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out;
  std::optional<std::string> policies;
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Config file, or 'default'");
  cmd->add_option("--seed", f.seed, "Base seed (trial k uses seed + k)");
  cmd->add_option("--trials", f.trials, "Number of paired trials");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--policy", f.policies, "Comma-separated policies: oscar,mf,ma");
  cmd->add_option("--workers", f.workers, "Concurrent trial workers");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig c = load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.trials) c.trials = *f.trials;
  if (f.out) c.output_dir = *f.out;
  if (f.workers) c.workers = *f.workers;
  if (f.policies) {
    c.policies.clear();
    for (const auto& name : split(*f.policies, ',')) c.policies.push_back(parse_policy(name));
  }
  c.validate();
  return c;
}

int cmd_topology(const CommonFlags& f, int trial, const std::optional<std::string>& workload) {
  const ExperimentConfig c = resolve(f);
  const QdnGraph g = trial_graph(c, trial);
  if (f.out) {
    fs::create_directories(c.output_dir);
    save_graph(g, fs::path(c.output_dir) / "graph.json");
  } else {
    std::cout << graph_to_json(g).dump(2) << '\n';
  }
  if (workload) {
    std::vector<std::vector<SdPair>> slots;
    for (int t = 0; t < c.budget.T; ++t) {
      slots.push_back(sample_requests(g, c.workload, t, c.trial_seed(trial)));
    }
    std::ofstream os(*workload);
    if (!os) throw ConfigError("cannot write " + *workload);
    write_workload_replay(os, slots);
  }
  std::cerr << "nodes " << g.node_count() << ", edges " << g.edge_count() << ", mean degree "
            << g.mean_degree() << '\n';
  return 0;
}

int cmd_run(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f);
  const ExperimentResult r = run_experiment(c);
  write_experiment(r, c, c.output_dir);
  std::cout << std::fixed << std::setprecision(4);
  for (Policy p : c.policies) {
    const PolicySummary& s = r.mean.at(p);
    std::cout << policy_name(p) << ": success " << s.final_success << ", utility "
              << s.final_utility << ", cumulative cost " << s.final_cost_cum << '\n';
  }
  std::cout << "wrote " << c.output_dir << '\n';
  return 0;
}

int cmd_sweep(const CommonFlags& f, const std::string& param, const std::string& values) {
  const ExperimentConfig c = resolve(f);
  std::vector<double> xs;
  for (const auto& v : split(values, ',')) xs.push_back(std::stod(v));
  if (xs.empty()) throw ConfigError("--values needs at least one value");
  const auto rows = sweep(c, parse_sweep_parameter(param), xs);
  fs::create_directories(c.output_dir);
  const fs::path path = fs::path(c.output_dir) / "sweep.csv";
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  write_sweep_csv(os, rows);
  write_sweep_csv(std::cout, rows);
  return 0;
}

int cmd_bounds(const CommonFlags& f, int trial) {
  const ExperimentConfig c = resolve(f);
  const QdnGraph g = trial_graph(c, trial);
  const BudgetParams& b = c.budget;
  const int F = c.workload.max_pairs;
  const int L = c.routes.max_hops;
  const double p_min = g.min_channel_prob();
  double c_max = 0.0;
  for (const Edge& e : g.edges()) {
    c_max += c.capacities.mode == CapacityMode::kStatic
                 ? e.channels
                 : std::max(e.channels, c.capacities.channels_hi);
  }
  const double delta = delta_gap(b.V, F, L, p_min);
  const double B = drift_constant(c_max, b.C, b.T);
  const double D = drift_bound(delta, B, b.V, F, L, p_min);
  std::cout << std::setprecision(10);
  std::cout << "p_min " << p_min << '\n'
            << "c_max " << c_max << '\n'
            << "delta " << delta << '\n'
            << "B " << B << '\n'
            << "D " << D << '\n'
            << "theorem1_rhs " << theorem1_rhs(b.q0, b.T, D) << '\n'
            << "theorem2_gap " << theorem2_gap(b.V, b.q0, b.T, delta, B) << '\n';
  const bool a1 = check_assumption1(b.C, F, L, b.T);
  std::cout << "assumption1 " << (a1 ? "holds" : "violated") << '\n';
  if (!a1) {
    std::cerr << "warning: C < F*L*T, so the minimum allocation may exceed the budget\n";
  }
  return 0;
}

int cmd_validate(const CommonFlags& f, int instances, long samples) {
  const ExperimentConfig c = resolve(f);
  const QdnGraph g = trial_graph(c, 0);
  const auto checks = monte_carlo_validation(g, c.routes, instances, samples, c.seed);
  int failures = 0;
  std::cout << std::setprecision(6);
  for (const MonteCarloCheck& m : checks) {
    const bool ok = m.within(3.0);
    failures += ok ? 0 : 1;
    std::cout << index(m.source) << "-" << index(m.destination) << " hops " << m.hops
              << " analytic " << m.analytic << " empirical " << m.empirical << " sigma "
              << m.sigma << (ok ? " ok" : " OUTSIDE 3 sigma") << '\n';
  }
  std::cout << checks.size() - static_cast<std::size_t>(failures) << "/" << checks.size()
            << " within 3 sigma\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained entanglement routing simulator"};
  app.require_subcommand(1);

  CommonFlags topo_f, run_f, sweep_f, bounds_f, validate_f;
  int topo_trial = 0, bounds_trial = 0;
  std::optional<std::string> workload;
  std::string param, values;
  int instances = 20;
  long samples = 100000;

  auto* topo = app.add_subcommand("topology", "Generate a trial graph and dump it as JSON");
  add_common(topo, topo_f);
  topo->add_option("--trial", topo_trial, "Trial index whose graph is generated");
  topo->add_option("--workload", workload, "Also write the trial's request stream here");

  auto* run = app.add_subcommand("run", "Run every policy over paired trials");
  add_common(run, run_f);

  auto* sw = app.add_subcommand("sweep", "Sweep one parameter and report final metrics");
  add_common(sw, sweep_f);
  sw->add_option("--param", param, "C, node_count, V or q0")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();

  auto* bounds = app.add_subcommand("bounds", "Print the optimality gap and violation bounds");
  add_common(bounds, bounds_f);
  bounds->add_option("--trial", bounds_trial, "Trial index whose graph supplies p_min");

  auto* validate = app.add_subcommand("validate", "Monte-Carlo check of route success");
  add_common(validate, validate_f);
  validate->add_option("--instances", instances, "Random route instances");
  validate->add_option("--samples", samples, "Samples per instance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*topo) return cmd_topology(topo_f, topo_trial, workload);
    if (*run) return cmd_run(run_f);
    if (*sw) return cmd_sweep(sweep_f, param, values);
    if (*bounds) return cmd_bounds(bounds_f, bounds_trial);
    if (*validate) return cmd_validate(validate_f, instances, samples);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
