#pragma once

// Waxman network generation, per-slot capacity fluctuation and the
// source-destination request process.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "oscar/qdn_model.hpp"
#include "oscar/rng.hpp"

namespace oscar {

struct WaxmanParams {
  int node_count = 20;
  double alpha = 0.5;
  double beta = 0.5;
  double side = 100.0;
  std::uint64_t seed = 0;
  int max_retries = 100;

  void validate() const;
};

enum class CapacityMode { kStatic, kRedrawPerSlot };

struct CapacityDistributions {
  int qubits_lo = 10;
  int qubits_hi = 16;
  int channels_lo = 5;
  int channels_hi = 8;
  CapacityMode mode = CapacityMode::kStatic;

  void validate() const;
};

struct LinkModel {
  double attempt_prob = 2e-4;
  int attempts = 4000;
};

struct WorkloadParams {
  int pairs_lo = 1;
  int pairs_hi = 5;
  // Upper bound F on requests per slot.
  int max_pairs = 5;

  void validate() const;
};

struct SdPair {
  NodeId source;
  NodeId destination;

  friend bool operator==(const SdPair&, const SdPair&) = default;
};

// beta * exp(-d / (alpha * d_max)).
double waxman_edge_probability(double distance, double max_distance, double alpha, double beta);

// Draws placements and edges, resampling the whole graph until connected.
// Throws GenerationError after `max_retries` disconnected draws.
QdnGraph generate_waxman(const WaxmanParams& params, const CapacityDistributions& caps,
                         const LinkModel& link = {});

// Same edge draw as generate_waxman on fixed node placements; exposed so
// edge frequencies can be measured against the model probability.
std::vector<std::pair<std::size_t, std::size_t>> draw_waxman_edges(
    const std::vector<Node>& placed, double alpha, double beta, Rng& rng);

// Beta giving the requested expected mean degree for `node_count` nodes,
// estimated over `samples` random placements; clamped to (0,1].
double calibrate_waxman_beta(int node_count, double alpha, double side, double target_degree,
                             std::uint64_t seed, int samples = 200);

SlotCapacities sample_slot_capacities(const QdnGraph& graph, const CapacityDistributions& caps,
                                      int slot, std::uint64_t seed);

std::vector<SdPair> sample_requests(const QdnGraph& graph, const WorkloadParams& workload,
                                    int slot, std::uint64_t seed);

// One line per slot: "<t>: s-d s-d ...".
void write_workload_replay(std::ostream& os, const std::vector<std::vector<SdPair>>& slots);
std::vector<std::vector<SdPair>> read_workload_replay(std::istream& is);

}  // namespace oscar
