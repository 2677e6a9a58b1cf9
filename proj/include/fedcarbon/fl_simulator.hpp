#pragma once

// Round loop for FL runs (trace replay or live FedAVG) and the epoch loop for
// centralized runs. Wall time, energy and CO2 are accumulated round by round.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedcarbon/data_partitioner.hpp"
#include "fedcarbon/dataset.hpp"
#include "fedcarbon/energy_carbon.hpp"
#include "fedcarbon/fedavg_engine.hpp"
#include "fedcarbon/scenario_store.hpp"

namespace fedcarbon {

struct RoundLog {
  int round_index = 0;
  std::vector<int> selected_client_ids;
  double accuracy_after_round = 0.0;
  double cumulative_wall_seconds = 0.0;
  Energy cumulative_energy;
  double cumulative_co2_grams = 0.0;
};

struct RunResult {
  std::string scenario_id;
  Mode mode = Mode::kFl;
  std::optional<int> rounds_to_target;
  bool reached = false;
  int rounds_run = 0;
  double total_co2_grams = 0.0;
  double total_energy_wh = 0.0;
  double total_wall_seconds = 0.0;
  double max_accuracy = 0.0;
  std::vector<RoundLog> rounds;
};

struct RunOptions {
  /// Overrides the scenario's round cap when set.
  std::optional<int> round_cap;
  /// Mixed into every random stream of a live run.
  std::uint64_t seed = 0;
};

/// Uniform sample without replacement, returned in ascending order. A pure
/// function of (seed, round_index).
std::vector<int> select_clients(int total_clients, int clients_per_round,
                                int round_index, std::uint64_t seed);

/// Seed for one client's local training in one round of a live run.
std::uint64_t local_train_seed(std::uint64_t run_seed, int round_index,
                               int client_id);

/// State of a live FedAVG run: synthetic data, client shards and the global
/// model. Each call to run_round trains the selected clients from the current
/// global model (fresh momentum) and replaces it with their weighted average.
class LiveFederation {
 public:
  LiveFederation(const LiveConfig& cfg, const FlParams& fl, std::uint64_t seed);

  double accuracy() const;
  double run_round(int round_index, std::span<const int> selected);

  std::uint64_t run_seed() const { return run_seed_; }
  const SyntheticData& data() const { return data_; }
  const Partition& partition() const { return partition_; }
  const ModelParams& params() const { return params_; }
  /// Local training settings; the seed is set per client and round.
  const TrainConfig& train_config() const { return train_; }

 private:
  std::uint64_t run_seed_;
  SyntheticData data_;
  Partition partition_;
  ModelParams params_;
  TrainConfig train_;
};

RunResult run_fl(const Scenario& scenario, const Stores& stores,
                 const RunOptions& options = {});
RunResult run_centralized(const Scenario& scenario, const Stores& stores,
                          const RunOptions& options = {});
/// Dispatches on scenario.mode.
RunResult run_scenario(const Scenario& scenario, const Stores& stores,
                       const RunOptions& options = {});

struct Comparison {
  RunResult first;
  RunResult second;
  double co2_ratio = 0.0;   // first / second
  double time_ratio = 0.0;  // first / second
};

/// Ratios are NaN when the denominator is zero.
Comparison compare(const RunResult& first, const RunResult& second);
Comparison compare(const Scenario& first, const Scenario& second,
                   const Stores& stores);

/// `scenario_id,round,selected,accuracy,cum_seconds,cum_wh,cum_co2_g`, with
/// selected ids joined by ';'.
void write_run_csv(std::ostream& out, std::span<const RunResult> runs);

}  // namespace fedcarbon
