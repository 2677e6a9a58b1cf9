#include "fedcarbon/fl_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "fedcarbon/rng.hpp"

namespace fedcarbon {

std::vector<int> select_clients(int total_clients, int clients_per_round,
                                int round_index, std::uint64_t seed) {
  if (total_clients < 1 || clients_per_round < 1 ||
      clients_per_round > total_clients) {
    throw ValidationError("need 1 <= clients_per_round <= total_clients");
  }
  std::vector<int> ids(static_cast<std::size_t>(total_clients));
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(derive_seed(seed, 0xc11e47u, round_index));
  // Partial Fisher-Yates: the first k slots become the sample.
  for (int i = 0; i < clients_per_round; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   rng.below(static_cast<std::uint64_t>(total_clients - i));
    std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(clients_per_round));
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::uint64_t local_train_seed(std::uint64_t run_seed, int round_index,
                               int client_id) {
  return derive_seed(run_seed, 0x7a1bu, round_index, client_id);
}

LiveFederation::LiveFederation(const LiveConfig& cfg, const FlParams& fl,
                               std::uint64_t seed)
    : run_seed_(derive_seed(cfg.seed, seed)) {
  SyntheticSpec spec = cfg.data;
  spec.seed = run_seed_;
  data_ = make_gaussian_clusters(spec);
  const auto labels =
      LabeledDatasetSpec::from_labels(data_.train.labels, spec.num_classes);
  const std::uint64_t part_seed = derive_seed(run_seed_, 0x9a47u);
  partition_ = fl.partitioning == Partitioning::kIid
                   ? partition_iid(labels, fl.total_clients, part_seed)
                   : partition_non_iid(labels, fl.total_clients, part_seed);
  params_ = init_params(
      ModelDims{static_cast<std::size_t>(spec.num_features), cfg.hidden_dim,
                static_cast<std::size_t>(spec.num_classes)},
      run_seed_);
  train_.learning_rate = cfg.learning_rate;
  train_.momentum = cfg.momentum;
  train_.batch_size = cfg.batch_size;
  train_.local_epochs = fl.local_epochs;
  train_.validate();
}

double LiveFederation::accuracy() const {
  return evaluate_accuracy(params_, data_.test);
}

double LiveFederation::run_round(int round_index, std::span<const int> selected) {
  std::vector<ClientUpdate> updates;
  updates.reserve(selected.size());
  for (int client : selected) {
    const auto& shard = partition_.shards.at(static_cast<std::size_t>(client));
    if (shard.size() == 0) continue;
    TrainConfig cfg = train_;
    cfg.seed = local_train_seed(run_seed_, round_index, client);
    updates.push_back(ClientUpdate{
        local_train(params_, shard, data_.train, cfg).params, shard.size()});
  }
  if (!updates.empty()) params_ = fedavg_aggregate(updates);
  return accuracy();
}

namespace {

// Produces the accuracy after each round, either by trace lookup or by
// running one FedAVG round.
class AccuracyModel {
 public:
  virtual ~AccuracyModel() = default;
  virtual double initial() const = 0;
  virtual double after_round(int round, std::span<const int> selected) = 0;
};

class TraceAccuracy final : public AccuracyModel {
 public:
  explicit TraceAccuracy(const LearningTrace& trace) : trace_(trace) {}
  double initial() const override { return trace_.accuracy_at(0); }
  double after_round(int round, std::span<const int>) override {
    return trace_.accuracy_at(round);
  }

 private:
  const LearningTrace& trace_;
};

class LiveAccuracy final : public AccuracyModel {
 public:
  LiveAccuracy(const LiveConfig& cfg, const FlParams& fl, std::uint64_t seed)
      : fed_(cfg, fl, seed), initial_(fed_.accuracy()) {}
  double initial() const override { return initial_; }
  double after_round(int round, std::span<const int> selected) override {
    return fed_.run_round(round, selected);
  }

 private:
  LiveFederation fed_;
  double initial_;
};

}  // namespace

RunResult run_fl(const Scenario& scenario, const Stores& stores,
                 const RunOptions& options) {
  resolve_scenario(scenario, stores);
  if (scenario.mode != Mode::kFl) {
    throw ValidationError("run_fl needs an FL scenario");
  }
  const FlParams& fl = *scenario.fl;
  const EmissionFactor& factor = stores.factors.at(scenario.region);
  const PowerDraw power = effective_power(scenario, stores);
  const Duration round_time = effective_round_time(scenario, stores);
  const Energy per_round = energy_fl(fl.clients_per_round, round_time, power);
  const int cap = options.round_cap.value_or(fl.round_cap);
  if (cap < 1) throw ValidationError("round cap must be >= 1");

  std::unique_ptr<AccuracyModel> model;
  if (scenario.uses_trace()) {
    model = std::make_unique<TraceAccuracy>(stores.traces.at(scenario.trace_id()));
  } else {
    model = std::make_unique<LiveAccuracy>(std::get<LiveConfig>(scenario.source),
                                           fl, options.seed);
  }

  RunResult result;
  result.scenario_id = scenario.id;
  result.mode = Mode::kFl;
  result.max_accuracy = model->initial();
  if (model->initial() >= scenario.target_accuracy) {
    result.reached = true;
    result.rounds_to_target = 0;
    return result;
  }

  Energy cumulative;
  double wall = 0.0;
  for (int round = 1; round <= cap; ++round) {
    RoundLog log;
    log.round_index = round;
    log.selected_client_ids =
        select_clients(fl.total_clients, fl.clients_per_round, round, options.seed);
    log.accuracy_after_round = model->after_round(round, log.selected_client_ids);
    wall += round_time.seconds();
    cumulative += per_round;
    log.cumulative_wall_seconds = wall;
    log.cumulative_energy = cumulative;
    log.cumulative_co2_grams = factor.grams_for(cumulative);
    result.max_accuracy = std::max(result.max_accuracy, log.accuracy_after_round);
    result.rounds.push_back(std::move(log));
    if (result.rounds.back().accuracy_after_round >= scenario.target_accuracy) {
      result.reached = true;
      result.rounds_to_target = round;
      break;
    }
  }

  const RoundLog& last = result.rounds.back();
  result.rounds_run = last.round_index;
  result.total_wall_seconds = last.cumulative_wall_seconds;
  result.total_energy_wh = last.cumulative_energy.watt_hours();
  result.total_co2_grams = last.cumulative_co2_grams;
  return result;
}

RunResult run_centralized(const Scenario& scenario, const Stores& stores,
                          const RunOptions& options) {
  resolve_scenario(scenario, stores);
  if (scenario.mode != Mode::kCentralized) {
    throw ValidationError("run_centralized needs a CENTRALIZED scenario");
  }
  const CentralizedParams& c = *scenario.centralized;
  const EmissionFactor& factor = stores.factors.at(scenario.region);
  const PowerDraw power = effective_power(scenario, stores);
  const Pue pue = effective_pue(scenario, stores);
  const LearningTrace& trace = stores.traces.at(scenario.trace_id());
  const int cap = options.round_cap.value_or(c.max_epochs);

  RunResult result;
  result.scenario_id = scenario.id;
  result.mode = Mode::kCentralized;
  result.max_accuracy = trace.accuracy_at(0);
  if (result.max_accuracy >= scenario.target_accuracy) {
    result.reached = true;
    result.rounds_to_target = 0;
    return result;
  }
  for (int epoch = 1; epoch <= cap; ++epoch) {
    RoundLog log;
    log.round_index = epoch;
    log.accuracy_after_round = trace.accuracy_at(epoch);
    log.cumulative_wall_seconds = epoch * c.epoch_time_s;
    const Duration elapsed(log.cumulative_wall_seconds);
    log.cumulative_energy = energy_centralized(pue, elapsed, power);
    log.cumulative_co2_grams = co2_centralized(pue, elapsed, power, factor);
    result.max_accuracy = std::max(result.max_accuracy, log.accuracy_after_round);
    result.rounds.push_back(std::move(log));
    if (result.rounds.back().accuracy_after_round >= scenario.target_accuracy) {
      result.reached = true;
      result.rounds_to_target = epoch;
      break;
    }
  }
  const RoundLog& last = result.rounds.back();
  result.rounds_run = last.round_index;
  result.total_wall_seconds = last.cumulative_wall_seconds;
  result.total_energy_wh = last.cumulative_energy.watt_hours();
  result.total_co2_grams = last.cumulative_co2_grams;
  return result;
}

RunResult run_scenario(const Scenario& scenario, const Stores& stores,
                       const RunOptions& options) {
  return scenario.mode == Mode::kFl ? run_fl(scenario, stores, options)
                                    : run_centralized(scenario, stores, options);
}

Comparison compare(const RunResult& first, const RunResult& second) {
  const auto ratio = [](double a, double b) {
    return b == 0.0 ? std::numeric_limits<double>::quiet_NaN() : a / b;
  };
  Comparison c{first, second, 0.0, 0.0};
  c.co2_ratio = ratio(first.total_co2_grams, second.total_co2_grams);
  c.time_ratio = ratio(first.total_wall_seconds, second.total_wall_seconds);
  return c;
}

Comparison compare(const Scenario& first, const Scenario& second,
                   const Stores& stores) {
  return compare(run_scenario(first, stores), run_scenario(second, stores));
}

void write_run_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "scenario_id,round,selected,accuracy,cum_seconds,cum_wh,cum_co2_g\n";
  for (const auto& run : runs) {
    for (const auto& r : run.rounds) {
      std::string selected;
      for (std::size_t i = 0; i < r.selected_client_ids.size(); ++i) {
        if (i) selected += ';';
        selected += std::to_string(r.selected_client_ids[i]);
      }
      out << fmt::format("{},{},{},{},{},{},{}\n", run.scenario_id,
                         r.round_index, selected, r.accuracy_after_round,
                         r.cumulative_wall_seconds,
                         r.cumulative_energy.watt_hours(),
                         r.cumulative_co2_grams);
    }
  }
}

}  // namespace fedcarbon
