#pragma once

// Joint CO2 / accuracy objective and exhaustive sweeps over FL setups.
//
// F(r, n, t) = r * c * n * (t * e + overhead) grams
// G(w)       = test accuracy as a fraction
// Carbon Cost = F / G (grams per unit of accuracy, lower is better)

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedcarbon/energy_carbon.hpp"
#include "fedcarbon/scenario_store.hpp"

namespace fedcarbon {

/// `comm_overhead` is extra energy per round per client; zero reduces the
/// objective exactly to co2_fl.
double objective_f(int rounds, int clients, Duration round_time,
                   PowerDraw client_power, const EmissionFactor& factor,
                   Energy comm_overhead = Energy(0.0));

/// co2_grams / accuracy. Throws std::invalid_argument unless accuracy is in
/// (0, 1].
double carbon_cost(double co2_grams, double accuracy);

struct SweepGrid {
  std::vector<int> clients_per_round;
  std::vector<int> local_epochs;
  std::vector<Partitioning> partitioning;
  std::vector<double> accuracy_targets;
  bool stable_accuracy_mode = false;
  /// Traces are looked up by meta under this setup_id prefix.
  std::string trace_prefix;
  Energy comm_overhead;

  void validate() const;
};

SweepGrid parse_sweep_grid(const std::string& json_text, const std::string& source);
SweepGrid load_sweep_grid(const std::filesystem::path& path);

struct SweepPoint {
  int clients_per_round = 0;
  int local_epochs = 0;
  Partitioning partitioning = Partitioning::kIid;
  /// Empty for stable-accuracy rows.
  std::optional<double> target;

  std::string label() const;
};

struct SweepResult {
  SweepPoint point;
  std::optional<int> rounds;
  std::optional<double> co2_grams;
  std::optional<double> accuracy;
  std::optional<double> carbon_cost;
  std::string na_reason;  // empty when the point produced numbers

  bool is_na() const { return !carbon_cost.has_value(); }
};

struct SweepOutcome {
  /// Sorted by carbon cost ascending, NA rows last.
  std::vector<SweepResult> results;
  /// Lowest carbon cost per column: one entry per fixed target plus one for
  /// the stable column when enabled. Columns with no numeric row are absent.
  std::vector<SweepResult> best_per_column;

  /// Points for the CO2-vs-accuracy scatter: stable rows when stable mode is
  /// on, otherwise every numeric row.
  std::vector<SweepResult> scatter() const;
};

/// Runs every grid point. The base scenario (FL mode) supplies hardware,
/// region, total clients, round cap and either a live config or nothing
/// (traces are then resolved per point via the grid's prefix).
SweepOutcome sweep(const SweepGrid& grid, const Scenario& base,
                   const Stores& stores);

/// Points not dominated in (lower CO2, higher accuracy), ordered by CO2 then
/// label. NA rows are ignored.
std::vector<SweepResult> pareto_front(std::span<const SweepResult> results);

/// `n,local_epochs,partitioning,target,rounds,co2_g,accuracy,carbon_cost,na_reason`
void write_sweep_csv(std::ostream& out, std::span<const SweepResult> results);
/// `co2_g,accuracy,label`
void write_scatter_csv(std::ostream& out, std::span<const SweepResult> results);

}  // namespace fedcarbon
