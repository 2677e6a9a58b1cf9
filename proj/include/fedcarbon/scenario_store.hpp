#pragma once

// Data model and file ingestion: emission factors, hardware profiles,
// learning traces and scenarios. All loaders validate eagerly and return
// immutable values.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fedcarbon/csv.hpp"
#include "fedcarbon/dataset.hpp"
#include "fedcarbon/energy_carbon.hpp"
#include "fedcarbon/fedavg_engine.hpp"

namespace fedcarbon {

enum class Provenance { kPaper, kDerived };
enum class Partitioning { kIid, kNonIid };
enum class Mode { kFl, kCentralized };

std::string to_string(Provenance p);
std::string to_string(Partitioning p);
std::string to_string(Mode m);
Partitioning parse_partitioning(const std::string& text);

// ---------------------------------------------------------------------------
// Emission factors

class EmissionFactorTable {
 public:
  struct Entry {
    EmissionFactor factor;
    Provenance provenance = Provenance::kPaper;
  };

  /// Throws ValidationError on a duplicate region.
  void add(EmissionFactor factor, Provenance provenance);
  const EmissionFactor& at(const std::string& region) const;
  bool contains(const std::string& region) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }

  friend bool operator==(const EmissionFactorTable& a,
                         const EmissionFactorTable& b);

 private:
  std::map<std::string, Entry> entries_;
};

/// Schema: `region,kg_co2_per_kwh[,provenance]`.
EmissionFactorTable parse_emission_factors(std::istream& in,
                                           const std::string& source);
EmissionFactorTable load_emission_factors(const std::filesystem::path& path);
void write_emission_factors(std::ostream& out, const EmissionFactorTable& table);

// ---------------------------------------------------------------------------
// Hardware

struct HardwareProfile {
  std::string name;
  PowerDraw power;
  std::optional<PowerDraw> tdp;
  std::optional<Pue> pue;  // present for data-center hardware only
  Provenance provenance = Provenance::kPaper;

  bool centralized_capable() const { return pue.has_value(); }
  void validate() const;
};

class HardwareCatalog {
 public:
  void add(HardwareProfile profile);
  const HardwareProfile& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::map<std::string, HardwareProfile>& profiles() const {
    return profiles_;
  }

 private:
  std::map<std::string, HardwareProfile> profiles_;
};

/// Schema: `name,power_watts,tdp_watts,pue,provenance` (tdp/pue may be empty).
HardwareCatalog parse_hardware(std::istream& in, const std::string& source);
HardwareCatalog load_hardware(const std::filesystem::path& path);
void write_hardware(std::ostream& out, const HardwareCatalog& catalog);

// ---------------------------------------------------------------------------
// Learning traces

struct TracePoint {
  int round = 0;
  double test_accuracy = 0.0;
  Provenance provenance = Provenance::kPaper;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct LearningTrace {
  std::string setup_id;
  std::vector<TracePoint> points;
  Duration round_time;
  int clients_per_round = 1;
  int local_epochs = 1;
  Partitioning partitioning = Partitioning::kIid;

  /// Rounds strictly increasing, accuracies in [0, 1], at least one point.
  void validate() const;

  /// Step-wise: the last recorded accuracy at or before `round`, 0.0 before
  /// the first recorded round.
  double accuracy_at(int round) const;

  /// First recorded round whose accuracy >= threshold; 0 when threshold <= 0.
  std::optional<int> rounds_to_threshold(double threshold) const;

  /// Maximum recorded accuracy and the first round that reaches it.
  TracePoint stable_point() const;
};

class TraceStore {
 public:
  void add(LearningTrace trace);
  const LearningTrace& at(const std::string& setup_id) const;
  bool contains(const std::string& setup_id) const;
  const std::map<std::string, LearningTrace>& traces() const { return traces_; }

  /// Traces whose id starts with `prefix` and whose meta matches.
  std::vector<const LearningTrace*> find(const std::string& prefix,
                                         int clients_per_round,
                                         int local_epochs,
                                         Partitioning partitioning) const;

 private:
  std::map<std::string, LearningTrace> traces_;
};

/// traces.csv: `setup_id,round,test_accuracy[,provenance]`
/// traces_meta.csv: `setup_id,round_time_s,clients_per_round,local_epochs,partitioning`
TraceStore parse_traces(std::istream& points, const std::string& points_source,
                        std::istream& meta, const std::string& meta_source);
TraceStore load_traces(const std::filesystem::path& traces_csv,
                       const std::filesystem::path& meta_csv);
/// Looks for traces_meta.csv next to traces_csv.
TraceStore load_traces(const std::filesystem::path& traces_csv);
void write_traces(std::ostream& points, std::ostream& meta,
                  const TraceStore& store);

// ---------------------------------------------------------------------------
// Scenarios

struct LiveConfig {
  SyntheticSpec data;
  std::size_t hidden_dim = 16;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

struct TraceSource {
  std::string setup_id;
};

using AccuracySource = std::variant<TraceSource, LiveConfig>;

struct FlParams {
  int total_clients = 10;
  int clients_per_round = 5;
  int local_epochs = 1;
  Partitioning partitioning = Partitioning::kIid;
  /// Either given directly or as per-epoch time x local_epochs; when both are
  /// absent the trace's recorded round time is used.
  std::optional<double> round_time_s;
  std::optional<double> epoch_time_s;
  int round_cap = 500;
};

struct CentralizedParams {
  double epoch_time_s = 0.0;
  std::optional<Pue> pue;  // overrides the hardware default
  double cpu_watts = 0.0;
  int max_epochs = 500;
};

struct Scenario {
  std::string id;
  Mode mode = Mode::kFl;
  std::string hardware;
  std::string region;
  double target_accuracy = 0.0;
  double other_hardware_factor = 1.0;
  std::optional<FlParams> fl;
  std::optional<CentralizedParams> centralized;
  AccuracySource source;

  bool uses_trace() const { return std::holds_alternative<TraceSource>(source); }
  const std::string& trace_id() const {
    return std::get<TraceSource>(source).setup_id;
  }
};

struct Stores {
  EmissionFactorTable factors;
  HardwareCatalog hardware;
  TraceStore traces;
};

/// Directory with emission_factors.csv, hardware.csv, traces.csv and
/// traces_meta.csv.
Stores load_stores(const std::filesystem::path& data_dir);

/// $FEDCARBON_DATA_DIR if set, otherwise the data directory of the source
/// tree this binary was built from.
std::filesystem::path default_data_dir();

/// Structural checks only (ranges, mode/param consistency).
void validate_scenario(const Scenario& scenario);
/// Structural checks plus reference resolution against the stores.
void resolve_scenario(const Scenario& scenario, const Stores& stores);

Scenario parse_scenario(const std::string& json_text, const std::string& source);
Scenario load_scenario(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path, const Stores& stores);
std::string scenario_to_json(const Scenario& scenario);

/// Device power for the scenario: hardware draw (+ CPU add-on for centralized
/// runs) times other_hardware_factor.
PowerDraw effective_power(const Scenario& scenario, const Stores& stores);
Pue effective_pue(const Scenario& scenario, const Stores& stores);
/// Round time for FL scenarios, falling back to the trace meta.
Duration effective_round_time(const Scenario& scenario, const Stores& stores);

}  // namespace fedcarbon
