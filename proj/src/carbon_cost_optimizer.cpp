#include "fedcarbon/carbon_cost_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "fedcarbon/fl_simulator.hpp"

namespace fedcarbon {

using json = nlohmann::json;

double objective_f(int rounds, int clients, Duration round_time,
                   PowerDraw client_power, const EmissionFactor& factor,
                   Energy comm_overhead) {
  if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
  if (clients < 1) throw std::invalid_argument("clients must be >= 1");
  const double per_client =
      Energy::of(round_time, client_power).watt_hours() +
      comm_overhead.watt_hours();
  return rounds * factor.kg_co2_per_kwh() * (clients * per_client);
}

double carbon_cost(double co2_grams, double accuracy) {
  if (!(accuracy > 0.0 && accuracy <= 1.0)) {
    throw std::invalid_argument("carbon cost needs accuracy in (0, 1]");
  }
  if (!(co2_grams >= 0.0) || !std::isfinite(co2_grams)) {
    throw std::invalid_argument("CO2 must be finite and non-negative");
  }
  return co2_grams / accuracy;
}

void SweepGrid::validate() const {
  if (clients_per_round.empty() || local_epochs.empty() || partitioning.empty()) {
    throw ValidationError("sweep grid lists must be non-empty");
  }
  if (accuracy_targets.empty() && !stable_accuracy_mode) {
    throw ValidationError("sweep grid needs accuracy targets or stable mode");
  }
  for (int n : clients_per_round) {
    if (n < 1) throw ValidationError("clients_per_round entries must be >= 1");
  }
  for (int e : local_epochs) {
    if (e < 1) throw ValidationError("local_epochs entries must be >= 1");
  }
  for (double t : accuracy_targets) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw ValidationError("accuracy targets must be in (0, 1]");
    }
  }
}

SweepGrid parse_sweep_grid(const std::string& json_text, const std::string& source) {
  SweepGrid grid;
  try {
    const json doc = json::parse(json_text);
    if (!doc.is_object()) throw ParseError(source + ": expected an object");
    static const std::vector<std::string> known = {
        "clients_per_round", "local_epochs",  "partitioning",
        "accuracy_targets",  "stable_accuracy_mode", "trace_prefix",
        "comm_overhead_wh"};
    for (const auto& [key, value] : doc.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ParseError(source + ": unknown key '" + key + "'");
      }
    }
    grid.clients_per_round = doc.at("clients_per_round").get<std::vector<int>>();
    grid.local_epochs = doc.at("local_epochs").get<std::vector<int>>();
    for (const auto& p : doc.at("partitioning")) {
      grid.partitioning.push_back(parse_partitioning(p.get<std::string>()));
    }
    if (doc.contains("accuracy_targets")) {
      grid.accuracy_targets = doc.at("accuracy_targets").get<std::vector<double>>();
    }
    grid.stable_accuracy_mode = doc.value("stable_accuracy_mode", false);
    grid.trace_prefix = doc.value("trace_prefix", std::string());
    grid.comm_overhead = Energy(doc.value("comm_overhead_wh", 0.0));
  } catch (const json::exception& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(source + ": " + e.what());
  }
  grid.validate();
  return grid;
}

SweepGrid load_sweep_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep_grid(buf.str(), path.string());
}

std::string SweepPoint::label() const {
  return fmt::format("{}/{}ep/n={}/{}", to_string(partitioning), local_epochs,
                     clients_per_round,
                     target ? fmt::format("target={}", *target) : "stable");
}

namespace {

SweepResult na(SweepPoint point, std::string reason) {
  SweepResult r;
  r.point = std::move(point);
  r.na_reason = std::move(reason);
  return r;
}

struct PreparedSetup {
  Scenario scenario;
  std::string na_reason;
};

PreparedSetup prepare(const SweepGrid& grid, const Scenario& base, int n,
                      int epochs, Partitioning part, const Stores& stores) {
  PreparedSetup out{base, {}};
  Scenario& s = out.scenario;
  s.id = fmt::format("{}/{}/{}ep/n={}", base.id, to_string(part), epochs, n);
  s.fl->clients_per_round = n;
  s.fl->local_epochs = epochs;
  s.fl->partitioning = part;
  s.fl->round_time_s.reset();
  if (n > s.fl->total_clients) {
    out.na_reason = "clients_per_round exceeds total_clients";
    return out;
  }
  if (s.uses_trace()) {
    const auto found = stores.traces.find(grid.trace_prefix, n, epochs, part);
    if (found.empty()) {
      out.na_reason = "no trace for this setup";
    } else if (found.size() > 1) {
      out.na_reason = "several traces match this setup";
    } else {
      s.source = TraceSource{found.front()->setup_id};
    }
  }
  return out;
}

SweepResult evaluate_target(const PreparedSetup& setup, SweepPoint point,
                            const SweepGrid& grid, const Stores& stores) {
  Scenario s = setup.scenario;
  s.target_accuracy = *point.target;
  const RunResult run = run_fl(s, stores);
  if (!run.reached) {
    return na(std::move(point), "target not reached within round cap");
  }
  SweepResult r;
  r.point = std::move(point);
  r.rounds = *run.rounds_to_target;
  r.accuracy = run.rounds.empty() ? run.max_accuracy
                                  : run.rounds.back().accuracy_after_round;
  r.co2_grams = objective_f(*r.rounds, s.fl->clients_per_round,
                            effective_round_time(s, stores),
                            effective_power(s, stores),
                            stores.factors.at(s.region), grid.comm_overhead);
  if (!(*r.accuracy > 0.0)) {
    return na(std::move(r.point), "zero accuracy");
  }
  r.carbon_cost = carbon_cost(*r.co2_grams, *r.accuracy);
  return r;
}

SweepResult evaluate_stable(const PreparedSetup& setup, SweepPoint point,
                            const SweepGrid& grid, const Stores& stores) {
  Scenario s = setup.scenario;
  s.target_accuracy = 1.0;
  const RunResult run = run_fl(s, stores);
  int best_round = 0;
  double best = run.max_accuracy;
  if (!run.rounds.empty()) {
    best = -1.0;
    for (const auto& log : run.rounds) {
      if (log.accuracy_after_round > best) {
        best = log.accuracy_after_round;
        best_round = log.round_index;
      }
    }
  }
  if (!(best > 0.0)) return na(std::move(point), "zero accuracy");
  SweepResult r;
  r.point = std::move(point);
  r.rounds = best_round;
  r.accuracy = best;
  r.co2_grams = objective_f(best_round, s.fl->clients_per_round,
                            effective_round_time(s, stores),
                            effective_power(s, stores),
                            stores.factors.at(s.region), grid.comm_overhead);
  r.carbon_cost = carbon_cost(*r.co2_grams, best);
  return r;
}

bool by_cost(const SweepResult& a, const SweepResult& b) {
  if (a.is_na() != b.is_na()) return !a.is_na();
  if (!a.is_na() && *a.carbon_cost != *b.carbon_cost) {
    return *a.carbon_cost < *b.carbon_cost;
  }
  return a.point.label() < b.point.label();
}

}  // namespace

SweepOutcome sweep(const SweepGrid& grid, const Scenario& base,
                   const Stores& stores) {
  grid.validate();
  if (base.mode != Mode::kFl || !base.fl) {
    throw ValidationError("sweep base scenario must be in FL mode");
  }
  validate_scenario(base);

  SweepOutcome out;
  for (Partitioning part : grid.partitioning) {
    for (int epochs : grid.local_epochs) {
      for (int n : grid.clients_per_round) {
        const PreparedSetup setup = prepare(grid, base, n, epochs, part, stores);
        std::vector<SweepPoint> points;
        for (double t : grid.accuracy_targets) {
          points.push_back(SweepPoint{n, epochs, part, t});
        }
        if (grid.stable_accuracy_mode) {
          points.push_back(SweepPoint{n, epochs, part, std::nullopt});
        }
        for (auto& p : points) {
          if (!setup.na_reason.empty()) {
            out.results.push_back(na(p, setup.na_reason));
            continue;
          }
          try {
            out.results.push_back(
                p.target ? evaluate_target(setup, p, grid, stores)
                         : evaluate_stable(setup, p, grid, stores));
          } catch (const std::exception& e) {
            out.results.push_back(na(p, e.what()));
          }
        }
      }
    }
  }
  std::sort(out.results.begin(), out.results.end(), by_cost);

  std::vector<std::optional<double>> columns(grid.accuracy_targets.begin(),
                                             grid.accuracy_targets.end());
  if (grid.stable_accuracy_mode) columns.push_back(std::nullopt);
  for (const auto& col : columns) {
    // results are sorted, so the first numeric match is the column's best
    const auto it = std::find_if(out.results.begin(), out.results.end(),
                                 [&](const SweepResult& r) {
                                   return !r.is_na() && r.point.target == col;
                                 });
    if (it != out.results.end()) out.best_per_column.push_back(*it);
  }
  return out;
}

std::vector<SweepResult> SweepOutcome::scatter() const {
  const bool stable = std::any_of(results.begin(), results.end(),
                                  [](const SweepResult& r) {
                                    return !r.point.target.has_value();
                                  });
  std::vector<SweepResult> out;
  for (const auto& r : results) {
    if (r.is_na()) continue;
    if (stable && r.point.target) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<SweepResult> pareto_front(std::span<const SweepResult> results) {
  std::vector<SweepResult> pts;
  for (const auto& r : results) {
    if (!r.is_na()) pts.push_back(r);
  }
  std::sort(pts.begin(), pts.end(), [](const SweepResult& a, const SweepResult& b) {
    if (*a.co2_grams != *b.co2_grams) return *a.co2_grams < *b.co2_grams;
    if (*a.accuracy != *b.accuracy) return *a.accuracy > *b.accuracy;
    return a.point.label() < b.point.label();
  });
  // Walking in CO2 order, a point survives if no cheaper-or-equal point has
  // at least its accuracy (exact duplicates survive together).
  std::vector<SweepResult> front;
  for (const auto& p : pts) {
    bool dominated = false;
    for (const auto& q : front) {
      const bool no_worse = *q.co2_grams <= *p.co2_grams && *q.accuracy >= *p.accuracy;
      const bool better = *q.co2_grams < *p.co2_grams || *q.accuracy > *p.accuracy;
      if (no_worse && better) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(p);
  }
  return front;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepResult> results) {
  out << "n,local_epochs,partitioning,target,rounds,co2_g,accuracy,carbon_cost,"
         "na_reason\n";
  const auto opt = [](const auto& v) {
    return v ? fmt::format("{}", *v) : std::string("NA");
  };
  for (const auto& r : results) {
    std::string reason = r.na_reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.point.clients_per_round,
                       r.point.local_epochs, to_string(r.point.partitioning),
                       r.point.target ? fmt::format("{}", *r.point.target)
                                      : std::string("stable"),
                       opt(r.rounds), opt(r.co2_grams), opt(r.accuracy),
                       opt(r.carbon_cost), reason);
  }
}

void write_scatter_csv(std::ostream& out, std::span<const SweepResult> results) {
  out << "co2_g,accuracy,label\n";
  for (const auto& r : results) {
    if (r.is_na()) continue;
    out << fmt::format("{},{},{}\n", *r.co2_grams, *r.accuracy, r.point.label());
  }
}

}  // namespace fedcarbon
