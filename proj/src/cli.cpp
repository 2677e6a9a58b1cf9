#include "fedcarbon/cli.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fedcarbon/carbon_cost_optimizer.hpp"
#include "fedcarbon/csv.hpp"
#include "fedcarbon/fl_simulator.hpp"
#include "fedcarbon/scenario_store.hpp"

namespace fedcarbon {

namespace fs = std::filesystem;

namespace {

struct DataOptions {
  std::string data_dir;
  std::string factors;
  std::string traces;
  std::string traces_meta;
  std::string hardware;

  Stores load() const {
    const fs::path dir = data_dir.empty() ? default_data_dir() : fs::path(data_dir);
    Stores s;
    s.factors = load_emission_factors(factors.empty() ? dir / "emission_factors.csv"
                                                      : fs::path(factors));
    s.hardware = load_hardware(hardware.empty() ? dir / "hardware.csv"
                                                : fs::path(hardware));
    const fs::path tr = traces.empty() ? dir / "traces.csv" : fs::path(traces);
    s.traces = traces_meta.empty() ? load_traces(tr)
                                   : load_traces(tr, fs::path(traces_meta));
    return s;
  }
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--data-dir", d.data_dir,
                  "Bundled data directory (default: $FEDCARBON_DATA_DIR)");
  cmd->add_option("--factors", d.factors, "Emission factor CSV");
  cmd->add_option("--traces", d.traces, "Trace CSV (meta read from sibling traces_meta.csv)");
  cmd->add_option("--traces-meta", d.traces_meta, "Trace meta CSV");
  cmd->add_option("--hardware", d.hardware, "Hardware profile CSV");
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "NA";
  return fmt::format("{:.{}f}", v, decimals);
}

std::string rounds_text(const RunResult& r) {
  return r.rounds_to_target ? std::to_string(*r.rounds_to_target) : "NA";
}

constexpr const char* kRunHeader =
    "scenario_id,mode,reached,rounds,wall_seconds,energy_wh,co2_g,max_accuracy";

std::string run_row(const RunResult& r) {
  return fmt::format("{},{},{},{},{},{},{},{}", r.scenario_id, to_string(r.mode),
                     r.reached ? "true" : "false", rounds_text(r),
                     fixed(r.total_wall_seconds, 2), fixed(r.total_energy_wh, 4),
                     fixed(r.total_co2_grams, 2), fixed(r.max_accuracy, 4));
}

void print_run_table(std::ostream& out, const RunResult& r) {
  out << "scenario=" << r.scenario_id << '\n'
      << "mode=" << to_string(r.mode) << '\n'
      << "reached=" << (r.reached ? "true" : "false") << '\n'
      << (r.mode == Mode::kFl ? "rounds=" : "epochs=") << rounds_text(r) << '\n'
      << "rounds_run=" << r.rounds_run << '\n'
      << "wall_seconds=" << fixed(r.total_wall_seconds, 2) << '\n'
      << "wall_hours=" << fixed(r.total_wall_seconds / 3600.0, 2) << '\n'
      << "energy_wh=" << fixed(r.total_energy_wh, 4) << '\n'
      << "co2_g=" << fixed(r.total_co2_grams, 2) << '\n'
      << "max_accuracy=" << fixed(r.max_accuracy, 4) << '\n';
}

void check_format(const std::string& format) {
  if (format != "csv" && format != "table") {
    throw ValidationError("--format must be csv or table");
  }
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  return out.parent_path() / (out.stem().string() + suffix + ".csv");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path.string());
  return f;
}

// -- estimate ---------------------------------------------------------------

struct EstimateArgs {
  DataOptions data;
  std::string scenario;
  std::string format = "table";
  std::string log;
  std::optional<int> round_cap;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  check_format(a.format);
  const Stores stores = a.data.load();
  const Scenario s = load_scenario(a.scenario, stores);
  RunOptions opts;
  opts.round_cap = a.round_cap;
  const RunResult r = run_scenario(s, stores, opts);
  if (a.format == "csv") {
    out << kRunHeader << '\n' << run_row(r) << '\n';
  } else {
    print_run_table(out, r);
  }
  if (!a.log.empty()) {
    auto f = open_out(a.log);
    write_run_csv(f, std::span<const RunResult>(&r, 1));
  }
  if (!r.reached) {
    err << "warning: target accuracy " << s.target_accuracy
        << " not reached; totals cover " << r.rounds_run << " rounds\n";
    return kExitTargetNotReached;
  }
  return kExitOk;
}

// -- compare ----------------------------------------------------------------

struct CompareArgs {
  DataOptions data;
  std::string fl;
  std::string centralized;
  std::string format = "table";
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  check_format(a.format);
  const Stores stores = a.data.load();
  const Scenario first = load_scenario(a.fl, stores);
  const Scenario second = load_scenario(a.centralized, stores);
  const Comparison c = compare(first, second, stores);
  if (a.format == "csv") {
    out << kRunHeader << '\n'
        << run_row(c.first) << '\n'
        << run_row(c.second) << '\n'
        << "\nco2_ratio,time_ratio\n"
        << fixed(c.co2_ratio, 4) << ',' << fixed(c.time_ratio, 4) << '\n';
  } else {
    out << fmt::format("{:<32} {:<12} {:>7} {:>7} {:>12} {:>12} {:>10}\n",
                       "scenario", "mode", "reached", "rounds", "wall_s",
                       "energy_wh", "co2_g");
    for (const RunResult* r : {&c.first, &c.second}) {
      out << fmt::format("{:<32} {:<12} {:>7} {:>7} {:>12} {:>12} {:>10}\n",
                         r->scenario_id, to_string(r->mode),
                         r->reached ? "true" : "false", rounds_text(*r),
                         fixed(r->total_wall_seconds, 2),
                         fixed(r->total_energy_wh, 4),
                         fixed(r->total_co2_grams, 2));
    }
    out << "co2_ratio=" << fixed(c.co2_ratio, 2) << '\n'
        << "time_ratio=" << fixed(c.time_ratio, 2) << '\n';
  }
  if (!c.first.reached || !c.second.reached) {
    err << "warning: at least one scenario did not reach its target\n";
    return kExitTargetNotReached;
  }
  return kExitOk;
}

// -- sweep ------------------------------------------------------------------

struct SweepArgs {
  DataOptions data;
  std::string grid;
  std::string base;
  std::string out;
  std::string scatter;
  std::string pareto;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream&) {
  const Stores stores = a.data.load();
  const SweepGrid grid = load_sweep_grid(a.grid);
  const Scenario base = load_scenario(a.base);
  const SweepOutcome result = sweep(grid, base, stores);

  const fs::path out_path(a.out);
  {
    auto f = open_out(out_path);
    write_sweep_csv(f, result.results);
  }
  const auto scatter = result.scatter();
  const auto front = pareto_front(scatter);
  {
    auto f = open_out(a.scatter.empty() ? sibling(out_path, "_scatter")
                                        : fs::path(a.scatter));
    write_scatter_csv(f, scatter);
  }
  {
    auto f = open_out(a.pareto.empty() ? sibling(out_path, "_pareto")
                                       : fs::path(a.pareto));
    write_scatter_csv(f, front);
  }

  const auto na_count = std::count_if(result.results.begin(), result.results.end(),
                                      [](const SweepResult& r) { return r.is_na(); });
  out << "column,label,rounds,co2_g,accuracy,carbon_cost\n";
  for (const auto& b : result.best_per_column) {
    out << fmt::format("{},{},{},{},{},{}\n",
                       b.point.target ? fmt::format("{}", *b.point.target) : "stable",
                       b.point.label(), *b.rounds, fixed(*b.co2_grams, 2),
                       fixed(*b.accuracy, 3), fixed(*b.carbon_cost, 2));
  }
  out << fmt::format("\nrows,na_rows,scatter_points,pareto_points\n{},{},{},{}\n",
                     result.results.size(), na_count, scatter.size(), front.size());
  return kExitOk;
}

// -- simulate ---------------------------------------------------------------

struct SimulateArgs {
  DataOptions data;
  std::string live_config;
  int seeds = 20;
  std::string partitioning = "scenario";
  std::string format = "csv";
  std::string out;
  std::optional<int> round_cap;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
  check_format(a.format);
  if (a.seeds < 1) throw ValidationError("--seeds must be >= 1");
  const Stores stores = a.data.load();
  const Scenario base = load_scenario(a.live_config, stores);
  if (base.mode != Mode::kFl || base.uses_trace()) {
    throw ValidationError("simulate needs an FL scenario with a live config");
  }
  std::vector<Partitioning> parts;
  if (a.partitioning == "scenario") {
    parts.push_back(base.fl->partitioning);
  } else if (a.partitioning == "both") {
    parts = {Partitioning::kIid, Partitioning::kNonIid};
  } else {
    parts.push_back(parse_partitioning(a.partitioning));
  }

  struct Row {
    Partitioning part;
    int seed;
    RunResult run;
  };
  std::vector<Row> rows;
  for (Partitioning p : parts) {
    Scenario s = base;
    s.fl->partitioning = p;
    s.id = base.id + "/" + to_string(p);
    for (int seed = 0; seed < a.seeds; ++seed) {
      RunOptions opts;
      opts.seed = static_cast<std::uint64_t>(seed);
      opts.round_cap = a.round_cap;
      RunResult r = run_fl(s, stores, opts);
      r.scenario_id = fmt::format("{}/seed={}", s.id, seed);
      rows.push_back(Row{p, seed, std::move(r)});
    }
  }

  if (!a.out.empty()) {
    std::vector<RunResult> runs;
    for (const auto& r : rows) runs.push_back(r.run);
    auto f = open_out(a.out);
    write_run_csv(f, runs);
  }

  const int cap = a.round_cap.value_or(base.fl->round_cap);
  const std::string sep = a.format == "csv" ? "," : "  ";
  out << fmt::format("partitioning{0}seed{0}reached{0}rounds{0}co2_g{0}final_accuracy\n", sep);
  for (const auto& r : rows) {
    const double final_acc =
        r.run.rounds.empty() ? r.run.max_accuracy : r.run.rounds.back().accuracy_after_round;
    out << fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}\n", sep, to_string(r.part),
                       r.seed, r.run.reached ? "true" : "false", rounds_text(r.run),
                       fixed(r.run.total_co2_grams, 2), fixed(final_acc, 4));
  }
  out << fmt::format("\npartitioning{0}seeds{0}reached{0}mean_rounds{0}stddev_rounds\n", sep);
  for (Partitioning p : parts) {
    std::vector<double> counts;
    int reached = 0;
    for (const auto& r : rows) {
      if (r.part != p) continue;
      // unreached runs count as the full round cap
      counts.push_back(r.run.rounds_to_target ? *r.run.rounds_to_target : cap);
      reached += r.run.reached ? 1 : 0;
    }
    const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) /
                        static_cast<double>(counts.size());
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    const double sd =
        counts.size() > 1 ? std::sqrt(var / static_cast<double>(counts.size() - 1)) : 0.0;
    out << fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}\n", sep, to_string(p),
                       counts.size(), reached, fixed(mean, 3), fixed(sd, 3));
  }
  const bool all_reached = std::all_of(rows.begin(), rows.end(),
                                       [](const Row& r) { return r.run.reached; });
  return all_reached ? kExitOk : kExitTargetNotReached;
}

// -- report -----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out;
};

std::vector<fs::path> expand_globs(const std::vector<std::string>& patterns) {
  std::set<fs::path> found;
  for (const auto& pattern : patterns) {
    glob_t g{};
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) found.insert(g.gl_pathv[i]);
    }
    globfree(&g);
  }
  return {found.begin(), found.end()};
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  const auto files = expand_globs(a.runs);
  if (files.empty()) throw ValidationError("no files match --runs");

  enum class Kind { kRun, kSweep };
  std::optional<Kind> kind;
  std::vector<std::string> header;
  std::vector<std::pair<std::string, CsvTable>> tables;
  for (const auto& f : files) {
    CsvTable t = read_csv_file(f);
    const Kind k = t.has_column("scenario_id") ? Kind::kRun
                   : t.has_column("carbon_cost") ? Kind::kSweep
                                                 : throw ValidationError(
                                                       f.string() + ": unknown CSV kind");
    if (kind && *kind != k) {
      throw ValidationError("cannot merge run logs with sweep outputs");
    }
    if (!header.empty() && t.header != header) {
      throw ValidationError(f.string() + ": header differs from earlier files");
    }
    kind = k;
    header = t.header;
    tables.emplace_back(f.string(), std::move(t));
  }

  // Identity of a row for de-duplication across files.
  const auto row_id = [&](const CsvTable& t, const CsvRow& row) {
    if (*kind == Kind::kRun) return row.fields[t.column("scenario_id")];
    return fmt::format("{}/{}/{}/{}", row.fields[t.column("partitioning")],
                       row.fields[t.column("local_epochs")],
                       row.fields[t.column("n")], row.fields[t.column("target")]);
  };

  std::map<std::string, std::string> owner;  // id -> first file
  std::set<std::string> warned;
  std::vector<std::pair<std::string, const CsvRow*>> merged;
  std::vector<const CsvTable*> merged_tables;
  for (const auto& [name, t] : tables) {
    for (const auto& row : t.rows) {
      const std::string id = row_id(t, row);
      const auto [it, inserted] = owner.emplace(id, name);
      if (!inserted && it->second != name) {
        if (warned.insert(id + "|" + name).second) {
          err << "warning: duplicate id '" << id << "' in " << name
              << " ignored (first seen in " << it->second << ")\n";
        }
        continue;
      }
      merged.emplace_back(name, &row);
      merged_tables.push_back(&t);
    }
  }

  const fs::path out_path(a.out);
  {
    auto f = open_out(out_path);
    f << "source_file";
    for (const auto& h : header) f << ',' << h;
    f << '\n';
    for (const auto& [name, row] : merged) {
      f << name;
      for (const auto& v : row->fields) f << ',' << v;
      f << '\n';
    }
  }

  // Scatter: CO2 vs accuracy.
  std::size_t points = 0;
  {
    auto f = open_out(sibling(out_path, "_scatter"));
    f << "co2_g,accuracy,label\n";
    if (*kind == Kind::kRun) {
      std::map<std::string, std::pair<double, double>> last;  // co2, max acc
      std::vector<std::string> order;
      for (std::size_t i = 0; i < merged.size(); ++i) {
        const CsvTable& t = *merged_tables[i];
        const CsvRow& row = *merged[i].second;
        const std::string id = row.fields[t.column("scenario_id")];
        const double co2 = parse_double(row.fields[t.column("cum_co2_g")], t.source);
        const double acc = parse_double(row.fields[t.column("accuracy")], t.source);
        auto [it, inserted] = last.emplace(id, std::make_pair(co2, acc));
        if (inserted) {
          order.push_back(id);
        } else {
          it->second.first = co2;
          it->second.second = std::max(it->second.second, acc);
        }
      }
      for (const auto& id : order) {
        f << fmt::format("{},{},{}\n", last[id].first, last[id].second, id);
        ++points;
      }
    } else {
      const bool has_stable = std::any_of(
          merged.begin(), merged.end(), [&](const auto& m) {
            const CsvTable& t = tables.front().second;
            return m.second->fields[t.column("target")] == "stable";
          });
      for (std::size_t i = 0; i < merged.size(); ++i) {
        const CsvTable& t = *merged_tables[i];
        const CsvRow& row = *merged[i].second;
        if (row.fields[t.column("carbon_cost")] == "NA") continue;
        if (has_stable && row.fields[t.column("target")] != "stable") continue;
        f << fmt::format("{},{},{}\n", row.fields[t.column("co2_g")],
                         row.fields[t.column("accuracy")], row_id(t, row));
        ++points;
      }
    }
  }
  out << "files,rows,scatter_points\n"
      << files.size() << ',' << merged.size() << ',' << points << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Carbon footprint estimator for federated and centralized training",
               "fedcarbon"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "CO2 of one scenario");
  add_data_options(estimate, est.data);
  estimate->add_option("--scenario", est.scenario, "Scenario JSON")->required();
  estimate->add_option("--format", est.format, "csv or table");
  estimate->add_option("--log", est.log, "Write per-round CSV here");
  estimate->add_option("--round-cap", est.round_cap, "Override the round cap");

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "FL vs centralized CO2");
  add_data_options(compare_cmd, cmp.data);
  compare_cmd->add_option("--fl", cmp.fl, "First (usually FL) scenario")->required();
  compare_cmd->add_option("--centralized", cmp.centralized,
                          "Second (usually centralized) scenario")
      ->required();
  compare_cmd->add_option("--format", cmp.format, "csv or table");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Carbon Cost grid sweep");
  add_data_options(sweep_cmd, sw.data);
  sweep_cmd->add_option("--grid", sw.grid, "Sweep grid JSON")->required();
  sweep_cmd->add_option("--base", sw.base, "Base FL scenario JSON")->required();
  sweep_cmd->add_option("--out", sw.out, "Sweep CSV output")->required();
  sweep_cmd->add_option("--scatter", sw.scatter, "Scatter CSV (default <out>_scatter.csv)");
  sweep_cmd->add_option("--pareto", sw.pareto, "Pareto CSV (default <out>_pareto.csv)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Live FedAVG runs across seeds");
  add_data_options(simulate, sim.data);
  simulate->add_option("--live-config", sim.live_config, "FL scenario with a live config")
      ->required();
  simulate->add_option("--seeds", sim.seeds, "Number of seeds (0..K-1)");
  simulate->add_option("--partitioning", sim.partitioning,
                       "scenario, IID, NON_IID or both");
  simulate->add_option("--format", sim.format, "csv or table");
  simulate->add_option("--out", sim.out, "Write per-round CSV of every run here");
  simulate->add_option("--round-cap", sim.round_cap, "Override the round cap");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Merge run or sweep CSVs");
  report->add_option("--runs", rep.runs, "Glob(s) of CSV files")->required();
  report->add_option("--out", rep.out, "Merged CSV output")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalidInput;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(est, out, err);
    if (compare_cmd->parsed()) return cmd_compare(cmp, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sw, out, err);
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (report->parsed()) return cmd_report(rep, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const ResolutionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace fedcarbon
