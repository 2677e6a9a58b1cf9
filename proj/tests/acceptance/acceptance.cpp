// Acceptance gate. Prints one PASS/FAIL line per criterion followed by the
// per-cell numbers that decided it. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fedcarbon/carbon_cost_optimizer.hpp"
#include "fedcarbon/cli.hpp"
#include "fedcarbon/csv.hpp"
#include "fedcarbon/data_partitioner.hpp"
#include "fedcarbon/energy_carbon.hpp"
#include "fedcarbon/fedavg_engine.hpp"
#include "fedcarbon/fl_simulator.hpp"
#include "fedcarbon/rng.hpp"
#include "fedcarbon/scenario_store.hpp"

namespace fs = std::filesystem;
using namespace fedcarbon;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects sub-check outcomes for one criterion.
class Criterion {
 public:
  Criterion(int number, std::string title)
      : number_(number), title_(std::move(title)) {}

  void check(bool ok, const std::string& detail) {
    if (!ok) ++failed_;
    ++total_;
    details_.push_back(fmt::format("    [{}] {}", ok ? "ok" : "MISS", detail));
  }

  bool report() const {
    const bool pass = failed_ == 0 && total_ > 0;
    fmt::print("{} criterion {}: {} ({}/{} checks)\n", pass ? "PASS" : "FAIL",
               number_, title_, total_ - failed_, total_);
    for (const auto& d : details_) fmt::print("{}\n", d);
    std::fflush(stdout);
    return pass;
  }

 private:
  int number_;
  std::string title_;
  int total_ = 0;
  int failed_ = 0;
  std::vector<std::string> details_;
};

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

double rel(double computed, double expected) {
  return (computed - expected) / expected;
}

// The published numbers are rounded to `decimals`; compare the computed value
// at the same precision, then apply the relative tolerance.
void check_rounded(Criterion& c, const std::string& name, double computed,
                   double printed, int decimals, double tol) {
  const double shown = round_to(computed, decimals);
  const bool ok = std::abs(shown - printed) <= tol * std::abs(printed) + 1e-12;
  c.check(ok, fmt::format("{}: computed {:.4f} (shown {:.{}f}) vs {:.{}f}, raw {:+.2f}%, "
                          "tol {:.1f}%",
                          name, computed, shown, decimals, printed, decimals,
                          100.0 * rel(computed, printed), 100.0 * tol));
}

fs::path data_dir() { return default_data_dir(); }

RunResult run_bundled(const std::string& id, const Stores& stores) {
  const Scenario s = load_scenario(data_dir() / "scenarios" / (id + ".json"), stores);
  return run_scenario(s, stores);
}

const std::vector<std::string> kRegions = {"us", "cn", "fr"};
const std::map<std::string, std::string> kRegionName = {
    {"us", "US"}, {"cn", "CN"}, {"fr", "FR"}};

// ---------------------------------------------------------------------------

bool criterion_1() {
  Criterion c(1, "worked example, CIFAR10 IID 5 epochs in China");
  const FlRoundShape shape{9, 5, Duration(191.0), PowerDraw(5.0)};
  const EmissionFactor china("CN", 0.9746);
  const double g = co2_fl(shape, china);
  c.check(std::abs(g - 11.63) <= 0.01,
          fmt::format("co2_fl(9, 0.9746, 5, 191 s, 5 W) = {:.4f} g vs 11.63 +/- 0.01", g));

  constexpr int kReps = 10000;
  volatile double sink = 0.0;
  const auto t0 = Clock::now();
  for (int i = 0; i < kReps; ++i) sink = sink + co2_fl(shape, china);
  const double per_call = seconds_since(t0) / kReps;
  c.check(per_call < 1e-3, fmt::format("runtime {:.3g} s per call (< 1 ms)", per_call));
  return c.report();
}

bool criterion_2(const Stores& stores) {
  Criterion c(2, "CIFAR10 FL cells from recorded round counts, +/-3%");
  struct Cell {
    std::string setup;
    int rounds;
    std::map<std::string, double> printed;
  };
  const std::vector<Cell> cells = {
      {"cifar10_fl_iid_1ep", 16, {{"us", 2.3}, {"cn", 4.1}, {"fr", 0.3}}},
      {"cifar10_fl_iid_5ep", 9, {{"us", 6.5}, {"cn", 11.6}, {"fr", 0.9}}},
      {"cifar10_fl_noniid_1ep", 75, {{"us", 10.9}, {"cn", 19.4}, {"fr", 1.6}}},
      {"cifar10_fl_noniid_5ep", 11, {{"us", 8.9}, {"cn", 14.2}, {"fr", 1.1}}},
  };
  for (const auto& cell : cells) {
    for (const auto& r : kRegions) {
      const RunResult run = run_bundled(cell.setup + "_" + r, stores);
      c.check(run.rounds_to_target == cell.rounds,
              fmt::format("{} {} rounds {} vs {}", cell.setup, kRegionName.at(r),
                          run.rounds_to_target.value_or(-1), cell.rounds));
      check_rounded(c, cell.setup + " " + kRegionName.at(r), run.total_co2_grams,
                    cell.printed.at(r), 1, 0.03);
    }
  }
  return c.report();
}

bool criterion_3(const Stores& stores) {
  Criterion c(3, "FashionMNIST FL cells, +/-0.1 g");
  struct Cell {
    std::string setup;
    int rounds;
    std::map<std::string, double> printed;
  };
  const std::vector<Cell> cells = {
      {"fashionmnist_fl_iid", 26, {{"us", 0.5}, {"cn", 0.9}, {"fr", 0.1}}},
      {"fashionmnist_fl_noniid", 50, {{"us", 1.0}, {"cn", 1.7}, {"fr", 0.1}}},
  };
  for (const auto& cell : cells) {
    for (const auto& r : kRegions) {
      const RunResult run = run_bundled(cell.setup + "_" + r, stores);
      const double want = cell.printed.at(r);
      c.check(run.rounds_to_target == cell.rounds &&
                  std::abs(run.total_co2_grams - want) <= 0.1,
              fmt::format("{} {}: {} rounds, {:.4f} g vs {:.1f} g", cell.setup,
                          kRegionName.at(r), run.rounds_to_target.value_or(-1),
                          run.total_co2_grams, want));
    }
  }
  return c.report();
}

bool criterion_4(const Stores& stores) {
  Criterion c(4, "ImageNet FL cells");
  const std::map<std::string, std::pair<double, double>> printed = {
      {"cn", {1949.0, 0.005}}, {"us", {1094.0, 0.05}}, {"fr", {158.0, 0.05}}};
  for (const auto& r : kRegions) {
    const RunResult run = run_bundled("imagenet_fl_iid_3ep_" + r, stores);
    const auto [want, tol] = printed.at(r);
    const double e = rel(run.total_co2_grams, want);
    c.check(run.rounds_to_target == 25 && std::abs(e) <= tol,
            fmt::format("{}: {} rounds, {:.2f} g vs {:.0f} g, {:+.2f}% (tol {:.1f}%)",
                        kRegionName.at(r), run.rounds_to_target.value_or(-1),
                        run.total_co2_grams, want, 100.0 * e, 100.0 * tol));
  }
  return c.report();
}

// Printed sweep table: rounds/CO2/cost at the 60% target (NA when absent),
// then stable accuracy (%), its round, CO2 and cost.
struct SweepRow {
  int n;
  std::optional<double> co2_60;
  std::optional<double> cost_60;
  double stable_co2;
  double stable_cost;
};

const std::map<std::string, std::vector<SweepRow>>& printed_sweep() {
  static const std::map<std::string, std::vector<SweepRow>> rows = {
      {"IID/5ep",
       {{1, 2.03, 3.39, 36.28, 52.89}, {2, 4.06, 6.77, 23.80, 36.06},
        {3, 3.92, 6.53, 21.77, 33.34}, {4, 5.22, 8.71, 23.22, 35.18},
        {5, 6.53, 10.88, 25.40, 39.07}, {6, 6.97, 11.61, 15.67, 24.30},
        {7, 8.13, 13.55, 15.24, 23.63}, {8, 8.13, 13.55, 18.58, 28.80},
        {9, 10.45, 17.42, 20.90, 32.40}, {10, 11.61, 19.35, 26.12, 40.50}}},
      {"IID/1ep",
       {{1, 0.81, 1.35, 9.58, 13.64}, {2, 1.39, 2.32, 11.61, 17.33},
        {3, 1.65, 2.76, 8.71, 13.15}, {4, 1.86, 3.10, 8.13, 12.70},
        {5, 2.32, 3.87, 10.59, 16.48}, {6, 2.79, 4.64, 11.84, 18.59},
        {7, 3.45, 5.76, 12.39, 19.77}, {8, 3.72, 6.19, 12.77, 20.27},
        {9, 3.66, 6.10, 10.45, 16.59}, {10, 4.93, 8.22, 13.06, 20.90}}},
      {"NON_IID/5ep",
       {{1, 6.24, 10.40, 36.28, 55.39}, {2, 4.64, 7.74, 55.15, 84.46},
        {3, 6.53, 10.88, 39.19, 60.57}, {4, 6.97, 11.61, 29.03, 45.57},
        {5, 7.98, 13.30, 29.03, 45.71}, {6, 10.45, 17.42, 34.83, 54.83},
        {7, 10.16, 16.93, 40.64, 64.00}, {8, 12.77, 21.29, 22.06, 35.58},
        {9, 13.06, 21.77, 22.21, 35.81}, {10, 13.06, 21.77, 20.32, 32.61}}},
      {"NON_IID/1ep",
       {{1, 7.26, 12.09, 13.06, 19.55}, {2, 7.84, 13.06, 19.16, 29.70},
        {3, 7.84, 13.06, 26.12, 41.60}, {4, 8.71, 14.51, 18.58, 29.58},
        {5, 10.88, 18.14, 20.32, 33.31}, {6, 13.06, 21.77, 22.64, 36.81},
        {7, 12.19, 20.32, 12.19, 20.32}, {8, std::nullopt, std::nullopt, 13.93, 23.61},
        {9, std::nullopt, std::nullopt, 13.06, 22.52},
        {10, std::nullopt, std::nullopt, 17.42, 29.62}}},
  };
  return rows;
}

std::string sweep_key(const SweepPoint& p) {
  return fmt::format("{}/{}/{}/{}", to_string(p.partitioning), p.local_epochs,
                     p.clients_per_round, p.target ? "60" : "stable");
}

bool criterion_5(const Stores& stores) {
  Criterion c(5, "carbon cost sweep, every cell +/-2%, NA cells preserved");
  const SweepGrid grid = load_sweep_grid(data_dir() / "grids" / "sweep_grid.json");
  const Scenario base = load_scenario(data_dir() / "scenarios" / "cifar10_sweep_us.json");

  const auto t0 = Clock::now();
  const SweepOutcome outcome = sweep(grid, base, stores);
  const double elapsed = seconds_since(t0);

  std::map<std::string, const SweepResult*> by_key;
  for (const auto& r : outcome.results) by_key[sweep_key(r.point)] = &r;

  const auto cell = [&](const std::string& name, std::optional<double> got,
                        double want) {
    if (!got) {
      c.check(false, fmt::format("{}: NA vs {:.2f}", name, want));
      return;
    }
    const double e = rel(*got, want);
    c.check(std::abs(e) <= 0.02,
            fmt::format("{}: {:.4f} vs {:.2f}, {:+.2f}%", name, *got, want, 100.0 * e));
  };

  for (const auto& [table, rows] : printed_sweep()) {
    const auto slash = table.find('/');
    const std::string part = table.substr(0, slash);
    const std::string epochs = table.substr(slash + 1, table.size() - slash - 3);
    for (const auto& row : rows) {
      const std::string stem = fmt::format("{}/{}/{}", part, epochs, row.n);
      const auto it60 = by_key.find(stem + "/60");
      const auto its = by_key.find(stem + "/stable");
      if (it60 == by_key.end() || its == by_key.end()) {
        c.check(false, stem + ": missing from sweep output");
        continue;
      }
      const SweepResult& r60 = *it60->second;
      const std::string label = fmt::format("{} n={}", table, row.n);
      if (!row.co2_60) {
        c.check(r60.is_na(), fmt::format("{} 60%: {} vs NA", label,
                                         r60.is_na() ? "NA" : "numeric"));
      } else {
        cell(label + " 60% co2", r60.co2_grams, *row.co2_60);
        cell(label + " 60% cost", r60.carbon_cost, *row.cost_60);
      }
      cell(label + " stable co2", its->second->co2_grams, row.stable_co2);
      cell(label + " stable cost", its->second->carbon_cost, row.stable_cost);
    }
  }
  c.check(outcome.results.size() == 80,
          fmt::format("{} result rows (80 expected)", outcome.results.size()));
  c.check(elapsed < 1.0, fmt::format("sweep runtime {:.4f} s (< 1 s)", elapsed));
  return c.report();
}

bool criterion_6(const Stores& stores) {
  Criterion c(6, "centralized cells with back-solved powers, +/-10%");
  struct Cell {
    std::string prefix;
    std::map<std::string, double> printed;
    int decimals;
  };
  const std::vector<Cell> cells = {
      {"cifar10_v100_world", {{"us", 3.1}, {"cn", 5.5}, {"fr", 0.4}}, 1},
      {"cifar10_k80_world", {{"us", 6.5}, {"cn", 11.5}, {"fr", 0.9}}, 1},
      {"cifar10_v100_google", {{"us", 2.1}, {"cn", 3.7}, {"fr", 0.3}}, 1},
      {"cifar10_k80_google", {{"us", 4.3}, {"cn", 7.7}, {"fr", 0.6}}, 1},
      {"imagenet_v100_world", {{"us", 1230}, {"cn", 2290}, {"fr", 180}}, 0},
      {"imagenet_v100_google", {{"us", 820}, {"cn", 1500}, {"fr", 120}}, 0},
  };
  for (const auto& cell : cells) {
    for (const auto& r : kRegions) {
      const RunResult run = run_bundled(cell.prefix + "_" + r, stores);
      check_rounded(c, cell.prefix + " " + kRegionName.at(r), run.total_co2_grams,
                    cell.printed.at(r), cell.decimals, 0.10);
    }
  }
  return c.report();
}

// -- property suite ----------------------------------------------------------

Dataset small_dataset(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_classes = 3;
  spec.num_features = 4;
  spec.train_per_class = 10;
  spec.test_per_class = 1;
  spec.seed = seed;
  return make_gaussian_clusters(spec).train;
}

void gradient_check(Criterion& c) {
  const Dataset data = small_dataset(11);
  const ModelParams p = init_params(ModelDims{4, 5, 3}, 12);
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const ModelParams g = cross_entropy_gradient(p, data, idx);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t k = 0; k < p.values().size(); ++k) {
    ModelParams plus = p, minus = p;
    plus.values()[k] += h;
    minus.values()[k] -= h;
    const double fd =
        (cross_entropy(plus, data, idx) - cross_entropy(minus, data, idx)) / (2 * h);
    const double an = g.values()[k];
    const double scale = std::max({std::abs(fd), std::abs(an), 1e-8});
    worst = std::max(worst, std::abs(fd - an) / scale);
  }
  c.check(worst < 1e-4,
          fmt::format("finite-difference gradient, worst relative error {:.3g} (< 1e-4)",
                      worst));
}

void single_client_equivalence(Criterion& c) {
  LiveConfig cfg;
  cfg.data.num_classes = 4;
  cfg.data.num_features = 6;
  cfg.data.train_per_class = 40;
  cfg.seed = 3;
  FlParams fl;
  fl.total_clients = 4;
  fl.clients_per_round = 1;
  fl.local_epochs = 2;
  LiveFederation fed(cfg, fl, 5);
  ModelParams expected = fed.params();
  bool same = true;
  for (int round = 1; round <= 5 && same; ++round) {
    const auto chosen = select_clients(fl.total_clients, 1, round, 5);
    const auto& shard = fed.partition().shards.at(static_cast<std::size_t>(chosen[0]));
    TrainConfig tc = fed.train_config();
    tc.seed = local_train_seed(fed.run_seed(), round, chosen[0]);
    expected = local_train(expected, shard, fed.data().train, tc).params;
    fed.run_round(round, chosen);
    same = fed.params() == expected;
  }
  c.check(same, "FedAVG with one client per round equals sequential local SGD, bit for bit");
}

void partition_properties(Criterion& c) {
  Rng rng(2024);
  int bad = 0;
  std::string first_bad;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool non_iid = trial % 2 == 1;
    int classes = 1 + static_cast<int>(rng.below(12));
    int clients = 1 + static_cast<int>(rng.below(20));
    if (non_iid) {
      classes += classes % 2;
      clients += clients % 2;
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(classes));
    for (auto& k : counts) k = rng.below(60);
    const auto spec = LabeledDatasetSpec::from_counts(counts);
    const Partition part = non_iid ? partition_non_iid(spec, clients, rng.next())
                                   : partition_iid(spec, clients, rng.next());

    std::vector<int> seen(spec.total_samples(), 0);
    bool ok = static_cast<int>(part.shards.size()) == clients;
    for (const auto& s : part.shards) {
      for (auto i : s.sample_indices) ok = ok && i < seen.size() && ++seen[i] == 1;
    }
    ok = ok && std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; });
    if (!non_iid) {
      for (std::size_t k = 0; k < counts.size(); ++k) {
        std::size_t lo = counts[k], hi = 0;
        for (const auto& s : part.shards) {
          lo = std::min(lo, s.class_histogram[k]);
          hi = std::max(hi, s.class_histogram[k]);
        }
        ok = ok && hi - lo <= 1;
      }
      std::size_t lo = spec.total_samples(), hi = 0;
      for (const auto& s : part.shards) {
        lo = std::min(lo, s.size());
        hi = std::max(hi, s.size());
      }
      ok = ok && hi - lo <= 1;
    } else {
      const auto half_c = static_cast<std::size_t>(classes / 2);
      const auto half_t = static_cast<std::size_t>(clients / 2);
      for (std::size_t k = 0; k < counts.size(); ++k) {
        for (std::size_t t = 0; t < part.shards.size(); ++t) {
          // Each client owns at least its IID share of every class.
          const std::size_t iid_share = (counts[k] / 2) / part.shards.size();
          ok = ok && part.shards[t].class_histogram[k] >= iid_share;
          // Foreign-group classes never exceed the IID share plus one.
          const bool own_group = (k < half_c) == (t < half_t);
          if (!own_group) ok = ok && part.shards[t].class_histogram[k] <= iid_share + 1;
        }
      }
    }
    if (!ok && bad++ == 0) {
      first_bad = fmt::format("trial {} ({} classes, {} clients, {})", trial, classes,
                              clients, non_iid ? "non-IID" : "IID");
    }
  }
  c.check(bad == 0, fmt::format("partition disjointness/coverage/balance over 1000 specs, "
                                "{} violations{}",
                                bad, first_bad.empty() ? "" : ", first " + first_bad));
}

void incremental_identity(Criterion& c, const Stores& stores) {
  double worst = 0.0;
  for (const auto& id : {"cifar10_fl_noniid_1ep_us", "imagenet_fl_iid_3ep_cn",
                         "fashionmnist_fl_noniid_fr"}) {
    const RunResult run = run_bundled(id, stores);
    const Scenario s = load_scenario(data_dir() / "scenarios" / (std::string(id) + ".json"));
    const FlRoundShape shape{run.rounds_run, s.fl->clients_per_round,
                             effective_round_time(s, stores), effective_power(s, stores)};
    const double closed = co2_fl(shape, stores.factors.at(s.region));
    worst = std::max(worst, std::abs(run.total_co2_grams - closed) / closed);
  }
  c.check(worst <= 1e-9,
          fmt::format("round-by-round CO2 vs closed form, worst relative gap {:.3g}", worst));
}

void argmin_invariance(Criterion& c, const Stores& stores) {
  const SweepGrid grid = load_sweep_grid(data_dir() / "grids" / "sweep_grid.json");
  const Scenario base = load_scenario(data_dir() / "scenarios" / "cifar10_sweep_us.json");
  const auto argmins = [&](const Stores& st, const Scenario& sc) {
    std::vector<std::string> labels;
    for (const auto& b : sweep(grid, sc, st).best_per_column) labels.push_back(b.point.label());
    return labels;
  };
  const auto reference = argmins(stores, base);
  bool same = !reference.empty();
  for (double scale : {0.01, 0.5, 3.0, 250.0}) {
    Stores scaled = stores;
    scaled.factors.add(EmissionFactor("SCALED", 0.547 * scale), Provenance::kDerived);
    Scenario sc = base;
    sc.region = "SCALED";
    same = same && argmins(scaled, sc) == reference;
  }
  c.check(same, fmt::format("lowest-cost setup per column unchanged under factor scaling "
                            "x0.01..x250 ({})",
                            reference.empty() ? "none" : reference.front()));
}

void iid_vs_non_iid(Criterion& c, const Stores& stores) {
  const Scenario base = load_scenario(data_dir() / "live" / "toy.json", stores);
  constexpr int kSeeds = 20;
  const auto mean_rounds = [&](Partitioning p) {
    Scenario s = base;
    s.fl->partitioning = p;
    double sum = 0.0;
    for (int seed = 0; seed < kSeeds; ++seed) {
      RunOptions o;
      o.seed = static_cast<std::uint64_t>(seed);
      const RunResult r = run_fl(s, stores, o);
      sum += r.rounds_to_target.value_or(s.fl->round_cap);
    }
    return sum / kSeeds;
  };
  const double iid = mean_rounds(Partitioning::kIid);
  const double non_iid = mean_rounds(Partitioning::kNonIid);
  c.check(non_iid >= iid,
          fmt::format("toy config over {} seeds: mean rounds IID {:.2f}, non-IID {:.2f}",
                      kSeeds, iid, non_iid));
}

bool criterion_7(const Stores& stores) {
  Criterion c(7, "property suite");
  gradient_check(c);
  single_client_equivalence(c);
  partition_properties(c);
  incremental_identity(c, stores);
  argmin_invariance(c, stores);
  iid_vs_non_iid(c, stores);
  return c.report();
}

// -- end to end --------------------------------------------------------------

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

bool criterion_8() {
  Criterion c(8, "end-to-end sweep through the command line");
  const fs::path tmp = fs::temp_directory_path() / "fedcarbon_acceptance";
  fs::create_directories(tmp);
  const std::string dir = data_dir().string();

  const auto t0 = Clock::now();
  const int code = cli({"sweep", "--grid", dir + "/grids/sweep_grid.json", "--base",
                        dir + "/scenarios/cifar10_sweep_us.json", "--out",
                        (tmp / "sweep.csv").string()});
  c.check(code == kExitOk, fmt::format("sweep exit code {}", code));

  const CsvTable scatter = read_csv_file(tmp / "sweep_scatter.csv");
  c.check(scatter.rows.size() == 40,
          fmt::format("scatter file has {} points (40 expected)", scatter.rows.size()));

  const CsvTable table = read_csv_file(tmp / "sweep.csv");
  std::optional<std::pair<double, std::string>> best;
  for (const auto& row : table.rows) {
    if (row.fields[table.column("target")] != "0.6") continue;
    if (row.fields[table.column("carbon_cost")] == "NA") continue;
    const double cost = parse_double(row.fields[table.column("carbon_cost")], "sweep");
    const std::string label = fmt::format(
        "{}/{}ep/n={}", row.fields[table.column("partitioning")],
        row.fields[table.column("local_epochs")], row.fields[table.column("n")]);
    if (!best || cost < best->first) best = std::make_pair(cost, label);
  }
  c.check(best && best->second == "IID/1ep/n=1" && std::abs(rel(best->first, 1.35)) <= 0.02,
          best ? fmt::format("min cost at 60%: {} = {:.4f} vs IID/1ep/n=1 = 1.35",
                             best->second, best->first)
               : std::string("no numeric 60% rows"));

  // The rest of the command-line surface, timed together with the sweep.
  int bad_exits = 0;
  for (const auto& entry : fs::directory_iterator(data_dir() / "scenarios")) {
    if (entry.path().stem() == "cifar10_sweep_us") continue;
    bad_exits += cli({"estimate", "--scenario", entry.path().string(), "--format", "csv",
                      "--log", (tmp / "run.csv").string()}) != kExitOk;
  }
  bad_exits += cli({"compare", "--fl", dir + "/scenarios/cifar10_fl_iid_5ep_cn.json",
                    "--centralized", dir + "/scenarios/cifar10_v100_world_cn.json"}) !=
               kExitOk;
  bad_exits += cli({"simulate", "--live-config", dir + "/live/toy.json", "--seeds", "20",
                    "--partitioning", "both", "--out", (tmp / "sim.csv").string()}) !=
               kExitOk;
  bad_exits += cli({"report", "--runs", (tmp / "sweep.csv").string(), "--out",
                    (tmp / "report.csv").string()}) != kExitOk;
  const double elapsed = seconds_since(t0);
  c.check(bad_exits == 0, fmt::format("{} other commands failed", bad_exits));
  c.check(elapsed < 30.0, fmt::format("command-line workload {:.2f} s (< 30 s)", elapsed));
  fs::remove_all(tmp);
  return c.report();
}

}  // namespace

int main() {
  const Stores stores = load_stores(data_dir());
  const std::vector<std::function<bool()>> criteria = {
      [] { return criterion_1(); },
      [&] { return criterion_2(stores); },
      [&] { return criterion_3(stores); },
      [&] { return criterion_4(stores); },
      [&] { return criterion_5(stores); },
      [&] { return criterion_6(stores); },
      [&] { return criterion_7(stores); },
      [] { return criterion_8(); },
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      failures += criteria[i]() ? 0 : 1;
    } catch (const std::exception& e) {
      fmt::print("FAIL criterion {}: threw {}\n", i + 1, e.what());
      ++failures;
    }
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures;
}
