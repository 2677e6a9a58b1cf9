#include "fedcarbon/scenario_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#ifndef FEDCARBON_DEFAULT_DATA_DIR
#define FEDCARBON_DEFAULT_DATA_DIR "data"
#endif

namespace fedcarbon {

using json = nlohmann::json;

std::string to_string(Provenance p) {
  return p == Provenance::kPaper ? "paper" : "derived";
}

std::string to_string(Partitioning p) {
  return p == Partitioning::kIid ? "IID" : "NON_IID";
}

std::string to_string(Mode m) { return m == Mode::kFl ? "FL" : "CENTRALIZED"; }

Partitioning parse_partitioning(const std::string& text) {
  if (text == "IID" || text == "iid") return Partitioning::kIid;
  if (text == "NON_IID" || text == "non_iid" || text == "NONIID" ||
      text == "noniid") {
    return Partitioning::kNonIid;
  }
  throw ParseError("unknown partitioning '" + text + "'");
}

namespace {

Provenance parse_provenance(const std::string& text, const std::string& where) {
  if (text.empty() || text == "paper") return Provenance::kPaper;
  if (text == "derived") return Provenance::kDerived;
  throw ParseError(where + ": unknown provenance '" + text + "'");
}

std::string where(const CsvTable& t, const CsvRow& row) {
  return t.source + ":" + std::to_string(row.line);
}

// Round-trippable shortest representation.
std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

// ---------------------------------------------------------------------------

void EmissionFactorTable::add(EmissionFactor factor, Provenance provenance) {
  const std::string region = factor.region_code();
  if (region.empty()) throw ValidationError("empty region code");
  if (entries_.contains(region)) {
    throw ValidationError("duplicate region '" + region + "'");
  }
  entries_.emplace(region, Entry{std::move(factor), provenance});
}

const EmissionFactor& EmissionFactorTable::at(const std::string& region) const {
  const auto it = entries_.find(region);
  if (it == entries_.end()) {
    throw ResolutionError("unknown region '" + region + "'");
  }
  return it->second.factor;
}

bool EmissionFactorTable::contains(const std::string& region) const {
  return entries_.contains(region);
}

bool operator==(const EmissionFactorTable& a, const EmissionFactorTable& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  return std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                    [](const auto& x, const auto& y) {
                      return x.first == y.first &&
                             x.second.factor == y.second.factor &&
                             x.second.provenance == y.second.provenance;
                    });
}

EmissionFactorTable parse_emission_factors(std::istream& in,
                                           const std::string& source) {
  const CsvTable t = read_csv(in, source);
  const auto c_region = t.column("region");
  const auto c_factor = t.column("kg_co2_per_kwh");
  const bool has_prov = t.has_column("provenance");
  EmissionFactorTable table;
  for (const auto& row : t.rows) {
    const std::string at = where(t, row);
    const double value = parse_double(row.fields[c_factor], at);
    if (!(value > 0.0)) {
      throw ValidationError(at + ": emission factor must be positive");
    }
    const Provenance prov =
        has_prov ? parse_provenance(row.fields[t.column("provenance")], at)
                 : Provenance::kPaper;
    try {
      table.add(EmissionFactor(row.fields[c_region], value), prov);
    } catch (const ValidationError& e) {
      throw ValidationError(at + ": " + e.what());
    }
  }
  return table;
}

EmissionFactorTable load_emission_factors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_emission_factors(in, path.string());
}

void write_emission_factors(std::ostream& out, const EmissionFactorTable& table) {
  out << "region,kg_co2_per_kwh,provenance\n";
  for (const auto& [region, e] : table.entries()) {
    out << region << ',' << num(e.factor.kg_co2_per_kwh()) << ','
        << to_string(e.provenance) << '\n';
  }
}

// ---------------------------------------------------------------------------

void HardwareProfile::validate() const {
  if (name.empty()) throw ValidationError("hardware profile without a name");
  if (tdp && power.watts() > tdp->watts()) {
    throw ValidationError("hardware '" + name + "': power exceeds TDP");
  }
}

void HardwareCatalog::add(HardwareProfile profile) {
  profile.validate();
  if (profiles_.contains(profile.name)) {
    throw ValidationError("duplicate hardware '" + profile.name + "'");
  }
  auto name = profile.name;
  profiles_.emplace(std::move(name), std::move(profile));
}

const HardwareProfile& HardwareCatalog::at(const std::string& name) const {
  const auto it = profiles_.find(name);
  if (it == profiles_.end()) {
    throw ResolutionError("unknown hardware '" + name + "'");
  }
  return it->second;
}

bool HardwareCatalog::contains(const std::string& name) const {
  return profiles_.contains(name);
}

HardwareCatalog parse_hardware(std::istream& in, const std::string& source) {
  const CsvTable t = read_csv(in, source);
  const auto c_name = t.column("name");
  const auto c_power = t.column("power_watts");
  const auto c_tdp = t.column("tdp_watts");
  const auto c_pue = t.column("pue");
  const bool has_prov = t.has_column("provenance");
  HardwareCatalog catalog;
  for (const auto& row : t.rows) {
    const std::string at = where(t, row);
    try {
      HardwareProfile p;
      p.name = row.fields[c_name];
      p.power = PowerDraw(parse_double(row.fields[c_power], at));
      if (!row.fields[c_tdp].empty()) {
        p.tdp = PowerDraw(parse_double(row.fields[c_tdp], at));
      }
      if (!row.fields[c_pue].empty()) {
        p.pue = Pue(parse_double(row.fields[c_pue], at));
      }
      if (has_prov) {
        p.provenance = parse_provenance(row.fields[t.column("provenance")], at);
      }
      catalog.add(std::move(p));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(at + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(at + ": " + e.what());
    }
  }
  return catalog;
}

HardwareCatalog load_hardware(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_hardware(in, path.string());
}

void write_hardware(std::ostream& out, const HardwareCatalog& catalog) {
  out << "name,power_watts,tdp_watts,pue,provenance\n";
  for (const auto& [name, p] : catalog.profiles()) {
    out << name << ',' << num(p.power.watts()) << ','
        << (p.tdp ? num(p.tdp->watts()) : "") << ','
        << (p.pue ? num(p.pue->ratio()) : "") << ',' << to_string(p.provenance)
        << '\n';
  }
}

// ---------------------------------------------------------------------------

void LearningTrace::validate() const {
  if (points.empty()) {
    throw ValidationError("trace '" + setup_id + "' has no points");
  }
  int prev = 0;
  for (const auto& p : points) {
    if (p.round <= prev) {
      throw ValidationError("trace '" + setup_id +
                            "': rounds must be positive and strictly increasing");
    }
    if (!(p.test_accuracy >= 0.0 && p.test_accuracy <= 1.0)) {
      throw ValidationError("trace '" + setup_id +
                            "': accuracy outside [0, 1]");
    }
    prev = p.round;
  }
  if (clients_per_round < 1 || local_epochs < 1) {
    throw ValidationError("trace '" + setup_id +
                          "': clients_per_round and local_epochs must be >= 1");
  }
}

double LearningTrace::accuracy_at(int round) const {
  double acc = 0.0;
  for (const auto& p : points) {
    if (p.round > round) break;
    acc = p.test_accuracy;
  }
  return acc;
}

std::optional<int> LearningTrace::rounds_to_threshold(double threshold) const {
  if (threshold <= 0.0) return 0;
  for (const auto& p : points) {
    if (p.test_accuracy >= threshold) return p.round;
  }
  return std::nullopt;
}

TracePoint LearningTrace::stable_point() const {
  TracePoint best = points.front();
  for (const auto& p : points) {
    if (p.test_accuracy > best.test_accuracy) best = p;
  }
  return best;
}

void TraceStore::add(LearningTrace trace) {
  trace.validate();
  if (traces_.contains(trace.setup_id)) {
    throw ValidationError("duplicate trace '" + trace.setup_id + "'");
  }
  auto id = trace.setup_id;
  traces_.emplace(std::move(id), std::move(trace));
}

const LearningTrace& TraceStore::at(const std::string& setup_id) const {
  const auto it = traces_.find(setup_id);
  if (it == traces_.end()) {
    throw ResolutionError("unknown trace '" + setup_id + "'");
  }
  return it->second;
}

bool TraceStore::contains(const std::string& setup_id) const {
  return traces_.contains(setup_id);
}

std::vector<const LearningTrace*> TraceStore::find(
    const std::string& prefix, int clients_per_round, int local_epochs,
    Partitioning partitioning) const {
  std::vector<const LearningTrace*> out;
  for (const auto& [id, t] : traces_) {
    if (id.starts_with(prefix) && t.clients_per_round == clients_per_round &&
        t.local_epochs == local_epochs && t.partitioning == partitioning) {
      out.push_back(&t);
    }
  }
  return out;
}

TraceStore parse_traces(std::istream& points, const std::string& points_source,
                        std::istream& meta, const std::string& meta_source) {
  const CsvTable mt = read_csv(meta, meta_source);
  const auto m_id = mt.column("setup_id");
  const auto m_time = mt.column("round_time_s");
  const auto m_clients = mt.column("clients_per_round");
  const auto m_epochs = mt.column("local_epochs");
  const auto m_part = mt.column("partitioning");

  std::map<std::string, LearningTrace> pending;
  for (const auto& row : mt.rows) {
    const std::string at = where(mt, row);
    LearningTrace t;
    t.setup_id = row.fields[m_id];
    try {
      t.round_time = Duration(parse_double(row.fields[m_time], at));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(at + ": " + e.what());
    }
    t.clients_per_round = static_cast<int>(parse_int(row.fields[m_clients], at));
    t.local_epochs = static_cast<int>(parse_int(row.fields[m_epochs], at));
    t.partitioning = parse_partitioning(row.fields[m_part]);
    if (pending.contains(t.setup_id)) {
      throw ValidationError(at + ": duplicate trace meta '" + t.setup_id + "'");
    }
    pending.emplace(t.setup_id, std::move(t));
  }

  const CsvTable pt = read_csv(points, points_source);
  const auto p_id = pt.column("setup_id");
  const auto p_round = pt.column("round");
  const auto p_acc = pt.column("test_accuracy");
  const bool has_prov = pt.has_column("provenance");
  for (const auto& row : pt.rows) {
    const std::string at = where(pt, row);
    const auto it = pending.find(row.fields[p_id]);
    if (it == pending.end()) {
      throw ValidationError(at + ": trace '" + row.fields[p_id] +
                            "' has no meta row");
    }
    TracePoint p;
    p.round = static_cast<int>(parse_int(row.fields[p_round], at));
    p.test_accuracy = parse_double(row.fields[p_acc], at);
    if (has_prov) {
      p.provenance = parse_provenance(row.fields[pt.column("provenance")], at);
    }
    it->second.points.push_back(p);
  }

  TraceStore store;
  for (auto& [id, t] : pending) store.add(std::move(t));
  return store;
}

TraceStore load_traces(const std::filesystem::path& traces_csv,
                       const std::filesystem::path& meta_csv) {
  std::ifstream points(traces_csv);
  if (!points) throw ParseError("cannot open " + traces_csv.string());
  std::ifstream meta(meta_csv);
  if (!meta) throw ParseError("cannot open " + meta_csv.string());
  return parse_traces(points, traces_csv.string(), meta, meta_csv.string());
}

TraceStore load_traces(const std::filesystem::path& traces_csv) {
  return load_traces(traces_csv,
                     traces_csv.parent_path() / "traces_meta.csv");
}

void write_traces(std::ostream& points, std::ostream& meta,
                  const TraceStore& store) {
  points << "setup_id,round,test_accuracy,provenance\n";
  meta << "setup_id,round_time_s,clients_per_round,local_epochs,partitioning\n";
  for (const auto& [id, t] : store.traces()) {
    meta << id << ',' << num(t.round_time.seconds()) << ','
         << t.clients_per_round << ',' << t.local_epochs << ','
         << to_string(t.partitioning) << '\n';
    for (const auto& p : t.points) {
      points << id << ',' << p.round << ',' << num(p.test_accuracy) << ','
             << to_string(p.provenance) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

Stores load_stores(const std::filesystem::path& data_dir) {
  Stores s;
  s.factors = load_emission_factors(data_dir / "emission_factors.csv");
  s.hardware = load_hardware(data_dir / "hardware.csv");
  s.traces = load_traces(data_dir / "traces.csv", data_dir / "traces_meta.csv");
  return s;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("FEDCARBON_DATA_DIR"); env && *env) {
    return env;
  }
  return FEDCARBON_DEFAULT_DATA_DIR;
}

namespace {

// Strict object reader: every key must be consumed, unknown keys rejected.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParseError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return obj_.contains(key); }

  const json& raw(const char* key) {
    if (!obj_.contains(key)) {
      throw ParseError(path_ + ": missing key '" + key + "'");
    }
    seen_.emplace_back(key);
    return obj_.at(key);
  }

  std::string str(const char* key) {
    const auto& v = raw(key);
    if (!v.is_string()) throw ParseError(path_ + "." + key + ": expected string");
    return v.get<std::string>();
  }

  double number(const char* key) {
    const auto& v = raw(key);
    if (!v.is_number()) throw ParseError(path_ + "." + key + ": expected number");
    return v.get<double>();
  }

  long long integer(const char* key) {
    const auto& v = raw(key);
    if (!v.is_number_integer()) {
      throw ParseError(path_ + "." + key + ": expected integer");
    }
    return v.get<long long>();
  }

  template <typename T, typename F>
  std::optional<T> optional(const char* key, F read) {
    if (!has(key)) return std::nullopt;
    return read(key);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ParseError(path_ + ": unknown key '" + key + "'");
      }
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string> seen_;
};

Pue parse_pue(const json& v, const std::string& at) {
  if (v.is_number()) return Pue(v.get<double>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "world_average") return Pue::world_average();
    if (s == "google") return Pue::google();
    if (s == "amazon") return Pue::amazon();
    if (s == "microsoft") return Pue::microsoft();
    throw ParseError(at + ": unknown PUE preset '" + s + "'");
  }
  throw ParseError(at + ": PUE must be a number or preset name");
}

LiveConfig parse_live(const json& v, const std::string& at) {
  ObjectReader r(v, at);
  LiveConfig c;
  auto int_or = [&](const char* key, long long dflt) {
    return r.has(key) ? r.integer(key) : dflt;
  };
  auto num_or = [&](const char* key, double dflt) {
    return r.has(key) ? r.number(key) : dflt;
  };
  c.data.num_classes = static_cast<int>(int_or("classes", c.data.num_classes));
  c.data.num_features = static_cast<int>(int_or("features", c.data.num_features));
  c.data.train_per_class =
      static_cast<int>(int_or("train_per_class", c.data.train_per_class));
  c.data.test_per_class =
      static_cast<int>(int_or("test_per_class", c.data.test_per_class));
  c.data.separation = num_or("separation", c.data.separation);
  c.data.noise = num_or("noise", c.data.noise);
  c.hidden_dim = static_cast<std::size_t>(
      int_or("hidden", static_cast<long long>(c.hidden_dim)));
  c.learning_rate = num_or("learning_rate", c.learning_rate);
  c.momentum = num_or("momentum", c.momentum);
  c.batch_size = static_cast<std::size_t>(
      int_or("batch_size", static_cast<long long>(c.batch_size)));
  c.seed = static_cast<std::uint64_t>(int_or("seed", 0));
  c.data.seed = c.seed;
  r.finish();
  if (c.data.num_classes < 2 || c.data.num_features < 1 ||
      c.data.train_per_class < 1 || c.data.test_per_class < 1 ||
      c.hidden_dim < 1 || c.batch_size < 1) {
    throw ValidationError(at + ": live dimensions must be positive");
  }
  if (!(c.learning_rate >= 0.0) || !(c.momentum >= 0.0 && c.momentum < 1.0)) {
    throw ValidationError(at + ": learning_rate >= 0 and momentum in [0,1)");
  }
  return c;
}

json live_to_json(const LiveConfig& c) {
  return json{{"classes", c.data.num_classes},
              {"features", c.data.num_features},
              {"train_per_class", c.data.train_per_class},
              {"test_per_class", c.data.test_per_class},
              {"separation", c.data.separation},
              {"noise", c.data.noise},
              {"hidden", c.hidden_dim},
              {"learning_rate", c.learning_rate},
              {"momentum", c.momentum},
              {"batch_size", c.batch_size},
              {"seed", c.seed}};
}

AccuracySource parse_source(ObjectReader& r) {
  const bool trace = r.has("trace");
  const bool live = r.has("live");
  if (trace == live) {
    throw ParseError(r.path() + ": exactly one of 'trace' or 'live' required");
  }
  if (trace) return TraceSource{r.str("trace")};
  return parse_live(r.raw("live"), r.path() + ".live");
}

void put_source(json& obj, const AccuracySource& src) {
  if (const auto* t = std::get_if<TraceSource>(&src)) {
    obj["trace"] = t->setup_id;
  } else {
    obj["live"] = live_to_json(std::get<LiveConfig>(src));
  }
}

}  // namespace

void validate_scenario(const Scenario& s) {
  const std::string at = "scenario '" + s.id + "'";
  if (s.id.empty()) throw ValidationError("scenario id must not be empty");
  if (!(s.target_accuracy >= 0.0 && s.target_accuracy <= 1.0)) {
    throw ValidationError(at + ": target_accuracy must be in [0, 1]");
  }
  if (!(s.other_hardware_factor > 0.0) || !std::isfinite(s.other_hardware_factor)) {
    throw ValidationError(at + ": other_hardware_factor must be positive");
  }
  if (s.mode == Mode::kFl) {
    if (!s.fl || s.centralized) {
      throw ValidationError(at + ": FL mode needs an 'fl' object and no 'centralized'");
    }
    const auto& f = *s.fl;
    if (f.total_clients < 1 || f.clients_per_round < 1 || f.local_epochs < 1) {
      throw ValidationError(at + ": client and epoch counts must be >= 1");
    }
    if (f.clients_per_round > f.total_clients) {
      throw ValidationError(at + ": clients_per_round exceeds total_clients");
    }
    if (f.round_cap < 1) throw ValidationError(at + ": round_cap must be >= 1");
    if (f.round_time_s && f.epoch_time_s) {
      throw ValidationError(at + ": give round_time_s or epoch_time_s, not both");
    }
    for (const auto& t : {f.round_time_s, f.epoch_time_s}) {
      if (t && !(*t >= 0.0 && std::isfinite(*t))) {
        throw ValidationError(at + ": times must be finite and >= 0");
      }
    }
    if (!s.uses_trace() && !f.round_time_s && !f.epoch_time_s) {
      throw ValidationError(at + ": live scenarios need round_time_s or epoch_time_s");
    }
  } else {
    if (!s.centralized || s.fl) {
      throw ValidationError(
          at + ": CENTRALIZED mode needs a 'centralized' object and no 'fl'");
    }
    if (!s.uses_trace()) {
      throw ValidationError(at + ": centralized runs need a trace");
    }
    const auto& c = *s.centralized;
    if (!(c.epoch_time_s >= 0.0 && std::isfinite(c.epoch_time_s))) {
      throw ValidationError(at + ": epoch_time_s must be finite and >= 0");
    }
    if (!(c.cpu_watts >= 0.0 && std::isfinite(c.cpu_watts))) {
      throw ValidationError(at + ": cpu_watts must be finite and >= 0");
    }
    if (c.max_epochs < 1) throw ValidationError(at + ": max_epochs must be >= 1");
  }
}

void resolve_scenario(const Scenario& s, const Stores& stores) {
  validate_scenario(s);
  const std::string at = "scenario '" + s.id + "'";
  const auto& hw = stores.hardware.at(s.hardware);
  (void)stores.factors.at(s.region);
  if (s.mode == Mode::kCentralized && !hw.pue && !s.centralized->pue) {
    throw ValidationError(at + ": hardware '" + hw.name +
                          "' has no PUE, centralized mode needs one");
  }
  if (s.uses_trace()) {
    const auto& t = stores.traces.at(s.trace_id());
    if (s.mode == Mode::kFl) {
      const auto& f = *s.fl;
      if (t.clients_per_round != f.clients_per_round ||
          t.local_epochs != f.local_epochs || t.partitioning != f.partitioning) {
        throw ResolutionError(at + ": trace '" + t.setup_id +
                              "' was recorded with a different FL setup");
      }
    }
  } else if (s.fl->partitioning == Partitioning::kNonIid &&
             (s.fl->total_clients % 2 != 0 ||
              std::get<LiveConfig>(s.source).data.num_classes % 2 != 0)) {
    throw ValidationError(at + ": non-IID live runs need even clients and classes");
  }
}

Scenario parse_scenario(const std::string& json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  Scenario s;
  try {
    ObjectReader r(doc, source);
    s.id = r.str("id");
    const auto mode = r.str("mode");
    if (mode == "FL") {
      s.mode = Mode::kFl;
    } else if (mode == "CENTRALIZED") {
      s.mode = Mode::kCentralized;
    } else {
      throw ParseError(source + ": mode must be FL or CENTRALIZED");
    }
    s.hardware = r.str("hardware");
    s.region = r.str("region");
    s.target_accuracy = r.number("target_accuracy");
    if (r.has("other_hardware_factor")) {
      s.other_hardware_factor = r.number("other_hardware_factor");
    }
    bool have_source = false;
    if (r.has("fl")) {
      ObjectReader f(r.raw("fl"), source + ".fl");
      FlParams p;
      p.total_clients = static_cast<int>(f.integer("total_clients"));
      p.clients_per_round = static_cast<int>(f.integer("clients_per_round"));
      p.local_epochs = static_cast<int>(f.integer("local_epochs"));
      p.partitioning = parse_partitioning(f.str("partitioning"));
      if (f.has("round_time_s")) p.round_time_s = f.number("round_time_s");
      if (f.has("epoch_time_s")) p.epoch_time_s = f.number("epoch_time_s");
      if (f.has("round_cap")) p.round_cap = static_cast<int>(f.integer("round_cap"));
      s.source = parse_source(f);
      have_source = true;
      f.finish();
      s.fl = p;
    }
    if (r.has("centralized")) {
      ObjectReader c(r.raw("centralized"), source + ".centralized");
      CentralizedParams p;
      p.epoch_time_s = c.number("epoch_time_s");
      if (c.has("pue")) p.pue = parse_pue(c.raw("pue"), c.path() + ".pue");
      if (c.has("cpu_watts")) p.cpu_watts = c.number("cpu_watts");
      if (c.has("max_epochs")) p.max_epochs = static_cast<int>(c.integer("max_epochs"));
      if (c.has("trace") || c.has("live")) {
        s.source = parse_source(c);
        have_source = true;
      }
      c.finish();
      s.centralized = p;
    }
    if (!have_source) {
      throw ValidationError(source + ": scenario needs an 'fl' or 'centralized' object");
    }
    r.finish();
  } catch (const json::exception& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(source + ": " + e.what());
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

Scenario load_scenario(const std::filesystem::path& path, const Stores& stores) {
  Scenario s = load_scenario(path);
  resolve_scenario(s, stores);
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json doc{{"id", s.id},
           {"mode", to_string(s.mode)},
           {"hardware", s.hardware},
           {"region", s.region},
           {"target_accuracy", s.target_accuracy}};
  if (s.other_hardware_factor != 1.0) {
    doc["other_hardware_factor"] = s.other_hardware_factor;
  }
  if (s.fl) {
    const auto& f = *s.fl;
    json o{{"total_clients", f.total_clients},
           {"clients_per_round", f.clients_per_round},
           {"local_epochs", f.local_epochs},
           {"partitioning", to_string(f.partitioning)},
           {"round_cap", f.round_cap}};
    if (f.round_time_s) o["round_time_s"] = *f.round_time_s;
    if (f.epoch_time_s) o["epoch_time_s"] = *f.epoch_time_s;
    put_source(o, s.source);
    doc["fl"] = o;
  }
  if (s.centralized) {
    const auto& c = *s.centralized;
    json o{{"epoch_time_s", c.epoch_time_s},
           {"cpu_watts", c.cpu_watts},
           {"max_epochs", c.max_epochs}};
    if (c.pue) o["pue"] = c.pue->ratio();
    put_source(o, s.source);
    doc["centralized"] = o;
  }
  return doc.dump(2);
}

PowerDraw effective_power(const Scenario& s, const Stores& stores) {
  double watts = stores.hardware.at(s.hardware).power.watts();
  if (s.centralized) watts += s.centralized->cpu_watts;
  return PowerDraw(watts * s.other_hardware_factor);
}

Pue effective_pue(const Scenario& s, const Stores& stores) {
  if (s.centralized && s.centralized->pue) return *s.centralized->pue;
  const auto& hw = stores.hardware.at(s.hardware);
  if (!hw.pue) {
    throw ValidationError("hardware '" + hw.name + "' has no PUE");
  }
  return *hw.pue;
}

Duration effective_round_time(const Scenario& s, const Stores& stores) {
  if (!s.fl) throw ValidationError("scenario '" + s.id + "' is not FL");
  if (s.fl->round_time_s) return Duration(*s.fl->round_time_s);
  if (s.fl->epoch_time_s) {
    return Duration(*s.fl->epoch_time_s * s.fl->local_epochs);
  }
  return stores.traces.at(s.trace_id()).round_time;
}

}  // namespace fedcarbon
