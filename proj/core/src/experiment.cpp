#include "vneap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "vneap/error.hpp"
#include "vneap/exact.hpp"
#include "vneap/milp.hpp"
#include "vneap/paths.hpp"
#include "vneap/policies.hpp"
#include "vneap/scenario_io.hpp"

#ifndef VNEAP_VERSION
#define VNEAP_VERSION "0.0.0"
#endif

namespace vneap {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view library_version() { return VNEAP_VERSION; }

// ---- methods -------------------------------------------------------------------

MethodSpec parse_method(std::string_view spec, const fs::path& base_dir) {
  MethodSpec m;
  m.spec = std::string(spec);
  if (spec == "oracle") {
    m.kind = MethodKind::kOracle;
    m.label = "oracle";
  } else if (spec.substr(0, 4) == "hrl:") {
    m.kind = MethodKind::kHrl;
    const fs::path p(std::string(spec.substr(4)));
    if (p.empty()) throw InvalidArgument("method 'hrl:' needs an agent directory");
    m.agent = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    m.label = "hrl";
  } else if (is_heuristic_method(spec)) {
    m.kind = MethodKind::kHeuristic;
    m.label = std::string(spec);
  } else {
    throw InvalidArgument("unknown method '" + std::string(spec) +
                          "' (expected a heuristic such as noexploit-random+greedy, "
                          "hrl:<agent dir> or oracle)");
  }
  return m;
}

std::string method_group(const MethodSpec& m) {
  switch (m.kind) {
    case MethodKind::kHrl: return "Ours";
    case MethodKind::kOracle: return "Oracle";
    case MethodKind::kHeuristic:
      return m.spec.rfind("noexploit-", 0) == 0 ? "No exploit" : "Exploit";
  }
  return "";
}

std::string_view to_string(RevenueReading r) {
  return r == RevenueReading::kAccepted ? "accepted" : "all-arrivals";
}

RevenueReading revenue_reading_from_string(std::string_view s) {
  if (s == "accepted") return RevenueReading::kAccepted;
  if (s == "all-arrivals") return RevenueReading::kAllArrivals;
  throw InvalidArgument("revenue reading must be 'accepted' or 'all-arrivals', got '" +
                        std::string(s) + "'");
}

std::string topology_slug(std::string_view topology) {
  constexpr std::string_view kBuiltin = "builtin:";
  if (topology.substr(0, kBuiltin.size()) == kBuiltin)
    return std::string(topology.substr(kBuiltin.size()));
  return fs::path(std::string(topology)).stem().string();
}

// ---- plan ----------------------------------------------------------------------

void ExperimentPlan::rebase_seeds(std::uint64_t base) {
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = base + i;
}

void ExperimentPlan::validate(bool require_agents) const {
  auto bad = [](const std::string& what) { throw InvalidArgument(what); };
  if (topologies.empty()) bad("topologies: at least one topology is required");
  if (arrival_rates.empty()) bad("arrival_rates: at least one rate is required");
  if (seeds.empty()) bad("seeds: at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    bad("seeds: seeds must be distinct");
  if (std::set<double>(arrival_rates.begin(), arrival_rates.end()).size() != arrival_rates.size())
    bad("arrival_rates: rates must be distinct");
  std::set<std::string> slugs;
  for (const auto& t : topologies) {
    try {
      resolve_topology(t);
    } catch (const Error& e) {
      bad("topologies: " + t + ": " + e.what());
    }
    if (!slugs.insert(topology_slug(t)).second)
      bad("topologies: two entries share the name '" + topology_slug(t) + "'");
  }
  for (double r : arrival_rates)
    if (!(r > 0) || !std::isfinite(r)) bad("arrival_rates: rates must be positive");
  std::set<std::string> labels;
  for (const auto& m : methods) {
    if (!labels.insert(m.label).second) bad("methods: duplicate method '" + m.label + "'");
    if (require_agents && m.kind == MethodKind::kHrl && !fs::exists(m.agent / "agent.json"))
      bad("methods: " + m.spec + ": no agent.json under " + m.agent.string());
  }
  if (k < 1) bad("k: must be >= 1");
  if (train.episodes < 0) bad("train.episodes: must be >= 0");
  if (train.rollouts_per_update < 1) bad("train.rollouts_per_update: must be >= 1");
  if (train.checkpoint_every < 0) bad("train.checkpoint_every: must be >= 0");
  if (train.settings.hidden < 1) bad("train.hidden: must be >= 1");
  if (train.settings.max_alternatives < 1) bad("train.max_alternatives: must be >= 1");
  if (train.settings.k < 1) bad("train.k: must be >= 1");
  if (!(oracle.time_budget_seconds >= 0)) bad("oracle.time_budget_seconds: must be >= 0");
  ScenarioConfig c = scenario;
  c.substrate = topologies.front();
  c.arrival_rate = arrival_rates.front();
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    bad(std::string("scenario: ") + e.what());
  }
}

ScenarioConfig ExperimentPlan::cell_config(const std::string& topology, double arrival_rate,
                                           std::uint64_t seed) const {
  ScenarioConfig c = scenario;
  c.substrate = topology;
  c.arrival_rate = arrival_rate;
  c.seed = seed;
  return c;
}

namespace {

json ppo_json(const PpoConfig& p) { return p.to_json(); }

}  // namespace

json ExperimentPlan::to_json() const {
  json scen = config_to_json(scenario);
  scen.erase("substrate");
  scen.erase("arrival_rate");
  scen.erase("seed");
  json methods_json = json::array();
  for (const auto& m : methods)
    methods_json.push_back(m.kind == MethodKind::kHrl
                               ? "hrl:" + fs::absolute(m.agent).lexically_normal().string()
                               : m.spec);
  json tr = {{"episodes", train.episodes},
             {"rollouts_per_update", train.rollouts_per_update},
             {"checkpoint_every", train.checkpoint_every},
             {"hidden", train.settings.hidden},
             {"max_alternatives", train.settings.max_alternatives},
             {"k", train.settings.k},
             {"sigma", train.settings.sigma},
             {"ppo", ppo_json(train.ppo)}};
  if (!train.topology.empty()) tr["topology"] = train.topology;
  if (train.arrival_rate) tr["arrival_rate"] = *train.arrival_rate;
  return {{"format", "vneap-experiment"},
          {"version", 1},
          {"scenario", std::move(scen)},
          {"topologies", topologies},
          {"arrival_rates", arrival_rates},
          {"seeds", seeds},
          {"methods", std::move(methods_json)},
          {"k", k},
          {"revenue_reading", std::string(to_string(revenue_reading))},
          {"train", std::move(tr)},
          {"oracle",
           {{"time_budget_seconds", oracle.time_budget_seconds},
            {"max_variables", oracle.max_variables}}}};
}

namespace {

// Strict object reader: every key must be consumed.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw FormatError(where_ + ": must be an object");
  }
  ~Fields() = default;

  const json* get(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  [[noreturn]] void wrong(const char* key, const char* expected) const {
    throw FormatError(where_ + ": field '" + key + "' must be " + expected);
  }
  template <typename T>
  void number(const char* key, T& out) {
    const json* v = get(key);
    if (!v) return;
    if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer() || (std::is_unsigned_v<T> && v->get<long long>() < 0))
        wrong(key, "an integer");
    } else {
      if (!v->is_number()) wrong(key, "a number");
    }
    out = v->get<T>();
  }
  void boolean(const char* key, bool& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_boolean()) wrong(key, "true or false");
    out = v->get<bool>();
  }
  void string(const char* key, std::string& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_string()) wrong(key, "a string");
    out = v->get<std::string>();
  }
  void finish() const {
    for (const auto& [key, v] : j_.items())
      if (!seen_.count(key)) throw FormatError(where_ + ": unknown field '" + key + "'");
  }
  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentPlan plan_from_json(const json& j, std::string_view origin, const fs::path& base_dir) {
  const std::string o(origin);
  ExperimentPlan p;
  // A bare scenario config is a one-cell, one-seed plan.
  if (j.is_object() && j.contains("substrate") && !j.contains("scenario")) {
    p.scenario = config_from_json(j, o);
    if (p.scenario.substrate.rfind("builtin:", 0) != 0 && !base_dir.empty() &&
        fs::path(p.scenario.substrate).is_relative())
      p.scenario.substrate = (base_dir / p.scenario.substrate).string();
    p.topologies = {p.scenario.substrate};
    p.arrival_rates = {p.scenario.arrival_rate};
    p.seeds = {p.scenario.seed};
    p.methods = {parse_method("noexploit-random+greedy"), parse_method("exploit-maxrev+greedy")};
    return p;
  }
  Fields f(j, o);
  if (const json* v = f.get("format"); v && *v != "vneap-experiment")
    throw FormatError(o + ": field 'format' must be \"vneap-experiment\"");
  if (const json* v = f.get("version"); v && *v != 1)
    throw FormatError(o + ": unsupported version (expected 1)");
  if (const json* v = f.get("scenario")) p.scenario = config_from_json(*v, o + ": scenario");
  if (const json* v = f.get("topologies")) {
    if (!v->is_array()) f.wrong("topologies", "a list of strings");
    for (const auto& t : *v) {
      if (!t.is_string()) f.wrong("topologies", "a list of strings");
      p.topologies.push_back(t.get<std::string>());
    }
  } else {
    p.topologies = {p.scenario.substrate};
  }
  // Relative topology files are relative to the plan file.
  for (auto& t : p.topologies)
    if (t.rfind("builtin:", 0) != 0 && !base_dir.empty() && fs::path(t).is_relative())
      t = (base_dir / t).string();
  if (const json* v = f.get("arrival_rates")) {
    if (!v->is_array()) f.wrong("arrival_rates", "a list of numbers");
    for (const auto& r : *v) {
      if (!r.is_number()) f.wrong("arrival_rates", "a list of numbers");
      p.arrival_rates.push_back(r.get<double>());
    }
  } else {
    p.arrival_rates = {p.scenario.arrival_rate};
  }
  const json* seeds = f.get("seeds");
  std::uint64_t base = 1;
  int count = 10;
  f.number("seed", base);
  f.number("seed_count", count);
  if (seeds) {
    if (j.contains("seed") || j.contains("seed_count"))
      throw FormatError(o + ": give either 'seeds' or 'seed'/'seed_count', not both");
    if (!seeds->is_array()) f.wrong("seeds", "a list of non-negative integers");
    for (const auto& s : *seeds) {
      if (!s.is_number_integer() || s.get<long long>() < 0)
        f.wrong("seeds", "a list of non-negative integers");
      p.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    if (count < 1) throw FormatError(o + ": field 'seed_count' must be >= 1");
    p.seeds.resize(count);
    p.rebase_seeds(base);
  }
  if (const json* v = f.get("methods")) {
    if (!v->is_array()) f.wrong("methods", "a list of strings");
    for (const auto& m : *v) {
      if (!m.is_string()) f.wrong("methods", "a list of strings");
      try {
        p.methods.push_back(parse_method(m.get<std::string>(), base_dir));
      } catch (const InvalidArgument& e) {
        throw FormatError(o + ": field 'methods': " + e.what());
      }
    }
  } else {
    p.methods = {parse_method("noexploit-random+greedy"), parse_method("exploit-maxrev+greedy")};
  }
  if (std::count_if(p.methods.begin(), p.methods.end(),
                    [](const MethodSpec& m) { return m.kind == MethodKind::kHrl; }) > 1)
    for (auto& m : p.methods)
      if (m.kind == MethodKind::kHrl) m.label = "hrl-" + m.agent.filename().string();
  f.number("k", p.k);
  p.train.settings.k = p.k;
  std::string reading = "accepted";
  f.string("revenue_reading", reading);
  try {
    p.revenue_reading = revenue_reading_from_string(reading);
  } catch (const InvalidArgument& e) {
    throw FormatError(o + ": field 'revenue_reading': " + e.what());
  }
  if (const json* v = f.get("train")) {
    Fields t(*v, o + ": train");
    t.number("episodes", p.train.episodes);
    t.number("rollouts_per_update", p.train.rollouts_per_update);
    t.number("checkpoint_every", p.train.checkpoint_every);
    t.string("topology", p.train.topology);
    if (!p.train.topology.empty() && p.train.topology.rfind("builtin:", 0) != 0 &&
        !base_dir.empty() && fs::path(p.train.topology).is_relative())
      p.train.topology = (base_dir / p.train.topology).string();
    double rate = 0;
    if (v->contains("arrival_rate")) {
      t.number("arrival_rate", rate);
      p.train.arrival_rate = rate;
    }
    t.number("hidden", p.train.settings.hidden);
    t.number("max_alternatives", p.train.settings.max_alternatives);
    t.number("k", p.train.settings.k);
    t.number("sigma", p.train.settings.sigma);
    if (const json* pv = t.get("ppo")) {
      Fields q(*pv, o + ": train.ppo");
      PpoConfig& c = p.train.ppo;
      q.number("gamma", c.gamma);
      q.number("lambda", c.lambda);
      q.number("clip", c.clip);
      q.number("value_coef", c.value_coef);
      q.number("entropy_coef", c.entropy_coef);
      q.number("epochs", c.epochs);
      q.number("minibatch", c.minibatch);
      q.number("max_grad_norm", c.max_grad_norm);
      q.boolean("normalize_advantages", c.normalize_advantages);
      if (const json* av = q.get("adam")) {
        Fields a(*av, o + ": train.ppo.adam");
        a.number("lr", c.adam.lr);
        a.number("beta1", c.adam.beta1);
        a.number("beta2", c.adam.beta2);
        a.number("eps", c.adam.eps);
        a.finish();
      }
      q.finish();
    }
    t.finish();
  }
  if (const json* v = f.get("oracle")) {
    Fields t(*v, o + ": oracle");
    t.number("time_budget_seconds", p.oracle.time_budget_seconds);
    t.number("max_variables", p.oracle.max_variables);
    t.finish();
  }
  f.finish();
  return p;
}

ExperimentPlan load_plan(const fs::path& path) {
  const json j = read_json_file(path);
  ExperimentPlan p = plan_from_json(j, path.string(), path.parent_path());
  try {
    p.validate(false);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  return p;
}

// ---- statistics ------------------------------------------------------------------

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd m;
  m.n = static_cast<int>(v.size());
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= v.size();
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / (v.size() - 1));
  }
  return m;
}

std::optional<double> relative_gap(double ours, double reference) {
  if (reference == 0.0) return std::nullopt;
  return (ours - reference) / std::abs(reference);
}

// ---- run metrics -----------------------------------------------------------------

RunMetrics metrics_of(const SimulationReport& r, RevenueReading reading) {
  RunMetrics m;
  m.total = r.total;
  m.accepted = r.accepted;
  m.acceptance = r.acceptance_ratio;
  m.revenue = reading == RevenueReading::kAccepted ? r.total_revenue : r.offered_revenue;
  m.cost = r.total_cost;
  m.r2c = r.r2c;
  return m;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::string_view what, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad " + std::string(what) + " '" + s + "'", line);
  }
}

}  // namespace

RunMetrics metrics_from_records_csv(std::istream& in, RevenueReading reading,
                                    std::string_view origin) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(std::string(origin) + ": empty file", 0);
  const auto header = split(line, ',');
  auto col = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ParseError(std::string(origin) + ": missing column '" + std::string(name) + "'", 1);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_out = col("outcome"), c_rev = col("revenue"), c_cost = col("cost"),
                    c_off = col("offered_revenue");
  SimulationReport rep;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size())
      throw ParseError(std::string(origin) + ": expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(f.size()),
                       n);
    VnrRecord r;
    try {
      r.outcome = outcome_from_string(f[c_out]);
    } catch (const Error& e) {
      throw ParseError(std::string(origin) + ": " + e.what(), n);
    }
    r.revenue = parse_number(f[c_rev], "revenue", n);
    r.cost = parse_number(f[c_cost], "cost", n);
    r.offered_revenue = parse_number(f[c_off], "offered revenue", n);
    rep.records.push_back(std::move(r));
  }
  recompute_aggregates(rep);
  return metrics_of(rep, reading);
}

// ---- output staging --------------------------------------------------------------

namespace {

// Writes go to <out>.partial; commit() renames it to <out>. An uncommitted
// stage is removed, so an aborted command leaves nothing behind.
class StagedOutput {
 public:
  explicit StagedOutput(fs::path out) : out_(std::move(out)) {
    if (out_.empty()) throw InvalidArgument("an output directory is required (--out)");
    if (fs::exists(out_) && !(fs::is_directory(out_) && fs::is_empty(out_)))
      throw InvalidArgument("output directory " + out_.string() + " exists and is not empty");
    stage_ = out_;
    stage_ += ".partial";
    fs::remove_all(stage_);
    fs::create_directories(stage_);
  }
  ~StagedOutput() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(stage_, ec);
    }
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  const fs::path& dir() const { return stage_; }
  void commit() {
    if (fs::exists(out_)) fs::remove(out_);  // empty directory
    if (out_.has_parent_path()) fs::create_directories(out_.parent_path());
    fs::rename(stage_, out_);
    committed_ = true;
  }

 private:
  fs::path out_, stage_;
  bool committed_ = false;
};

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

void close_checked(std::ofstream& out, const fs::path& p) {
  out.close();
  if (!out) throw Error("error writing " + p.string());
}

std::string rate_dir(double rate) { return "eta-" + format_double(rate); }

json provenance(const std::string& command, const ExperimentPlan& plan,
                const CommandContext& ctx, json extra = json::object()) {
  json constants = {{"feasibility_tolerance", kFeasibilityTol},
                    {"k", plan.k},
                    {"revenue_reading", std::string(to_string(plan.revenue_reading))},
                    {"reject_reward", 0.0},
                    {"hl_failure_penalty_sigma", plan.train.settings.sigma},
                    {"gem_eps", PolicyArch{}.gem_eps},
                    {"gem_p_init", PolicyArch{}.gem_p_init},
                    {"exact_tie_break", "objective, then more accepted, then lexicographic"},
                    {"activity_window", "half-open [arrival, arrival + lifetime)"},
                    {"arrival_process", "poisson"}};
  json p = {{"tool", "vneap"},
            {"version", std::string(library_version())},
            {"command", command},
            {"plan", plan.to_json()},
            {"seeds", plan.seeds},
            {"constants", std::move(constants)}};
  if (!ctx.command_line.empty()) p["command_line"] = ctx.command_line;
  for (auto& [k, v] : extra.items()) p[k] = v;
  return p;
}

void log(const CommandContext& ctx, const std::string& msg) {
  if (ctx.log) *ctx.log << msg << '\n';
}

void warn(const CommandContext& ctx, const std::string& msg) {
  if (ctx.warn) *ctx.warn << "warning: " << msg << '\n';
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; the first exception
// (by index) is rethrown after all workers have stopped.
template <typename Fn>
void parallel_for(int n, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(jobs, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Cell {
  std::string topology;
  double rate;
};

std::vector<Cell> cells_of(const ExperimentPlan& plan) {
  std::vector<Cell> cells;
  for (const auto& t : plan.topologies)
    for (double r : plan.arrival_rates) cells.push_back({t, r});
  return cells;
}

}  // namespace

// ---- generate ----------------------------------------------------------------------

void cmd_generate(const ExperimentPlan& plan, const fs::path& out, const CommandContext& ctx) {
  plan.validate(false);
  StagedOutput stage(out);
  const auto cells = cells_of(plan);
  int fallbacks = 0;
  for (const Cell& c : cells) {
    const TopologySkeleton skel = resolve_topology(c.topology);
    for (std::uint64_t seed : plan.seeds) {
      const Scenario s = generate_scenario(plan.cell_config(c.topology, c.rate, seed), skel);
      fallbacks += s.provenance.generation_fallbacks;
      const fs::path dir = stage.dir() / "scenarios" / topology_slug(c.topology) / rate_dir(c.rate);
      fs::create_directories(dir);
      save_scenario(s, dir / ("seed-" + std::to_string(seed) + ".json"));
    }
    log(ctx, "generated " + std::to_string(plan.seeds.size()) + " scenarios for " +
                 topology_slug(c.topology) + " " + rate_dir(c.rate));
  }
  if (fallbacks > 0)
    warn(ctx, std::to_string(fallbacks) + " mutants fell back to a copy of their base");
  write_json_file(plan.to_json(), stage.dir() / "plan.json");
  write_json_file(provenance("generate", plan, ctx, {{"generation_fallbacks", fallbacks}}),
                  stage.dir() / "provenance.json");
  stage.commit();
}

// ---- train -------------------------------------------------------------------------

TrainResult cmd_train(const ExperimentPlan& plan, const fs::path& out, const CommandContext& ctx) {
  plan.validate(false);
  if (out.empty()) throw InvalidArgument("an output directory is required (--out)");
  if (fs::exists(out) && !(fs::is_directory(out) && fs::is_empty(out)))
    throw InvalidArgument("output directory " + out.string() + " exists and is not empty");
  const std::string topology =
      plan.train.topology.empty() ? plan.topologies.front() : plan.train.topology;
  const double rate = plan.train.arrival_rate.value_or(plan.arrival_rates.front());
  const TopologySkeleton skel = resolve_topology(topology);
  const ScenarioSource source = [&plan, topology, rate, skel](std::uint64_t seed) {
    return generate_scenario(plan.cell_config(topology, rate, seed), skel);
  };
  TrainConfig cfg;
  cfg.episodes = plan.train.episodes;
  cfg.rollouts_per_update = plan.train.rollouts_per_update;
  cfg.jobs = std::max(1, ctx.jobs);
  cfg.seed = plan.seeds.front();
  cfg.checkpoint_every = plan.train.checkpoint_every;
  cfg.out = out;
  cfg.settings = plan.train.settings;
  cfg.settings.mean_lifetime = plan.scenario.mean_lifetime;
  cfg.ppo = plan.train.ppo;
  log(ctx, "training on " + topology_slug(topology) + " " + rate_dir(rate) + " for " +
               std::to_string(cfg.episodes) + " episodes");
  fs::create_directories(out);
  write_json_file(plan.to_json(), out / "plan.json");
  TrainResult r = train(source, cfg);
  if (cfg.episodes == 0) save_agent(r.agent, out / "agent");
  write_json_file(provenance("train", plan, ctx,
                             {{"training",
                               {{"topology", topology},
                                {"arrival_rate", rate},
                                {"seed", cfg.seed},
                                {"jobs_do_not_affect_results", true},
                                {"reward_scale", r.agent.settings.reward_scale},
                                {"config", cfg.to_json()}}}}),
                  out / "provenance.json");
  return r;
}

// ---- evaluate ----------------------------------------------------------------------

namespace {

struct RunOutcome {
  bool ok = false;
  RunMetrics metrics;
  std::string note;
};

struct LoadedAgent {
  HrlAgent agent;
};

}  // namespace

void cmd_evaluate(const ExperimentPlan& plan, const fs::path& out, const CommandContext& ctx) {
  plan.validate();
  if (plan.methods.empty()) throw InvalidArgument("methods: nothing to evaluate");
  StagedOutput stage(out);
  const auto cells = cells_of(plan);

  std::map<std::string, LoadedAgent> agents;
  for (const auto& m : plan.methods)
    if (m.kind == MethodKind::kHrl) {
      HrlAgent a = load_agent(m.agent);
      for (const auto& t : plan.topologies) {
        const int n = resolve_topology(t).num_nodes();
        if (n != a.hl.arch().substrate_nodes)
          throw InvalidArgument("methods: " + m.spec + " was trained on " +
                                std::to_string(a.hl.arch().substrate_nodes) +
                                "-node substrates, topology " + t + " has " + std::to_string(n));
      }
      agents[m.label] = {std::move(a)};
    }

  // Scenarios are shared by every method of a cell.
  std::vector<Scenario> scenarios(cells.size() * plan.seeds.size());
  {
    std::vector<TopologySkeleton> skels;
    for (const Cell& c : cells) skels.push_back(resolve_topology(c.topology));
    parallel_for(static_cast<int>(scenarios.size()), ctx.jobs, [&](int i) {
      const std::size_t c = i / plan.seeds.size(), s = i % plan.seeds.size();
      scenarios[i] = generate_scenario(
          plan.cell_config(cells[c].topology, cells[c].rate, plan.seeds[s]), skels[c]);
    });
  }

  const std::size_t per_cell = plan.methods.size() * plan.seeds.size();
  std::vector<RunOutcome> runs(cells.size() * per_cell);
  std::vector<std::string> records(runs.size());
  parallel_for(static_cast<int>(runs.size()), ctx.jobs, [&](int i) {
    const std::size_t c = i / per_cell, rest = i % per_cell;
    const std::size_t m = rest / plan.seeds.size(), s = rest % plan.seeds.size();
    const MethodSpec& method = plan.methods[m];
    const Scenario& scn = scenarios[c * plan.seeds.size() + s];
    const std::uint64_t seed = plan.seeds[s];
    SimulationReport rep;
    RunOutcome& o = runs[i];
    switch (method.kind) {
      case MethodKind::kHeuristic: {
        auto pol = make_heuristic_policy(method.spec, seed, plan.k);
        rep = run(scn, *pol);
        break;
      }
      case MethodKind::kHrl: {
        const HrlAgent& a = agents.at(method.label).agent;
        HrlPolicy pol(a.hl, a.ll, a.settings, Mode::kEval, seed);
        rep = run(scn, pol);
        break;
      }
      case MethodKind::kOracle: {
        try {
          PathCache paths(scn.substrate, plan.k);
          MilpBuildOptions opts;
          opts.max_variables = plan.oracle.max_variables;
          const MilpModel model = build_milp(scn, paths, opts);
          const BnbResult res = solve_bnb(model, plan.oracle.time_budget_seconds);
          if (!res.has_incumbent) {
            o.note = "no incumbent within the time budget";
            return;
          }
          o.note = res.optimal ? "optimal" : "time budget reached, best incumbent";
          ReplayPolicy pol("oracle", res.solution.accepted);
          rep = run(scn, pol);
        } catch (const LimitExceeded& e) {
          o.note = e.what();
          return;
        }
        break;
      }
    }
    std::ostringstream csv;
    write_records_csv(rep, csv);
    records[i] = csv.str();
    o.metrics = metrics_of(rep, plan.revenue_reading);
    o.ok = true;
  });

  std::ostringstream runs_csv, results_csv;
  runs_csv << "topology,arrival_rate,method,group,seed,total,accepted,acceptance,revenue,cost,r2c,"
              "note\n";
  results_csv << "topology,arrival_rate,method,group,seeds,acceptance_mean,acceptance_std,"
                 "revenue_mean,revenue_std,r2c_mean,r2c_std\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::string topo = topology_slug(cells[c].topology);
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      const MethodSpec& method = plan.methods[m];
      std::vector<double> acc, rev, r2c;
      for (std::size_t s = 0; s < plan.seeds.size(); ++s) {
        const std::size_t i = c * per_cell + m * plan.seeds.size() + s;
        const RunOutcome& o = runs[i];
        const std::string seed = std::to_string(plan.seeds[s]);
        if (!o.ok) {
          warn(ctx, "no result for " + topo + " " + rate_dir(cells[c].rate) + " " + method.label +
                        " seed " + seed + ": " + o.note);
          continue;
        }
        const fs::path p = stage.dir() / "runs" / topo / rate_dir(cells[c].rate) / method.label /
                           ("seed-" + seed + ".csv");
        std::ofstream f = open_out(p);
        f << records[i];
        close_checked(f, p);
        const RunMetrics& r = o.metrics;
        runs_csv << topo << ',' << format_double(cells[c].rate) << ',' << method.label << ','
                 << method_group(method) << ',' << seed << ',' << r.total << ',' << r.accepted
                 << ',' << format_double(r.acceptance) << ',' << format_double(r.revenue) << ','
                 << format_double(r.cost) << ',' << format_double(r.r2c) << ',' << o.note << '\n';
        acc.push_back(r.acceptance);
        rev.push_back(r.revenue);
        r2c.push_back(r.r2c);
      }
      if (acc.empty()) continue;
      const MeanStd a = mean_std(acc), v = mean_std(rev), q = mean_std(r2c);
      results_csv << topo << ',' << format_double(cells[c].rate) << ',' << method.label << ','
                  << method_group(method) << ',' << a.n << ',' << format_double(a.mean) << ','
                  << format_double(a.std) << ',' << format_double(v.mean) << ','
                  << format_double(v.std) << ',' << format_double(q.mean) << ','
                  << format_double(q.std) << '\n';
    }
    log(ctx, "evaluated " + topo + " " + rate_dir(cells[c].rate));
  }
  for (const auto& [name, text] : {std::pair{"runs.csv", runs_csv.str()},
                                   std::pair{"results.csv", results_csv.str()}}) {
    const fs::path p = stage.dir() / name;
    std::ofstream f = open_out(p);
    f << text;
    close_checked(f, p);
  }
  write_json_file(plan.to_json(), stage.dir() / "plan.json");
  json agents_json = json::object();
  for (const auto& [label, a] : agents)
    agents_json[label] = {{"settings", a.agent.settings.to_json()},
                          {"hl_updates", a.agent.hl.updates},
                          {"ll_updates", a.agent.ll.updates}};
  write_json_file(provenance("evaluate", plan, ctx, {{"agents", agents_json}}),
                  stage.dir() / "provenance.json");
  stage.commit();
}

// ---- export-milp ---------------------------------------------------------------------

void cmd_export_milp(const ExperimentPlan& plan, const fs::path& out, const CommandContext& ctx) {
  plan.validate(false);
  StagedOutput stage(out);
  for (const Cell& c : cells_of(plan)) {
    const TopologySkeleton skel = resolve_topology(c.topology);
    for (std::uint64_t seed : plan.seeds) {
      const Scenario s = generate_scenario(plan.cell_config(c.topology, c.rate, seed), skel);
      const std::string name = topology_slug(c.topology) + "/" + rate_dir(c.rate) + "/seed-" +
                               std::to_string(seed);
      PathCache paths(s.substrate, plan.k);
      // The oracle's cap bounds the in-process solver; files only hit the build guard.
      try {
        const MilpModel model = build_milp(s, paths, MilpBuildOptions{});
        const fs::path p = stage.dir() / "milp" / (name + ".lp");
        fs::create_directories(p.parent_path());
        export_lp(model, p);
        log(ctx, "exported " + name + ".lp (" + std::to_string(model.num_vars()) + " variables)");
      } catch (const LimitExceeded& e) {
        throw LimitExceeded("scenario " + name + ": " + e.what());
      }
    }
  }
  write_json_file(plan.to_json(), stage.dir() / "plan.json");
  write_json_file(provenance("export-milp", plan, ctx), stage.dir() / "provenance.json");
  stage.commit();
}

void cmd_export_milp_files(const std::vector<fs::path>& files, int k, const fs::path& out,
                           const CommandContext& ctx) {
  if (files.empty()) throw InvalidArgument("no scenario files given");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  std::set<std::string> stems;
  for (const auto& f : files)
    if (!stems.insert(f.stem().string()).second)
      throw InvalidArgument("two scenario files share the name '" + f.stem().string() + "'");
  StagedOutput stage(out);
  json sources = json::array();
  for (const auto& f : files) {
    const Scenario s = load_scenario(f);
    PathCache paths(s.substrate, k);
    const MilpModel model = build_milp(s, paths);
    export_lp(model, stage.dir() / (f.stem().string() + ".lp"));
    sources.push_back(f.string());
    log(ctx, "exported " + f.stem().string() + ".lp");
  }
  json p = {{"tool", "vneap"},
            {"version", std::string(library_version())},
            {"command", "export-milp"},
            {"scenarios", sources},
            {"k", k}};
  if (!ctx.command_line.empty()) p["command_line"] = ctx.command_line;
  write_json_file(p, stage.dir() / "provenance.json");
  stage.commit();
}

// ---- report ----------------------------------------------------------------------------

namespace {

struct CellKey {
  std::string topology;  // slug
  double rate;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct MethodRow {
  std::string label, group;
  MeanStd metric[3];  // acceptance, revenue, r2c
};

constexpr const char* kMetrics[3] = {"acceptance", "revenue", "r2c"};

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

void cmd_report(const std::vector<fs::path>& results, const fs::path& out,
                const CommandContext& ctx) {
  if (results.empty()) throw InvalidArgument("report needs at least one evaluation directory");
  std::map<CellKey, std::vector<MethodRow>> table;
  std::vector<std::string> missing;
  json sources = json::array();
  for (const fs::path& dir : results) {
    const fs::path plan_file = dir / "plan.json";
    if (!fs::exists(plan_file))
      throw InvalidArgument(dir.string() + " is not an evaluation directory (no plan.json)");
    // Agent directories may have moved since; only the structure is needed.
    json pj = read_json_file(plan_file);
    ExperimentPlan plan = plan_from_json(pj, plan_file.string());
    sources.push_back({{"directory", dir.string()}, {"plan", pj}});
    for (const Cell& c : cells_of(plan)) {
      const CellKey key{topology_slug(c.topology), c.rate};
      for (const MethodSpec& m : plan.methods) {
        std::vector<double> v[3];
        for (std::uint64_t seed : plan.seeds) {
          const fs::path p = dir / "runs" / key.topology / rate_dir(c.rate) / m.label /
                             ("seed-" + std::to_string(seed) + ".csv");
          std::ifstream in(p);
          if (!in) {
            missing.push_back(key.topology + " " + rate_dir(c.rate) + " " + m.label + " seed " +
                              std::to_string(seed));
            continue;
          }
          const RunMetrics r = metrics_from_records_csv(in, plan.revenue_reading, p.string());
          v[0].push_back(r.acceptance);
          v[1].push_back(r.revenue);
          v[2].push_back(r.r2c);
        }
        if (v[0].empty()) {
          missing.push_back(key.topology + " " + rate_dir(c.rate) + " " + m.label +
                            " (whole cell)");
          continue;
        }
        auto& rows = table[key];
        if (std::any_of(rows.begin(), rows.end(),
                        [&](const MethodRow& r) { return r.label == m.label; }))
          throw InvalidArgument("method " + m.label + " appears twice for " + key.topology + " " +
                                rate_dir(c.rate));
        rows.push_back({m.label, method_group(m), {mean_std(v[0]), mean_std(v[1]), mean_std(v[2])}});
      }
    }
  }
  for (const auto& m : missing) warn(ctx, "missing results: " + m);
  if (table.empty()) throw InvalidArgument("no evaluation results found");

  StagedOutput stage(out);
  std::ostringstream groups, txt;
  groups << "topology,arrival_rate,metric,no_exploit,exploit,ours,oracle,gap_ours_vs_no_exploit,"
            "gap_ours_vs_exploit,gap_exploit_vs_no_exploit,gap_ours_vs_oracle\n";
  for (int k = 0; k < 3; ++k) {
    std::ostringstream t, plot;
    t << "topology,arrival_rate,method,group,seeds,mean,std,gap_vs_best_baseline,gap_vs_oracle\n";
    plot << "topology,series,group,style,arrival_rate,mean,std\n";
    txt << kMetrics[k] << "\n";
    txt << pad("topology", 12) << pad("eta", 6) << pad("method", 26) << pad("group", 12)
        << pad("mean", 14) << pad("std", 14) << pad("gap/best", 12) << "gap/oracle\n";
    for (const auto& [key, rows] : table) {
      std::optional<double> best, oracle, group_best[2];
      for (const MethodRow& r : rows) {
        const double x = r.metric[k].mean;
        if (r.group == "No exploit" || r.group == "Exploit") {
          best = best ? std::max(*best, x) : x;
          auto& g = group_best[r.group == "Exploit"];
          g = g ? std::max(*g, x) : x;
        }
        if (r.group == "Oracle") oracle = x;
      }
      std::optional<double> ours;
      for (const MethodRow& r : rows) {
        const MeanStd& s = r.metric[k];
        std::optional<double> gb, go;
        if (r.group == "Ours") {
          if (best) gb = relative_gap(s.mean, *best);
          if (oracle) go = relative_gap(s.mean, *oracle);
          ours = ours ? std::max(*ours, s.mean) : s.mean;
        }
        t << key.topology << ',' << format_double(key.rate) << ',' << r.label << ',' << r.group
          << ',' << s.n << ',' << format_double(s.mean) << ',' << format_double(s.std) << ','
          << opt_str(gb) << ',' << opt_str(go) << '\n';
        plot << key.topology << ',' << r.label << ',' << r.group << ','
             << (r.group == "Oracle" ? "dashed" : "solid") << ',' << format_double(key.rate) << ','
             << format_double(s.mean) << ',' << format_double(s.std) << '\n';
        char num[64];
        std::snprintf(num, sizeof num, "%.6g", s.mean);
        std::string mean = num;
        std::snprintf(num, sizeof num, "%.6g", s.std);
        std::string sd = num;
        auto pct = [](const std::optional<double>& g) {
          if (!g) return std::string("-");
          char b[32];
          std::snprintf(b, sizeof b, "%+.1f%%", 100 * *g);
          return std::string(b);
        };
        txt << pad(key.topology, 12) << pad(format_double(key.rate), 6) << pad(r.label, 26)
            << pad(r.group, 12) << pad(mean, 14) << pad(sd, 14) << pad(pct(gb), 12) << pct(go)
            << '\n';
      }
      auto gap = [](const std::optional<double>& a, const std::optional<double>& b) {
        return a && b ? relative_gap(*a, *b) : std::nullopt;
      };
      groups << key.topology << ',' << format_double(key.rate) << ',' << kMetrics[k] << ','
             << opt_str(group_best[0]) << ',' << opt_str(group_best[1]) << ',' << opt_str(ours)
             << ',' << opt_str(oracle) << ',' << opt_str(gap(ours, group_best[0])) << ','
             << opt_str(gap(ours, group_best[1])) << ','
             << opt_str(gap(group_best[1], group_best[0])) << ',' << opt_str(gap(ours, oracle))
             << '\n';
    }
    txt << '\n';
    for (const auto& [name, text] :
         {std::pair{fs::path("tables") / (std::string(kMetrics[k]) + ".csv"), t.str()},
          std::pair{fs::path("plots") / (std::string(kMetrics[k]) + ".csv"), plot.str()}}) {
      const fs::path p = stage.dir() / name;
      std::ofstream f = open_out(p);
      f << text;
      close_checked(f, p);
    }
  }
  if (!missing.empty()) {
    txt << "missing results:\n";
    for (const auto& m : missing) txt << "  " << m << '\n';
  }
  std::ostringstream miss;
  for (const auto& m : missing) miss << m << '\n';
  for (const auto& [name, text] : {std::pair{"groups.csv", groups.str()},
                                   std::pair{"summary.txt", txt.str()},
                                   std::pair{"missing.txt", miss.str()}}) {
    const fs::path p = stage.dir() / name;
    std::ofstream f = open_out(p);
    f << text;
    close_checked(f, p);
  }
  json prov = {{"tool", "vneap"},
               {"version", std::string(library_version())},
               {"command", "report"},
               {"sources", sources},
               {"gap_definition", "(ours - reference) / |reference|, empty when reference is 0"},
               {"group_value", "best mean among the group's methods"}};
  if (!ctx.command_line.empty()) prov["command_line"] = ctx.command_line;
  write_json_file(prov, stage.dir() / "provenance.json");
  stage.commit();
}

}  // namespace vneap
