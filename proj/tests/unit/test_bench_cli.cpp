#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "instances.hpp"
#include "vneap/error.hpp"
#include "vneap/exact.hpp"
#include "vneap/experiment.hpp"
#include "vneap/milp.hpp"
#include "vneap/policies.hpp"
#include "vneap/scenario_io.hpp"

using namespace vneap;
using namespace vneap::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "vneap_bench_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d.parent_path());
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Row = std::map<std::string, std::string>;

std::vector<Row> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::string> header;
  std::vector<Row> rows;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  if (std::getline(in, line)) header = split(line);
  while (std::getline(in, line)) {
    auto f = split(line);
    Row r;
    for (std::size_t i = 0; i < header.size() && i < f.size(); ++i) r[header[i]] = f[i];
    rows.push_back(r);
  }
  return rows;
}

ExperimentPlan small_plan(std::vector<std::string> methods, int seeds = 3) {
  ExperimentPlan p;
  p.scenario.vnr_count = 6;
  p.scenario.alternatives_per_vnr = 3;
  p.scenario.base_max_nodes = 4;
  p.topologies = {"builtin:ring-5"};
  p.arrival_rates = {0.5};
  p.seeds.resize(seeds);
  p.rebase_seeds(11);
  for (const auto& m : methods) p.methods.push_back(parse_method(m));
  p.train.episodes = 0;
  p.train.settings.max_alternatives = 3;
  p.oracle.time_budget_seconds = 20;
  return p;
}

// Untrained agent for the ring-5 plans (0 episodes: initial parameters).
const fs::path& untrained_agent() {
  static const fs::path dir = [] {
    fs::path d = fresh_dir("agent");
    cmd_train(small_plan({}), d, {});
    return d / "agent";
  }();
  return dir;
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

// ---- plans --------------------------------------------------------------------------

TEST(Plan, Defaults) {
  ExperimentPlan p = plan_from_json(json::object());
  ASSERT_EQ(p.seeds.size(), 10u);
  EXPECT_EQ(p.seeds.front(), 1u);
  EXPECT_EQ(p.seeds.back(), 10u);
  ASSERT_EQ(p.methods.size(), 2u);
  EXPECT_EQ(method_group(p.methods[0]), "No exploit");
  EXPECT_EQ(method_group(p.methods[1]), "Exploit");
  EXPECT_EQ(p.revenue_reading, RevenueReading::kAccepted);
  EXPECT_NO_THROW(p.validate());
}

TEST(Plan, JsonRoundTrip) {
  ExperimentPlan p = small_plan({"noexploit-random+greedy", "oracle"});
  p.arrival_rates = {0.5, 0.8};
  p.train.ppo.gamma = 0.9;
  p.train.arrival_rate = 0.8;
  p.revenue_reading = RevenueReading::kAllArrivals;
  const json j = p.to_json();
  ExperimentPlan q = plan_from_json(j);
  EXPECT_EQ(q.to_json(), j);
  EXPECT_EQ(q.seeds, p.seeds);
  EXPECT_EQ(q.train.ppo.gamma, 0.9);
}

TEST(Plan, BareScenarioConfigIsOneCell) {
  ScenarioConfig c;
  c.substrate = "builtin:ring-5";
  c.seed = 42;
  c.arrival_rate = 0.8;
  ExperimentPlan p = plan_from_json(config_to_json(c));
  EXPECT_EQ(p.topologies, std::vector<std::string>{"builtin:ring-5"});
  EXPECT_EQ(p.arrival_rates, std::vector<double>{0.8});
  EXPECT_EQ(p.seeds, std::vector<std::uint64_t>{42});
  p.rebase_seeds(7);
  EXPECT_EQ(p.seeds, std::vector<std::uint64_t>{7});
}

TEST(Plan, ErrorsNameFieldAndFile) {
  const fs::path dir = fresh_dir("plan_errors");
  fs::create_directories(dir);
  auto message_of = [&](const std::string& text) -> std::string {
    const fs::path f = dir / "plan.json";
    std::ofstream(f) << text;
    try {
      load_plan(f);
    } catch (const Error& e) {
      return e.what();
    }
    return "";
  };
  const std::string file = (dir / "plan.json").string();
  auto expect_has = [&](const std::string& msg, std::vector<std::string> parts) {
    ASSERT_FALSE(msg.empty());
    EXPECT_NE(msg.find(file), std::string::npos) << msg;
    for (const auto& s : parts) EXPECT_NE(msg.find(s), std::string::npos) << msg;
  };
  expect_has(message_of(R"({"method": ["oracle"]})"), {"unknown field 'method'"});
  expect_has(message_of(R"({"scenario": {"vnr_count": "x"}})"), {"vnr_count"});
  expect_has(message_of(R"({"k": 1.5})"), {"'k'"});
  expect_has(message_of(R"({"train": {"epochs": 3}})"), {"train", "'epochs'"});
  expect_has(message_of(R"({"seeds": [1, 2, 2]})"), {"seeds", "distinct"});
  expect_has(message_of(R"({"methods": ["best-ever"]})"), {"methods", "best-ever"});
  // A missing agent is fine for training (which creates it) but not for evaluation.
  EXPECT_EQ(message_of(R"({"methods": ["hrl:no/such/agent"]})"), "");
  {
    std::ofstream(dir / "plan.json") << R"({"methods": ["hrl:no/such/agent"]})";
    std::string msg;
    try {
      cmd_evaluate(load_plan(dir / "plan.json"), dir / "ev", CommandContext{});
    } catch (const Error& e) {
      msg = e.what();
    }
    EXPECT_NE(msg.find("agent.json"), std::string::npos) << msg;
    EXPECT_FALSE(fs::exists(dir / "ev"));
  }
  expect_has(message_of(R"({"topologies": ["builtin:nowhere"]})"), {"topologies"});
  expect_has(message_of(R"({"seeds": [1], "seed": 3})"), {"seeds"});
  expect_has(message_of(R"({"revenue_reading": "all"})"), {"revenue_reading"});
  expect_has(message_of(R"({"scenario": {"vnr_count": 0}})"), {"scenario"});
}

TEST(Plan, AgentPathsRelativeToPlanFile) {
  const fs::path dir = fresh_dir("plan_relative");
  fs::create_directories(dir / "agents");
  fs::copy(untrained_agent(), dir / "agents" / "a");
  std::ofstream(dir / "plan.json") << R"({"topologies": ["builtin:ring-5"],
      "methods": ["hrl:agents/a"], "train": {"max_alternatives": 3}})";
  ExperimentPlan p = load_plan(dir / "plan.json");
  EXPECT_EQ(p.methods[0].agent, dir / "agents" / "a");
  EXPECT_EQ(method_group(p.methods[0]), "Ours");
}

// ---- statistics --------------------------------------------------------------------

TEST(Stats, MeanAndSampleStd) {
  MeanStd m = mean_std({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_NEAR(m.std, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(m.n, 8);
  EXPECT_EQ(mean_std({3}).std, 0.0);
}

TEST(Stats, RelativeGapIsSigned) {
  EXPECT_DOUBLE_EQ(*relative_gap(110, 100), 0.1);
  EXPECT_DOUBLE_EQ(*relative_gap(90, 100), -0.1);
  EXPECT_DOUBLE_EQ(*relative_gap(100, 100), 0.0);
  EXPECT_FALSE(relative_gap(5, 0).has_value());
}

TEST(Metrics, RecordsCsvReproducesReport) {
  ScenarioConfig c;
  c.substrate = "builtin:ring-5";
  c.vnr_count = 12;
  c.seed = 3;
  const Scenario s = generate_scenario(c);
  auto pol = make_heuristic_policy("exploit-maxrev+greedy", 3);
  const SimulationReport rep = run(s, *pol);
  std::stringstream csv;
  write_records_csv(rep, csv);
  for (RevenueReading r : {RevenueReading::kAccepted, RevenueReading::kAllArrivals}) {
    std::stringstream in(csv.str());
    const RunMetrics a = metrics_from_records_csv(in, r), b = metrics_of(rep, r);
    EXPECT_EQ(a.total, b.total);
    EXPECT_EQ(a.accepted, b.accepted);
    EXPECT_EQ(a.acceptance, b.acceptance);
    EXPECT_EQ(a.revenue, b.revenue);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_EQ(a.r2c, b.r2c);
  }
  EXPECT_GE(metrics_of(rep, RevenueReading::kAllArrivals).revenue,
            metrics_of(rep, RevenueReading::kAccepted).revenue);
  std::stringstream bad("vnr_id,outcome\n0,accepted\n");
  EXPECT_THROW(metrics_from_records_csv(bad, RevenueReading::kAccepted), ParseError);
}

// ---- commands ----------------------------------------------------------------------

TEST(Generate, WritesScenariosAndProvenance) {
  ExperimentPlan p = small_plan({});
  p.arrival_rates = {0.5, 0.8};
  const fs::path out = fresh_dir("generate");
  cmd_generate(p, out, {});
  for (double r : {0.5, 0.8})
    for (std::uint64_t seed : p.seeds) {
      const fs::path f = out / "scenarios" / "ring-5" / ("eta-" + format_double(r)) /
                         ("seed-" + std::to_string(seed) + ".json");
      ASSERT_TRUE(fs::exists(f)) << f;
      EXPECT_EQ(load_scenario(f), generate_scenario(p.cell_config("builtin:ring-5", r, seed)));
    }
  const json prov = read_json_file(out / "provenance.json");
  EXPECT_EQ(prov["command"], "generate");
  EXPECT_EQ(prov["seeds"], json(p.seeds));
  EXPECT_TRUE(prov.contains("version"));
  EXPECT_TRUE(prov["constants"].contains("feasibility_tolerance"));
  EXPECT_FALSE(fs::exists(out.string() + ".partial"));
}

TEST(Evaluate, DeterministicAcrossJobCounts) {
  ExperimentPlan p = small_plan(
      {"noexploit-random+greedy", "exploit-maxrev+greedy", "hrl:" + untrained_agent().string()});
  const fs::path a = fresh_dir("eval_a"), b = fresh_dir("eval_b");
  CommandContext one, three;
  three.jobs = 3;
  cmd_evaluate(p, a, one);
  cmd_evaluate(p, b, three);
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 3 * 3 + 4);  // per-seed records, runs, results, plan, provenance

  // The random baseline's mean acceptance is a pure function of the seeds.
  double acc = 0;
  for (std::uint64_t seed : p.seeds) {
    auto pol = make_heuristic_policy("noexploit-random+greedy", seed);
    acc += run(generate_scenario(p.cell_config("builtin:ring-5", 0.5, seed)), *pol)
               .acceptance_ratio;
  }
  const auto results = read_csv(a / "results.csv");
  ASSERT_EQ(results.size(), 3u);
  EXPECT_EQ(results[0].at("method"), "noexploit-random+greedy");
  EXPECT_NEAR(num(results[0].at("acceptance_mean")), acc / p.seeds.size(), 1e-12);
}

TEST(Report, ConsistentWithEvaluationAndGrouped) {
  ExperimentPlan p = small_plan(
      {"noexploit-random+greedy", "exploit-maxrev+greedy", "hrl:" + untrained_agent().string()});
  p.arrival_rates = {0.5, 0.8};
  const fs::path ev = fresh_dir("report_ev"), rep = fresh_dir("report_out");
  cmd_evaluate(p, ev, {});
  std::ostringstream warnings;
  CommandContext ctx;
  ctx.warn = &warnings;
  cmd_report({ev}, rep, ctx);
  EXPECT_EQ(warnings.str(), "");
  EXPECT_EQ(slurp(rep / "missing.txt"), "");

  const auto results = read_csv(ev / "results.csv");
  for (const char* metric : {"acceptance", "revenue", "r2c"}) {
    const auto table = read_csv(rep / "tables" / (std::string(metric) + ".csv"));
    ASSERT_EQ(table.size(), results.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      EXPECT_EQ(table[i].at("method"), results[i].at("method"));
      EXPECT_EQ(table[i].at("group"), results[i].at("group"));
      EXPECT_EQ(table[i].at("mean"), results[i].at(std::string(metric) + "_mean")) << metric << i;
      EXPECT_EQ(table[i].at("std"), results[i].at(std::string(metric) + "_std")) << metric << i;
    }
    // gap = (ours - best baseline) / best baseline, signed, only on our rows
    for (std::size_t i = 0; i < table.size(); i += 3) {
      const double best = std::max(num(table[i].at("mean")), num(table[i + 1].at("mean")));
      EXPECT_EQ(table[i].at("gap_vs_best_baseline"), "");
      EXPECT_EQ(table[i + 1].at("gap_vs_best_baseline"), "");
      EXPECT_EQ(table[i + 2].at("group"), "Ours");
      if (best != 0)
        EXPECT_NEAR(num(table[i + 2].at("gap_vs_best_baseline")),
                    (num(table[i + 2].at("mean")) - best) / best, 1e-12);
      EXPECT_EQ(table[i + 2].at("gap_vs_oracle"), "");
    }
  }
  std::set<std::string> groups;
  for (const auto& r : results) groups.insert(r.at("group"));
  EXPECT_EQ(groups, (std::set<std::string>{"No exploit", "Exploit", "Ours"}));

  const auto g = read_csv(rep / "groups.csv");
  ASSERT_EQ(g.size(), 6u);  // 2 rates x 3 metrics
  for (const auto& r : g) {
    EXPECT_NE(r.at("no_exploit"), "");
    EXPECT_NE(r.at("exploit"), "");
    EXPECT_NE(r.at("ours"), "");
    EXPECT_EQ(r.at("oracle"), "");
    const double ne = num(r.at("no_exploit")), ex = num(r.at("exploit")), us = num(r.at("ours"));
    if (ex != 0) EXPECT_NEAR(num(r.at("gap_ours_vs_exploit")), (us - ex) / ex, 1e-12);
    if (ne != 0) EXPECT_NEAR(num(r.at("gap_exploit_vs_no_exploit")), (ex - ne) / ne, 1e-12);
  }
  const auto plot = read_csv(rep / "plots" / "revenue.csv");
  EXPECT_EQ(plot.size(), 6u);
  for (const auto& r : plot) EXPECT_EQ(r.at("style"), "solid");
  EXPECT_NE(slurp(rep / "summary.txt").find("No exploit"), std::string::npos);
}

TEST(Report, SingleCellOneRowEmptyGaps) {
  ExperimentPlan p = small_plan({"noexploit-random+greedy"}, 2);
  const fs::path ev = fresh_dir("single_ev"), rep = fresh_dir("single_rep");
  cmd_evaluate(p, ev, {});
  cmd_report({ev}, rep, {});
  const auto t = read_csv(rep / "tables" / "acceptance.csv");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].at("gap_vs_best_baseline"), "");
  EXPECT_EQ(t[0].at("gap_vs_oracle"), "");
  EXPECT_EQ(t[0].at("seeds"), "2");
}

TEST(Report, OracleIsDashedReference) {
  ExperimentPlan p = small_plan({"exploit-maxrev+greedy", "oracle",
                                 "hrl:" + untrained_agent().string()}, 2);
  p.scenario.vnr_count = 3;
  p.scenario.base_max_nodes = 3;
  const fs::path ev = fresh_dir("oracle_ev"), rep = fresh_dir("oracle_rep");
  cmd_evaluate(p, ev, {});
  cmd_report({ev}, rep, {});
  const auto plot = read_csv(rep / "plots" / "revenue.csv");
  ASSERT_EQ(plot.size(), 3u);
  for (const auto& r : plot) EXPECT_EQ(r.at("style"), r.at("series") == "oracle" ? "dashed" : "solid");
  const auto t = read_csv(rep / "tables" / "revenue.csv");
  const Row& ours = t[2];
  ASSERT_EQ(ours.at("group"), "Ours");
  const double oracle = num(t[1].at("mean"));
  if (oracle != 0)
    EXPECT_NEAR(num(ours.at("gap_vs_oracle")), (num(ours.at("mean")) - oracle) / oracle, 1e-12);
  // The exact solver's plan is never worse than the heuristic on its own objective.
  const auto runs = read_csv(ev / "runs.csv");
  for (const auto& r : runs)
    if (r.at("method") == "oracle") EXPECT_EQ(r.at("note"), "optimal");
}

TEST(Report, MissingResultsAreWarnedNotDropped) {
  ExperimentPlan p = small_plan({"noexploit-random+greedy", "exploit-maxrev+greedy"});
  const fs::path ev = fresh_dir("missing_ev"), rep = fresh_dir("missing_rep");
  cmd_evaluate(p, ev, {});
  const fs::path runs = ev / "runs" / "ring-5" / "eta-0.5";
  fs::remove(runs / "noexploit-random+greedy" / "seed-12.csv");
  fs::remove_all(runs / "exploit-maxrev+greedy");
  std::ostringstream warnings;
  CommandContext ctx;
  ctx.warn = &warnings;
  cmd_report({ev}, rep, ctx);
  EXPECT_NE(warnings.str().find("noexploit-random+greedy seed 12"), std::string::npos);
  EXPECT_NE(warnings.str().find("exploit-maxrev+greedy (whole cell)"), std::string::npos);
  const std::string missing = slurp(rep / "missing.txt");
  EXPECT_NE(missing.find("seed 12"), std::string::npos);
  EXPECT_NE(missing.find("whole cell"), std::string::npos);
  EXPECT_NE(slurp(rep / "summary.txt").find("missing results"), std::string::npos);
  const auto t = read_csv(rep / "tables" / "acceptance.csv");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].at("seeds"), "2");
}

TEST(Report, NothingToReport) {
  EXPECT_THROW(cmd_report({}, fresh_dir("none"), {}), InvalidArgument);
  EXPECT_THROW(cmd_report({fresh_dir("not_eval")}, fresh_dir("none2"), {}), InvalidArgument);
}

TEST(Staging, FailedCommandLeavesNothing) {
  // An agent for 5-node substrates cannot run on Atlanta.
  ExperimentPlan p = small_plan({"noexploit-random+greedy", "hrl:" + untrained_agent().string()});
  p.topologies = {"builtin:atlanta"};
  const fs::path out = fresh_dir("staging");
  EXPECT_THROW(cmd_evaluate(p, out, {}), InvalidArgument);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(out.string() + ".partial"));

  // The oracle's variable cap limits solving, not exporting.
  ExperimentPlan q = small_plan({});
  q.oracle.max_variables = 10;
  cmd_export_milp(q, out, {});
  EXPECT_TRUE(fs::exists(out / "milp"));
  EXPECT_FALSE(fs::exists(out.string() + ".partial"));
}

TEST(Staging, RefusesNonEmptyOutput) {
  const fs::path out = fresh_dir("nonempty");
  fs::create_directories(out);
  std::ofstream(out / "keep.txt") << "x";
  EXPECT_THROW(cmd_generate(small_plan({}), out, {}), InvalidArgument);
  EXPECT_THROW(cmd_train(small_plan({}), out, {}), InvalidArgument);
  EXPECT_EQ(slurp(out / "keep.txt"), "x");
}

TEST(Train, WritesAgentAndProvenance) {
  ExperimentPlan p = small_plan({});
  p.train.episodes = 4;
  p.train.checkpoint_every = 2;
  p.train.rollouts_per_update = 2;
  const fs::path out = fresh_dir("train");
  CommandContext ctx;
  ctx.jobs = 2;
  const TrainResult r = cmd_train(p, out, ctx);
  EXPECT_EQ(r.curve.size(), 4u);
  EXPECT_TRUE(fs::exists(out / "agent" / "agent.json"));
  EXPECT_TRUE(fs::exists(out / "checkpoints" / "episode_000002"));
  EXPECT_TRUE(fs::exists(out / "curves.csv"));
  const json prov = read_json_file(out / "provenance.json");
  EXPECT_EQ(prov["command"], "train");
  EXPECT_EQ(prov["training"]["seed"], p.seeds.front());
  const HrlAgent a = load_agent(out / "agent");
  EXPECT_EQ(a.hl.updates, r.agent.hl.updates);
}

// Exported LP, evaluated at the exhaustive optimum, gives the exhaustive
// objective; no assignment of the LP's binaries does better.
TEST(ExportMilp, ObjectivesMatchExhaustive) {
  int brute_checked = 0;
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    const SmallInstance inst = random_small_instance(seed);
    const fs::path dir = fresh_dir("export_" + std::to_string(seed));
    fs::create_directories(dir);
    save_scenario(inst.scenario, dir / "inst.json");
    cmd_export_milp_files({dir / "inst.json"}, inst.k, dir / "lp", {});
    const LpProblem lp = read_lp_file(dir / "lp" / "inst.lp");
    PathCache pc(inst.scenario.substrate, inst.k);
    const MilpModel m = build_milp(inst.scenario, pc);
    const ExactSolution ex = solve_exhaustive(inst.scenario, pc);

    std::map<std::string, int> value;
    for (const MilpVar& v : m.vars) {
      bool on = false;
      auto it = ex.accepted.find(v.vnr_id);
      if (it != ex.accepted.end() && it->second.alternative == v.alternative) {
        const Embedding& e = it->second;
        if (v.kind == VarKind::kY) on = true;
        if (v.kind == VarKind::kX) on = e.node_map[v.node] == v.host;
        if (v.kind == VarKind::kW) on = e.link_paths[v.link] == m.paths[v.path];
      }
      value[v.name] = on;
    }
    auto evaluate = [&](const std::vector<int>& x, double& obj) {
      obj = 0;
      for (const LinearTerm& t : lp.objective) obj += t.coef * x[t.var];
      for (const MilpRow& r : lp.rows) {
        double lhs = 0;
        for (const LinearTerm& t : r.terms) lhs += t.coef * x[t.var];
        if (r.sense == RowSense::kLe && lhs > r.rhs + 1e-9) return false;
        if (r.sense == RowSense::kGe && lhs < r.rhs - 1e-9) return false;
        if (r.sense == RowSense::kEq && std::abs(lhs - r.rhs) > 1e-9) return false;
      }
      return true;
    };
    std::vector<int> x(lp.var_names.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = value.at(lp.var_names[i]);
    double obj = 0;
    ASSERT_TRUE(evaluate(x, obj)) << "seed " << seed;
    EXPECT_NEAR(obj, ex.objective, 1e-9) << "seed " << seed;

    if (x.size() <= 18) {
      double best = -1e300;
      for (std::uint32_t mask = 0; mask < (1u << x.size()); ++mask) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (mask >> i) & 1;
        if (evaluate(x, obj)) best = std::max(best, obj);
      }
      EXPECT_NEAR(best, ex.objective, 1e-9) << "seed " << seed;
      ++brute_checked;
    }
  }
  EXPECT_GE(brute_checked, 3);
}

#ifdef VNEAP_CLI
namespace {
int cli(const std::string& args) {
  const std::string cmd = std::string(VNEAP_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = fresh_dir("cli");
  fs::create_directories(dir);
  std::ofstream(dir / "plan.json") << R"({"scenario": {"vnr_count": 4, "base_max_nodes": 3},
      "topologies": ["builtin:ring-5"], "seed_count": 2})";
  std::ofstream(dir / "bad.json") << R"({"scenario": {"vnr_cont": 4}})";
  const std::string plan = (dir / "plan.json").string(), bad = (dir / "bad.json").string();
  EXPECT_EQ(cli("generate --config " + plan + " --seed 5 --out " + (dir / "gen").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "gen" / "scenarios" / "ring-5" / "eta-0.5" / "seed-6.json"));
  EXPECT_EQ(cli("evaluate --config " + plan + " --jobs 2 --out " + (dir / "ev").string()), 0);
  EXPECT_EQ(cli("report " + (dir / "ev").string() + " --out " + (dir / "rep").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "rep" / "groups.csv"));
  EXPECT_EQ(cli("export-milp --config " + plan + " --out " + (dir / "lp").string()), 0);
  EXPECT_NE(cli("generate --config " + bad + " --out " + (dir / "x").string()), 0);
  EXPECT_FALSE(fs::exists(dir / "x"));
  EXPECT_NE(cli("generate --config " + plan + " --out " + (dir / "gen").string()), 0);
  EXPECT_NE(cli("evaluate --config " + plan + " --jobs 0 --out " + (dir / "y").string()), 0);
  EXPECT_NE(cli("frobnicate"), 0);
  EXPECT_NE(cli(""), 0);
}
#endif
