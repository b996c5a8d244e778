#ifndef VNEAP_EXPERIMENT_HPP_
#define VNEAP_EXPERIMENT_HPP_

// Experiment orchestration behind the command-line tool: plans, scenario
// generation, training, evaluation across methods, MILP export and reports.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vneap/hrl.hpp"
#include "vneap/scenario.hpp"
#include "vneap/simulator.hpp"

namespace vneap {

std::string_view library_version();

enum class MethodKind { kHeuristic, kHrl, kOracle };

struct MethodSpec {
  std::string spec;  // as written in the plan
  MethodKind kind = MethodKind::kHeuristic;
  std::filesystem::path agent;  // hrl: agent directory (resolved)

  /// Name used in tables and directory names: the heuristic name, "hrl"
  /// (or "hrl-<dir name>" when a plan has several agents) and "oracle".
  std::string label;
};

/// "hrl:<agent dir>", "oracle" or a heuristic name. Relative agent paths are
/// resolved against base_dir. Throws InvalidArgument.
MethodSpec parse_method(std::string_view spec, const std::filesystem::path& base_dir = {});

/// "No exploit", "Exploit", "Ours" or "Oracle".
std::string method_group(const MethodSpec& m);

enum class RevenueReading { kAccepted, kAllArrivals };
std::string_view to_string(RevenueReading r);
RevenueReading revenue_reading_from_string(std::string_view s);

struct TrainPlan {
  int episodes = 300;
  int rollouts_per_update = 4;
  int checkpoint_every = 50;
  std::string topology;         // empty: first plan topology
  std::optional<double> arrival_rate;  // unset: first plan rate
  HrlSettings settings;         // reward_scale and mean_lifetime are derived
  PpoConfig ppo;
};

struct OraclePlan {
  double time_budget_seconds = 10.0;
  std::size_t max_variables = 200'000;
};

struct ExperimentPlan {
  /// Base scenario parameters; substrate, arrival_rate and seed are set
  /// per cell.
  ScenarioConfig scenario;
  std::vector<std::string> topologies;
  std::vector<double> arrival_rates;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodSpec> methods;
  int k = kDefaultK;
  RevenueReading revenue_reading = RevenueReading::kAccepted;
  TrainPlan train;
  OraclePlan oracle;

  /// Replaces the seed list by base, base+1, ... (same count).
  void rebase_seeds(std::uint64_t base);
  /// Throws InvalidArgument naming the offending field: empty lists,
  /// repeated seeds, rates, topologies or labels, unknown topologies,
  /// bad numbers, and (when require_agents) missing agent directories.
  /// Only evaluation needs the agents; train produces them.
  void validate(bool require_agents = true) const;
  ScenarioConfig cell_config(const std::string& topology, double arrival_rate,
                             std::uint64_t seed) const;
  nlohmann::json to_json() const;
};

/// Unknown keys and wrong types throw FormatError naming the field and
/// origin; see docs/formats.md for the schema.
ExperimentPlan plan_from_json(const nlohmann::json& j, std::string_view origin = "plan",
                              const std::filesystem::path& base_dir = {});
ExperimentPlan load_plan(const std::filesystem::path& path);

/// Directory-safe name: the builtin name, or the file stem.
std::string topology_slug(std::string_view topology);

// ---- statistics --------------------------------------------------------------

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for fewer than 2 values
  int n = 0;
};
MeanStd mean_std(const std::vector<double>& values);

/// Signed relative gap (ours - reference) / |reference|; empty when the
/// reference is 0.
std::optional<double> relative_gap(double ours, double reference);

// ---- run metrics ---------------------------------------------------------------

struct RunMetrics {
  int total = 0;
  int accepted = 0;
  double acceptance = 0.0;
  double revenue = 0.0;  // per the revenue reading
  double cost = 0.0;
  double r2c = 0.0;
};

RunMetrics metrics_of(const SimulationReport& report, RevenueReading reading);

/// Recomputes the metrics from a per-request CSV (write_records_csv).
/// Throws ParseError on malformed rows.
RunMetrics metrics_from_records_csv(std::istream& in, RevenueReading reading,
                                    std::string_view origin = "records");

// ---- commands ------------------------------------------------------------------

struct CommandContext {
  int jobs = 1;
  std::ostream* log = nullptr;   // progress, may be null
  std::ostream* warn = nullptr;  // warnings, may be null
  std::string command_line;      // recorded in provenance
};

/// out/scenarios/<topology>/eta-<rate>/seed-<seed>.json, plan.json,
/// provenance.json.
void cmd_generate(const ExperimentPlan& plan, const std::filesystem::path& out,
                  const CommandContext& ctx);

/// out/curves.csv, out/checkpoints/, out/agent/, plan.json, provenance.json.
/// Unlike the other commands a failed run keeps its checkpoints and curves.
TrainResult cmd_train(const ExperimentPlan& plan, const std::filesystem::path& out,
                      const CommandContext& ctx);

/// Every (topology, rate, method, seed): out/runs/.../seed-<seed>.csv
/// per-request records, plus runs.csv, results.csv (mean and standard
/// deviation per cell), plan.json and provenance.json.
void cmd_evaluate(const ExperimentPlan& plan, const std::filesystem::path& out,
                  const CommandContext& ctx);

/// out/milp/<topology>/eta-<rate>/seed-<seed>.lp for every plan scenario.
void cmd_export_milp(const ExperimentPlan& plan, const std::filesystem::path& out,
                     const CommandContext& ctx);
/// out/<stem>.lp for each scenario file.
void cmd_export_milp_files(const std::vector<std::filesystem::path>& scenarios, int k,
                           const std::filesystem::path& out, const CommandContext& ctx);

/// Tables per metric (tables/<metric>.csv), the three-group comparison
/// (groups.csv), plot series (plots/<metric>.csv), summary.txt and
/// provenance.json, recomputed from the per-request CSVs of one or more
/// evaluation directories. Cells or seeds without records are reported as
/// warnings and listed in missing.txt.
void cmd_report(const std::vector<std::filesystem::path>& results,
                const std::filesystem::path& out, const CommandContext& ctx);

}  // namespace vneap

#endif  // VNEAP_EXPERIMENT_HPP_
