// vneap: scenario generation, training, evaluation, MILP export and reports.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vneap/error.hpp"
#include "vneap/experiment.hpp"

namespace fs = std::filesystem;
using namespace vneap;

namespace {

struct Common {
  fs::path config;
  fs::path out;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::string reading;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* cfg = cmd->add_option("--config", c.config, "Experiment plan or scenario config (JSON)")
                  ->check(CLI::ExistingFile);
  if (needs_config) cfg->required();
  cmd->add_option("--seed", c.seed, "Base seed; seeds become base, base+1, ...");
  cmd->add_option("--out", c.out, "Output directory (must not exist or be empty)")->required();
  cmd->add_option("--jobs", c.jobs, "Worker threads (default: hardware threads)")
      ->check(CLI::Range(1, 4096));
  cmd->add_flag("-q,--quiet", c.quiet, "Only print warnings and errors");
}

ExperimentPlan plan_for(const Common& c, bool require_agents = false) {
  ExperimentPlan plan = load_plan(c.config);
  if (c.seed) plan.rebase_seeds(*c.seed);
  if (!c.reading.empty()) plan.revenue_reading = revenue_reading_from_string(c.reading);
  plan.validate(require_agents);
  return plan;
}

CommandContext context_for(const Common& c, const std::string& command_line) {
  CommandContext ctx;
  ctx.jobs = c.jobs > 0 ? c.jobs : std::max(1u, std::thread::hardware_concurrency());
  ctx.log = c.quiet ? nullptr : &std::cerr;
  ctx.warn = &std::cerr;
  ctx.command_line = command_line;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual network embedding with alternatives: experiments"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);

  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

  Common gen, tr, ev, ex, rep;
  auto* c_gen = app.add_subcommand("generate", "Generate the plan's scenarios");
  add_common(c_gen, gen, true);

  auto* c_train = app.add_subcommand("train", "Train a hierarchical agent");
  add_common(c_train, tr, true);

  auto* c_eval = app.add_subcommand("evaluate", "Run every method on every plan scenario");
  add_common(c_eval, ev, true);
  c_eval->add_option("--revenue-reading", ev.reading, "accepted | all-arrivals")
      ->check(CLI::IsMember({"accepted", "all-arrivals"}));

  auto* c_export = app.add_subcommand("export-milp", "Write LP files of the exact model");
  add_common(c_export, ex, false);
  std::vector<fs::path> scenario_files;
  int export_k = 5;
  auto* o_scen = c_export->add_option("--scenario", scenario_files, "Scenario file(s) instead of a plan")
                     ->check(CLI::ExistingFile);
  c_export->add_option("--k", export_k, "Candidate paths per host pair (with --scenario)")
      ->check(CLI::PositiveNumber);
  o_scen->excludes(c_export->get_option("--config"));

  auto* c_report = app.add_subcommand("report", "Tables and plot data from evaluation results");
  std::vector<fs::path> result_dirs;
  c_report->add_option("results", result_dirs, "Evaluation output directories")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_report->add_option("--out", rep.out, "Output directory")->required();
  c_report->add_flag("-q,--quiet", rep.quiet, "Only print warnings and errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c_gen->parsed()) {
      cmd_generate(plan_for(gen), gen.out, context_for(gen, command_line));
    } else if (c_train->parsed()) {
      const TrainResult r = cmd_train(plan_for(tr), tr.out, context_for(tr, command_line));
      if (!tr.quiet && !r.curve.empty()) {
        const CurveRow& last = r.curve.back();
        std::cerr << "last episode: acceptance " << format_double(last.acceptance) << ", revenue "
                  << format_double(last.revenue) << "\n";
      }
    } else if (c_eval->parsed()) {
      cmd_evaluate(plan_for(ev, true), ev.out, context_for(ev, command_line));
    } else if (c_export->parsed()) {
      const CommandContext ctx = context_for(ex, command_line);
      if (!scenario_files.empty()) {
        cmd_export_milp_files(scenario_files, export_k, ex.out, ctx);
      } else if (!ex.config.empty()) {
        cmd_export_milp(plan_for(ex), ex.out, ctx);
      } else {
        std::cerr << "error: export-milp needs --config or --scenario\n";
        return 2;
      }
    } else if (c_report->parsed()) {
      cmd_report(result_dirs, rep.out, context_for(rep, command_line));
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
