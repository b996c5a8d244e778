#include <benchmark/benchmark.h>

#include "vneap/centrality.hpp"
#include "vneap/exact.hpp"
#include "vneap/hrl.hpp"
#include "vneap/ledger.hpp"
#include "vneap/milp.hpp"
#include "vneap/paths.hpp"
#include "vneap/policies.hpp"
#include "vneap/policy_net.hpp"
#include "vneap/scenario.hpp"
#include "vneap/simulator.hpp"

using namespace vneap;

namespace {

Scenario atlanta(int vnrs, std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.substrate = "builtin:atlanta";
  c.vnr_count = vnrs;
  c.seed = seed;
  return generate_scenario(c);
}

}  // namespace

static void BM_KShortestAllPairs(benchmark::State& state) {
  const Scenario s = atlanta(1);
  for (auto _ : state) {
    PathCache pc(s.substrate, static_cast<int>(state.range(0)));
    pc.fill_all();
    benchmark::DoNotOptimize(pc.paths(0, 1).size());
  }
}
BENCHMARK(BM_KShortestAllPairs)->Arg(1)->Arg(5)->Arg(10);

static void BM_Centralities(benchmark::State& state) {
  const Scenario s = atlanta(1);
  for (auto _ : state) benchmark::DoNotOptimize(centralities(s.substrate));
}
BENCHMARK(BM_Centralities);

static void BM_GenerateScenario(benchmark::State& state) {
  ScenarioConfig c;
  c.substrate = "builtin:atlanta";
  const TopologySkeleton skel = resolve_topology(c.substrate);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    c.seed = ++seed;
    benchmark::DoNotOptimize(generate_scenario(c, skel));
  }
}
BENCHMARK(BM_GenerateScenario);

static void BM_SimulateHeuristic(benchmark::State& state) {
  const Scenario s = atlanta(30);
  for (auto _ : state) {
    auto pol = make_heuristic_policy("exploit-maxrev+greedy", 1);
    benchmark::DoNotOptimize(run(s, *pol).acceptance_ratio);
  }
}
BENCHMARK(BM_SimulateHeuristic)->Unit(benchmark::kMillisecond);

static void BM_SimulateHrlEval(benchmark::State& state) {
  const Scenario s = atlanta(30);
  HrlSettings settings;
  const HrlAgent a = HrlAgent::create(s.substrate.num_nodes(), settings, 1);
  for (auto _ : state) {
    HrlPolicy pol(a.hl, a.ll, a.settings, Mode::kEval, 1);
    benchmark::DoNotOptimize(run(s, pol).acceptance_ratio);
  }
}
BENCHMARK(BM_SimulateHrlEval)->Unit(benchmark::kMillisecond);

// HL forward (and forward + backward) at the default width.
static void BM_HlForwardBackward(benchmark::State& state) {
  const bool backward = state.range(0) != 0;
  const Scenario s = atlanta(1);
  const ResourceLedger ledger(s.substrate);
  const Centralities c = centralities(s.substrate);
  HrlSettings settings;
  PolicyParams params =
      PolicyParams::init(hl_arch(s.substrate.num_nodes(), settings.max_alternatives), 1);
  const VNR& vnr = s.vnrs.front();
  const auto mask = hl_mask(ledger, vnr, settings.max_alternatives);
  const NetInput in = hl_net_input(
      encode_hl(ledger, s.substrate, vnr, c, settings.max_alternatives, settings.mean_lifetime),
      mask, s.substrate);
  for (auto _ : state) {
    PolicyForward f = backward ? policy_forward_tracked(params, in) : policy_forward(params, in);
    if (backward) f.graph.backward(f.graph.sum(f.value));
    benchmark::DoNotOptimize(f.value);
  }
}
BENCHMARK(BM_HlForwardBackward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_BranchAndBound(benchmark::State& state) {
  ScenarioConfig c;
  c.substrate = "builtin:ring-5";
  c.vnr_count = static_cast<int>(state.range(0));
  c.alternatives_per_vnr = 2;
  c.base_max_nodes = 3;
  c.seed = 4;
  const Scenario s = generate_scenario(c);
  PathCache pc(s.substrate, 2);
  const MilpModel m = build_milp(s, pc);
  for (auto _ : state) benchmark::DoNotOptimize(solve_bnb(m, 60.0).solution.objective);
}
BENCHMARK(BM_BranchAndBound)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
