#ifndef VNEAP_SCENARIO_HPP_
#define VNEAP_SCENARIO_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vneap/topology.hpp"
#include "vneap/types.hpp"

namespace vneap {

using Rng = std::mt19937_64;

/// Seeds an independent stream for (seed, stream). Different purposes of
/// one scenario (substrate, arrivals, topologies) draw from distinct
/// streams so that changing one count does not reshuffle the others.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Range&, const Range&) = default;
};

double uniform(Rng& rng, Range r);

struct ScenarioConfig {
  /// `builtin:<name>` or a topology file path.
  std::string substrate = "builtin:atlanta";
  Range capacity{50.0, 100.0};
  Range bandwidth{50.0, 100.0};
  int vnr_count = 30;
  int alternatives_per_vnr = 4;
  Range node_demand{0.0, 20.0};
  Range link_demand{0.0, 50.0};
  Range mutation_probability{0.4, 0.6};
  double mean_lifetime = 50.0;
  /// Poisson arrival rate (requests per time unit).
  double arrival_rate = 0.5;
  int base_min_nodes = 2;
  int base_max_nodes = 10;
  double base_edge_probability = 0.5;
  std::uint64_t seed = 1;
  /// Throw GenerationFailure instead of falling back to a copy of the base.
  bool strict_generation = false;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct ScenarioProvenance {
  ScenarioConfig config;
  std::string arrival_process = "poisson";
  /// Mutants replaced by a copy of their base after 100 failed attempts.
  int generation_fallbacks = 0;
  friend bool operator==(const ScenarioProvenance&, const ScenarioProvenance&) = default;
};

struct Scenario {
  SubstrateNetwork substrate;
  std::vector<VNR> vnrs;  // sorted by arrival
  ScenarioProvenance provenance;

  /// Sorted arrivals, unique ids, valid requests. Throws InvalidArgument.
  void check() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Capacities and bandwidths uniform in the given ranges.
SubstrateNetwork sample_substrate(const TopologySkeleton& skeleton, Range capacity,
                                  Range bandwidth, Rng& rng);

/// Random connected base topology: node count uniform in
/// [base_min_nodes, base_max_nodes], each pair linked with
/// base_edge_probability, retried until connected.
Alternative random_base_topology(const ScenarioConfig& cfg, Rng& rng);

struct AlternativeSet {
  std::vector<Alternative> alternatives;
  int fallbacks = 0;
};

struct MutationSettings {
  Range probability{0.4, 0.6};
  Range node_demand{0.0, 20.0};
  Range link_demand{0.0, 50.0};
  bool strict = false;
};

/// `count` connected alternatives. The first is base itself; every other
/// one is a mutant: with probability p drawn from the probability range,
/// each base node is removed (with its links), each surviving base link is
/// removed, a new node attached to an existing one is added per base node,
/// and a new link between two non-adjacent nodes is added per base link.
/// New elements draw their demands from the configured ranges.
AlternativeSet generate_alternatives(const Alternative& base, int count,
                                     const MutationSettings& settings, Rng& rng);

/// Full scenario from the config, reproducible from cfg.seed.
Scenario generate_scenario(const ScenarioConfig& cfg);

/// Same, on an explicit substrate skeleton (bypasses cfg.substrate lookup).
Scenario generate_scenario(const ScenarioConfig& cfg, const TopologySkeleton& skeleton);

}  // namespace vneap

#endif  // VNEAP_SCENARIO_HPP_
