#include "vneap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "vneap/error.hpp"

namespace vneap {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double uniform(Rng& rng, Range r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw InvalidArgument("config field '" + field + "': " + why);
}

void require_range(Range r, const std::string& field) {
  require(std::isfinite(r.lo) && std::isfinite(r.hi), field, "must be finite");
  require(r.lo <= r.hi, field, "lower bound exceeds upper bound");
}

bool coin(Rng& rng, double p) {
  if (p <= 0.0) return false;
  return std::bernoulli_distribution(std::min(p, 1.0))(rng);
}

struct MutableGraph {
  std::vector<VirtualNode> nodes;
  std::vector<VirtualLink> links;

  bool adjacent(int a, int b) const {
    return std::any_of(links.begin(), links.end(), [&](const VirtualLink& l) {
      return (l.i == a && l.j == b) || (l.i == b && l.j == a);
    });
  }
  bool connected() const {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& l : links) pairs.emplace_back(l.i, l.j);
    return is_connected(static_cast<int>(nodes.size()), pairs);
  }
};

std::optional<MutableGraph> mutate(const Alternative& base, double p,
                                   const MutationSettings& s, Rng& rng) {
  const int n = base.num_nodes();
  std::vector<int> new_id(n, -1);
  MutableGraph g;
  for (int i = 0; i < n; ++i) {
    if (coin(rng, p)) continue;
    new_id[i] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(base.node(i));
  }
  if (g.nodes.empty()) return std::nullopt;
  for (const auto& l : base.links()) {
    bool survives = new_id[l.i] >= 0 && new_id[l.j] >= 0;
    if (!coin(rng, p) && survives) g.links.push_back({new_id[l.i], new_id[l.j], l.demand});
  }
  for (int i = 0; i < n; ++i) {
    if (!coin(rng, p)) continue;
    int anchor = std::uniform_int_distribution<int>(0, static_cast<int>(g.nodes.size()) - 1)(rng);
    int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back({uniform(rng, s.node_demand), std::nullopt});
    g.links.push_back({anchor, id, uniform(rng, s.link_demand)});
  }
  for (int l = 0; l < base.num_links(); ++l) {
    if (!coin(rng, p)) continue;
    std::vector<std::pair<int, int>> free_pairs;
    const int m = static_cast<int>(g.nodes.size());
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (!g.adjacent(a, b)) free_pairs.emplace_back(a, b);
    if (free_pairs.empty()) continue;
    auto [a, b] = free_pairs[std::uniform_int_distribution<std::size_t>(
        0, free_pairs.size() - 1)(rng)];
    g.links.push_back({a, b, uniform(rng, s.link_demand)});
  }
  if (!g.connected()) return std::nullopt;
  return g;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(!substrate.empty(), "substrate", "must name a builtin or a file");
  require_range(capacity, "capacity");
  require(capacity.lo > 0.0, "capacity", "must be strictly positive");
  require_range(bandwidth, "bandwidth");
  require(bandwidth.lo > 0.0, "bandwidth", "must be strictly positive");
  require(vnr_count >= 1, "vnr_count", "must be at least 1");
  require(alternatives_per_vnr >= 1, "alternatives_per_vnr", "must be at least 1");
  require_range(node_demand, "node_demand");
  require(node_demand.lo >= 0.0, "node_demand", "must be nonnegative");
  require_range(link_demand, "link_demand");
  require(link_demand.lo >= 0.0, "link_demand", "must be nonnegative");
  require_range(mutation_probability, "mutation_probability");
  require(mutation_probability.lo >= 0.0 && mutation_probability.hi <= 1.0,
          "mutation_probability", "must lie in [0, 1]");
  require(mean_lifetime > 0.0 && std::isfinite(mean_lifetime), "mean_lifetime",
          "must be positive");
  require(arrival_rate > 0.0 && std::isfinite(arrival_rate), "arrival_rate",
          "must be positive");
  require(base_min_nodes >= 1, "base_min_nodes", "must be at least 1");
  require(base_max_nodes >= base_min_nodes, "base_max_nodes",
          "must be at least base_min_nodes");
  require(base_edge_probability > 0.0 && base_edge_probability <= 1.0,
          "base_edge_probability", "must lie in (0, 1]");
}

void Scenario::check() const {
  std::set<int> ids;
  for (std::size_t k = 0; k < vnrs.size(); ++k) {
    vnrs[k].check();
    if (!ids.insert(vnrs[k].id).second)
      throw InvalidArgument("duplicate VNR id " + std::to_string(vnrs[k].id));
    if (k > 0 && vnrs[k].arrival < vnrs[k - 1].arrival)
      throw InvalidArgument("VNRs not sorted by arrival");
  }
}

SubstrateNetwork sample_substrate(const TopologySkeleton& skeleton, Range capacity,
                                  Range bandwidth, Rng& rng) {
  std::vector<SubstrateNode> nodes;
  nodes.reserve(skeleton.node_names.size());
  for (const auto& name : skeleton.node_names)
    nodes.push_back({name, uniform(rng, capacity)});
  std::vector<SubstrateEdge> edges;
  edges.reserve(skeleton.edges.size());
  for (auto [u, v] : skeleton.edges) edges.push_back({u, v, uniform(rng, bandwidth)});
  return SubstrateNetwork(std::move(nodes), std::move(edges), skeleton.name);
}

Alternative random_base_topology(const ScenarioConfig& cfg, Rng& rng) {
  const int n = std::uniform_int_distribution<int>(cfg.base_min_nodes, cfg.base_max_nodes)(rng);
  for (;;) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (coin(rng, cfg.base_edge_probability)) pairs.emplace_back(a, b);
    if (!is_connected(n, pairs)) continue;
    std::vector<VirtualNode> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({uniform(rng, cfg.node_demand), std::nullopt});
    std::vector<VirtualLink> links;
    for (auto [a, b] : pairs) links.push_back({a, b, uniform(rng, cfg.link_demand)});
    return Alternative(std::move(nodes), std::move(links));
  }
}

AlternativeSet generate_alternatives(const Alternative& base, int count,
                                     const MutationSettings& settings, Rng& rng) {
  if (count < 1) throw InvalidArgument("alternative count must be at least 1");
  constexpr int kMaxAttempts = 100;
  AlternativeSet out;
  out.alternatives.push_back(base);
  for (int k = 1; k < count; ++k) {
    const double p = uniform(rng, settings.probability);
    bool produced = false;
    for (int attempt = 0; attempt < kMaxAttempts && !produced; ++attempt) {
      if (auto g = mutate(base, p, settings, rng)) {
        out.alternatives.emplace_back(std::move(g->nodes), std::move(g->links));
        produced = true;
      }
    }
    if (!produced) {
      if (settings.strict)
        throw GenerationFailure("no connected mutant after 100 attempts");
      out.alternatives.push_back(base);
      ++out.fallbacks;
    }
  }
  return out;
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  return generate_scenario(cfg, resolve_topology(cfg.substrate));
}

Scenario generate_scenario(const ScenarioConfig& cfg, const TopologySkeleton& skeleton) {
  cfg.validate();
  Rng substrate_rng = make_rng(cfg.seed, 1);
  Rng arrival_rng = make_rng(cfg.seed, 2);
  Rng topology_rng = make_rng(cfg.seed, 3);

  Scenario s;
  s.substrate = sample_substrate(skeleton, cfg.capacity, cfg.bandwidth, substrate_rng);
  s.provenance.config = cfg;

  std::exponential_distribution<double> inter_arrival(cfg.arrival_rate);
  std::exponential_distribution<double> lifetime(1.0 / cfg.mean_lifetime);
  const MutationSettings mutation{cfg.mutation_probability, cfg.node_demand,
                                  cfg.link_demand, cfg.strict_generation};
  double t = 0.0;
  for (int r = 0; r < cfg.vnr_count; ++r) {
    VNR vnr;
    vnr.id = r;
    t += inter_arrival(arrival_rng);
    vnr.arrival = t;
    vnr.lifetime = lifetime(arrival_rng);
    if (!(vnr.lifetime > 0.0)) vnr.lifetime = std::numeric_limits<double>::min();
    Alternative base = random_base_topology(cfg, topology_rng);
    auto set = generate_alternatives(base, cfg.alternatives_per_vnr, mutation, topology_rng);
    s.provenance.generation_fallbacks += set.fallbacks;
    vnr.alternatives = std::move(set.alternatives);
    s.vnrs.push_back(std::move(vnr));
  }
  return s;
}

}  // namespace vneap
