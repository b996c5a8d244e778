#ifndef VNEAP_TESTS_FIXTURES_HPP_
#define VNEAP_TESTS_FIXTURES_HPP_

#include <utility>
#include <vector>

#include "vneap/scenario.hpp"
#include "vneap/types.hpp"

namespace vneap::testing {

inline SubstrateNetwork make_substrate(std::vector<double> caps,
                                       std::vector<std::pair<int, int>> edges,
                                       std::vector<double> bws) {
  std::vector<SubstrateNode> nodes;
  for (std::size_t i = 0; i < caps.size(); ++i)
    nodes.push_back({"s" + std::to_string(i), caps[i]});
  std::vector<SubstrateEdge> es;
  for (std::size_t e = 0; e < edges.size(); ++e)
    es.push_back({edges[e].first, edges[e].second, bws[e]});
  return SubstrateNetwork(std::move(nodes), std::move(es), "test");
}

inline SubstrateNetwork uniform_substrate(int n, std::vector<std::pair<int, int>> edges,
                                          double cap, double bw) {
  std::vector<double> caps(n, cap), bws(edges.size(), bw);
  return make_substrate(caps, std::move(edges), bws);
}

inline SubstrateNetwork triangle(double cap = 10.0, double bw = 10.0) {
  return uniform_substrate(3, {{0, 1}, {1, 2}, {0, 2}}, cap, bw);
}

struct LinkSpec {
  int i, j;
  double demand;
};

inline Alternative make_alt(std::vector<double> node_demands, std::vector<LinkSpec> links) {
  std::vector<VirtualNode> nodes;
  for (double d : node_demands) nodes.push_back({d, std::nullopt});
  std::vector<VirtualLink> ls;
  for (const auto& l : links) ls.push_back({l.i, l.j, l.demand});
  return Alternative(std::move(nodes), std::move(ls));
}

inline VNR make_vnr(int id, double arrival, double lifetime, std::vector<Alternative> alts) {
  VNR r;
  r.id = id;
  r.arrival = arrival;
  r.lifetime = lifetime;
  r.alternatives = std::move(alts);
  return r;
}

// Two-alternative application from the introductory example: X joins A (10)
// and B (15) with a 150 link; Y routes through a 5-unit accumulator with
// links of 90 and 30.
inline Alternative fig1_x() { return make_alt({10, 15}, {{0, 1, 150}}); }
inline Alternative fig1_y() { return make_alt({10, 5, 15}, {{0, 1, 90}, {1, 2, 30}}); }

// s0 (30) is a hub joined to s1 and s2 (20 each) by 100-unit links; s3 (1)
// offers a 200-unit detour s1-s3-s0. X's 150 link can never take a single
// hop, so X spans two, while Y maps onto the hub and its two neighbours.
inline SubstrateNetwork fig1_substrate() {
  return make_substrate({30, 20, 20, 1}, {{0, 1}, {0, 2}, {1, 3}, {3, 0}},
                        {100, 100, 200, 200});
}

inline Embedding fig1_x_embedding() {
  return Embedding{0, 0, {1, 0}, {SubstratePath({1, 3, 0})}};
}
inline Embedding fig1_y_embedding() {
  return Embedding{0, 1, {1, 0, 2}, {SubstratePath({1, 0}), SubstratePath({0, 2})}};
}

inline Scenario fig1_scenario() {
  Scenario s;
  s.substrate = fig1_substrate();
  s.vnrs.push_back(make_vnr(0, 0.0, 10.0, {fig1_x(), fig1_y()}));
  return s;
}

}  // namespace vneap::testing

#endif  // VNEAP_TESTS_FIXTURES_HPP_
