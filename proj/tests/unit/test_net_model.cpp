#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vneap/error.hpp"
#include "vneap/ledger.hpp"
#include "vneap/metrics.hpp"
#include "vneap/scenario.hpp"
#include "vneap/validate.hpp"

using namespace vneap;
using namespace vneap::testing;

TEST(Metrics, Fig1Revenue) {
  EXPECT_DOUBLE_EQ(revenue(fig1_x()), 175.0);
  EXPECT_DOUBLE_EQ(revenue(fig1_y()), 150.0);
  EXPECT_DOUBLE_EQ(revenue(make_alt({0}, {})), 0.0);
}

TEST(Metrics, Fig1CostAndRatio) {
  EXPECT_DOUBLE_EQ(cost(fig1_x(), fig1_x_embedding()), 325.0);
  EXPECT_NEAR(r2c(fig1_x(), fig1_x_embedding()), 0.538, 1e-3);
  EXPECT_DOUBLE_EQ(cost(fig1_y(), fig1_y_embedding()), 150.0);
  EXPECT_DOUBLE_EQ(r2c(fig1_y(), fig1_y_embedding()), 1.0);
  EXPECT_DOUBLE_EQ(linear_objective(fig1_x(), fig1_x_embedding()), -150.0);
  EXPECT_DOUBLE_EQ(linear_objective(fig1_y(), fig1_y_embedding()), 0.0);
}

TEST(Metrics, ZeroCostRatioIsUndefined) {
  Alternative a = make_alt({0}, {});
  Embedding e{0, 0, {0}, {}};
  EXPECT_DOUBLE_EQ(cost(a, e), 0.0);
  EXPECT_THROW(r2c(a, e), UndefinedRatio);
}

TEST(Metrics, CostRejectsBrokenEmbedding) {
  Embedding colocated{0, 0, {1, 1}, {SubstratePath({1, 0})}};
  EXPECT_THROW(cost(fig1_x(), colocated), InvalidArgument);
  Embedding bad_endpoint{0, 0, {0, 2}, {SubstratePath({0, 1})}};
  EXPECT_THROW(cost(fig1_x(), bad_endpoint), InvalidArgument);
  Embedding loop{0, 0, {0, 2}, {SubstratePath({0, 1, 0, 1, 2})}};
  EXPECT_THROW(cost(fig1_x(), loop), InvalidArgument);
}

TEST(Metrics, OneHopCostEqualsRevenue) {
  SubstrateNetwork sn = uniform_substrate(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}, 100, 100);
  Rng rng = make_rng(3, 0);
  for (int trial = 0; trial < 200; ++trial) {
    double d0 = uniform(rng, {0, 20}), d1 = uniform(rng, {0, 20}), b = uniform(rng, {0.1, 50});
    Alternative a = make_alt({d0, d1}, {{0, 1, b}});
    Embedding e{0, 0, {0, 1}, {SubstratePath({0, 1})}};
    EXPECT_DOUBLE_EQ(cost(a, e), revenue(a));
    EXPECT_DOUBLE_EQ(r2c(a, e), 1.0);
    Embedding two{0, 0, {0, 1}, {SubstratePath({0, 3, 2, 1})}};
    EXPECT_GE(cost(a, two), revenue(a));
    EXPECT_LT(r2c(a, two), 1.0);
  }
}

TEST(Types, SubstrateInvariants) {
  EXPECT_THROW(uniform_substrate(2, {{0, 0}}, 1, 1), InvalidArgument);
  EXPECT_THROW(uniform_substrate(2, {{0, 1}, {1, 0}}, 1, 1), InvalidArgument);
  EXPECT_THROW(uniform_substrate(3, {{0, 1}}, 1, 1), InvalidArgument);
  EXPECT_THROW(uniform_substrate(2, {{0, 1}}, 0, 1), InvalidArgument);
  EXPECT_THROW(uniform_substrate(2, {{0, 1}}, 1, -1), InvalidArgument);
  EXPECT_THROW(uniform_substrate(2, {{0, 5}}, 1, 1), InvalidArgument);
  SubstrateNetwork ok = triangle();
  EXPECT_EQ(ok.num_nodes(), 3);
  EXPECT_EQ(ok.num_edges(), 3);
  EXPECT_EQ(ok.find_edge(2, 0), ok.find_edge(0, 2));
  EXPECT_FALSE(fig1_substrate().find_edge(1, 2).has_value());
}

TEST(Types, AlternativeInvariants) {
  EXPECT_THROW(make_alt({}, {}), InvalidArgument);
  EXPECT_THROW(make_alt({1, 1}, {}), InvalidArgument);           // disconnected
  EXPECT_THROW(make_alt({1, 1}, {{0, 1, 1}, {1, 0, 1}}), InvalidArgument);
  EXPECT_THROW(make_alt({1}, {{0, 0, 1}}), InvalidArgument);
  EXPECT_THROW(make_alt({-1}, {}), InvalidArgument);
  std::vector<VirtualNode> nodes{{1.0, std::vector<NodeId>{}}};
  EXPECT_THROW(Alternative(nodes, {}), InvalidArgument);
  EXPECT_NO_THROW(make_alt({0, 0}, {{0, 1, 0}}));
}

TEST(Types, VnrInvariants) {
  VNR r = make_vnr(0, 0.0, 1.0, {});
  EXPECT_THROW(r.check(), InvalidArgument);
  r = make_vnr(0, -1.0, 1.0, {fig1_x()});
  EXPECT_THROW(r.check(), InvalidArgument);
  r = make_vnr(0, 0.0, 0.0, {fig1_x()});
  EXPECT_THROW(r.check(), InvalidArgument);
  r = make_vnr(0, 2.0, 3.0, {fig1_x()});
  EXPECT_NO_THROW(r.check());
  EXPECT_TRUE(r.alive_at(2.0));
  EXPECT_TRUE(r.alive_at(4.999));
  EXPECT_FALSE(r.alive_at(5.0));
}

TEST(Types, PathValidity) {
  SubstrateNetwork sn = uniform_substrate(3, {{0, 1}, {1, 2}}, 1, 1);
  EXPECT_TRUE(SubstratePath({0, 1, 2}).is_valid_in(sn));
  EXPECT_FALSE(SubstratePath({0, 2}).is_valid_in(sn));
  EXPECT_FALSE(SubstratePath({0}).is_valid_in(sn));
  EXPECT_FALSE(SubstratePath({0, 1, 0}).is_valid_in(sn));
  EXPECT_EQ(SubstratePath({0, 1, 2}).hops(), 2);
  EXPECT_EQ(SubstratePath({0, 1, 2}).reversed(), SubstratePath({2, 1, 0}));
}

TEST(Validate, Fig1EmbeddingsAreFeasible) {
  Scenario s = fig1_scenario();
  ResourceLedger ledger(s.substrate);
  Embedding x = fig1_x_embedding(), y = fig1_y_embedding();
  EXPECT_TRUE(validate_embedding(s.substrate, s.vnrs[0], x, ledger).ok());
  EXPECT_TRUE(validate_embedding(s.substrate, s.vnrs[0], y, ledger).ok());
}

TEST(Validate, CoLocation) {
  SubstrateNetwork sn = triangle();
  VNR r = make_vnr(0, 0, 1, {make_alt({1, 1}, {{0, 1, 1}})});
  Embedding e{0, 0, {1, 1}, {SubstratePath({1, 2})}};
  auto rep = validate_embedding(sn, r, e, ResourceLedger(sn));
  EXPECT_TRUE(rep.has(ViolationKind::kCoLocation)) << rep.summary();
}

TEST(Validate, EndpointCoupling) {
  SubstrateNetwork sn = triangle();
  VNR r = make_vnr(0, 0, 1, {make_alt({1, 1}, {{0, 1, 1}})});
  Embedding e{0, 0, {0, 1}, {SubstratePath({0, 2})}};
  auto rep = validate_embedding(sn, r, e, ResourceLedger(sn));
  EXPECT_TRUE(rep.has(ViolationKind::kEndpointCoupling)) << rep.summary();
}

TEST(Validate, NodeCapacityAgainstResidual) {
  SubstrateNetwork sn = make_substrate({15, 100}, {{0, 1}}, {100});
  VNR r = make_vnr(0, 0, 1, {make_alt({20}, {})});
  auto rep = validate_embedding(sn, r, Embedding{0, 0, {0}, {}}, ResourceLedger(sn));
  EXPECT_TRUE(rep.has(ViolationKind::kNodeCapacity));
  EXPECT_EQ(rep.violations.size(), 1u);
  EXPECT_TRUE(validate_embedding(sn, r, Embedding{0, 0, {1}, {}}, ResourceLedger(sn)).ok());
}

TEST(Validate, AggregatedBandwidth) {
  // Two virtual links whose paths share edge 0-1: 6 + 6 > 10.
  SubstrateNetwork sn = uniform_substrate(3, {{0, 1}, {1, 2}}, 100, 10);
  VNR r = make_vnr(0, 0, 1, {make_alt({1, 1, 1}, {{0, 1, 6}, {0, 2, 6}})});
  Embedding e{0, 0, {0, 1, 2}, {SubstratePath({0, 1}), SubstratePath({0, 1, 2})}};
  auto rep = validate_embedding(sn, r, e, ResourceLedger(sn));
  EXPECT_TRUE(rep.has(ViolationKind::kLinkBandwidth)) << rep.summary();
}

TEST(Validate, HostRestrictionAndStructure) {
  SubstrateNetwork sn = triangle();
  std::vector<VirtualNode> nodes{{1.0, std::vector<NodeId>{2}}};
  VNR r = make_vnr(0, 0, 1, {Alternative(nodes, {})});
  ResourceLedger led(sn);
  EXPECT_TRUE(validate_embedding(sn, r, {0, 0, {0}, {}}, led).has(ViolationKind::kHostNotPermitted));
  EXPECT_TRUE(validate_embedding(sn, r, {0, 0, {2}, {}}, led).ok());
  EXPECT_TRUE(validate_embedding(sn, r, {0, 1, {2}, {}}, led).has(ViolationKind::kUnknownAlternative));
  EXPECT_TRUE(validate_embedding(sn, r, {0, 0, {}, {}}, led).has(ViolationKind::kNodeMapSize));
  EXPECT_TRUE(validate_embedding(sn, r, {0, 0, {7}, {}}, led).has(ViolationKind::kUnknownHost));
}

// validate_embedding must agree with a naive checker on random, mostly
// broken embeddings over small substrates.
TEST(Validate, AgreesWithBruteForce) {
  Rng rng = make_rng(11, 0);
  std::vector<std::vector<std::vector<std::pair<int, int>>>> corpus(7);
  for (int n = 3; n <= 6; ++n) corpus[n] = connected_graphs(n);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);  // 3..6
    const auto& edges = corpus[n][rng() % corpus[n].size()];
    std::vector<double> caps(n), bws(edges.size());
    for (auto& c : caps) c = std::floor(uniform(rng, {1, 12}));
    for (auto& b : bws) b = std::floor(uniform(rng, {1, 12}));
    SubstrateNetwork sn = make_substrate(caps, edges, bws);
    const int vn = 1 + static_cast<int>(rng() % 3);
    std::vector<double> dem(vn);
    for (auto& d : dem) d = std::floor(uniform(rng, {0, 8}));
    std::vector<LinkSpec> links;
    for (int i = 1; i < vn; ++i)
      links.push_back({static_cast<int>(rng() % i), i, std::floor(uniform(rng, {0, 8}))});
    VNR r = make_vnr(0, 0, 1, {make_alt(dem, links)});
    Embedding e;
    for (int i = 0; i < vn; ++i) e.node_map.push_back(static_cast<int>(rng() % n));
    for (const auto& l : links) {
      std::vector<NodeId> p{e.node_map[l.i]};
      const int extra = static_cast<int>(rng() % 3);
      for (int k = 0; k < extra; ++k) p.push_back(static_cast<int>(rng() % n));
      if (rng() % 4 != 0) p.push_back(e.node_map[l.j]);
      e.link_paths.emplace_back(p);
    }
    ResourceLedger led(sn);
    bool expect = brute_feasible(sn, r, e, caps, bws);
    auto rep = validate_embedding(sn, r, e, led);
    ASSERT_EQ(rep.ok(), expect) << rep.summary();
    (expect ? feasible : infeasible)++;
  }
  EXPECT_GT(feasible, 100);
  EXPECT_GT(infeasible, 100);
}

TEST(Ledger, CommitReleaseRestoresExactly) {
  SubstrateNetwork sn = fig1_substrate();
  ResourceLedger led(sn);
  auto before_c = std::vector<double>(led.residual_capacities().begin(), led.residual_capacities().end());
  VNR r = fig1_scenario().vnrs[0];
  Embedding y = fig1_y_embedding();
  led.commit(sn, r, y);
  EXPECT_DOUBLE_EQ(led.residual_capacity(0), 25.0);
  EXPECT_DOUBLE_EQ(led.residual_bandwidth(*sn.find_edge(0, 1)), 10.0);
  led.release(0);
  for (NodeId p = 0; p < sn.num_nodes(); ++p) EXPECT_EQ(led.residual_capacity(p), before_c[p]);
  EXPECT_TRUE(led.at_initial(0.0));
}

TEST(Ledger, BoundaryCommitAndErrors) {
  SubstrateNetwork sn = make_substrate({20, 20}, {{0, 1}}, {5});
  ResourceLedger led(sn);
  VNR r = make_vnr(3, 0, 1, {make_alt({20}, {})});
  led.commit(sn, r, {3, 0, {0}, {}});
  EXPECT_EQ(led.residual_capacity(0), 0.0);
  EXPECT_TRUE(led.within_bounds());
  EXPECT_THROW(led.commit(sn, r, {3, 0, {1}, {}}), InvariantError);
  VNR r2 = make_vnr(4, 0, 1, {make_alt({1}, {})});
  EXPECT_THROW(led.commit(sn, r2, {4, 0, {0}, {}}), FeasibilityError);
  EXPECT_EQ(led.residual_capacity(0), 0.0);
  EXPECT_THROW(led.release(99), InvariantError);
}

TEST(Ledger, SharedEdgeDebitedTwice) {
  SubstrateNetwork sn = uniform_substrate(3, {{0, 1}, {1, 2}}, 100, 20);
  VNR r = make_vnr(0, 0, 1, {make_alt({1, 1, 1}, {{0, 1, 6}, {0, 2, 7}})});
  Embedding e{0, 0, {0, 1, 2}, {SubstratePath({0, 1}), SubstratePath({0, 1, 2})}};
  ResourceLedger led(sn);
  led.commit(sn, r, e);
  EXPECT_DOUBLE_EQ(led.residual_bandwidth(*sn.find_edge(0, 1)), 20.0 - 6.0 - 7.0);
  EXPECT_DOUBLE_EQ(led.residual_bandwidth(*sn.find_edge(1, 2)), 20.0 - 7.0);
}

TEST(Ledger, InterleavedReleaseOrderIsBitExact) {
  SubstrateNetwork sn = uniform_substrate(3, {{0, 1}, {1, 2}, {0, 2}}, 1.0, 1.0);
  ResourceLedger led(sn);
  std::vector<VNR> rs;
  for (int k = 0; k < 6; ++k) rs.push_back(make_vnr(k, 0, 1, {make_alt({0.1 * (k + 1) / 3.0}, {})}));
  for (int k = 0; k < 6; ++k) led.commit(sn, rs[k], {k, 0, {k % 3}, {}});
  for (int k : {3, 0, 5, 1, 4, 2}) led.release(k);
  EXPECT_TRUE(led.at_initial(0.0));
}
