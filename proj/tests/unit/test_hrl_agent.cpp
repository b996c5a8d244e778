#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "hrl_scenarios.hpp"
#include "vneap/error.hpp"
#include "vneap/hrl.hpp"
#include "vneap/metrics.hpp"

using namespace vneap;
using namespace vneap::testing;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("vneap_hrl_" + name);
  fs::remove_all(d);
  return d;
}

double prob(const PolicyParams& p, const NetInput& in, int action) {
  PolicyForward f = policy_forward(p, in);
  return std::exp(f.graph.value(f.log_probs)(0, action));
}

ScenarioSource small_source() {
  return [](std::uint64_t seed) {
    ScenarioConfig c;
    c.substrate = "builtin:ring-5";
    c.vnr_count = 6;
    c.alternatives_per_vnr = 3;
    c.base_max_nodes = 4;
    c.seed = seed;
    return generate_scenario(c);
  };
}

bool same_values(const PolicyParams& a, const PolicyParams& b) {
  for (const ParamBlock& x : a.blocks())
    if (x.value != b.block(x.name).value) return false;
  return true;
}

}  // namespace

// ---- observations ------------------------------------------------------------

TEST(EncodeHl, FreshLedgerHasNoLoad) {
  SubstrateNetwork sn = fig1_substrate();
  ResourceLedger L(sn);
  VNR v = make_vnr(0, 0, 10, {fig1_x(), fig1_y()});
  auto obs = encode_hl(L, sn, v, centralities(sn), 4, 10.0);
  for (int p = 0; p < sn.num_nodes(); ++p) {
    EXPECT_EQ(obs.substrate.nodes(p, 1), 0.0);
    EXPECT_DOUBLE_EQ(obs.substrate.nodes(p, 0), sn.node(p).capacity / 30.0);
  }
  for (int e = 0; e < sn.num_edges(); ++e) EXPECT_EQ(obs.substrate.links(e, 1), 0.0);
  EXPECT_DOUBLE_EQ(obs.lifetime_ratio, 1.0);
}

TEST(EncodeHl, TriangleFeatures) {
  auto f = alternative_features(make_alt({3, 3, 3}, {{0, 1, 2}, {1, 2, 2}, {0, 2, 2}}));
  EXPECT_DOUBLE_EQ(f[0], 3);
  EXPECT_DOUBLE_EQ(f[1], 3);
  EXPECT_DOUBLE_EQ(f[2], 3);
  EXPECT_DOUBLE_EQ(f[3], 2);
  EXPECT_DOUBLE_EQ(f[4], 1.0);
  EXPECT_DOUBLE_EQ(f[5], 1.0);
  auto single = alternative_features(make_alt({4}, {}));
  EXPECT_EQ(single[4], 0.0);
  EXPECT_EQ(single[5], 0.0);
  // path 0-1-2: distances 1, 1, 2
  auto path = alternative_features(make_alt({1, 1, 1}, {{0, 1, 1}, {1, 2, 1}}));
  EXPECT_DOUBLE_EQ(path[4], 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(path[5], 2.0 / 3.0);
}

TEST(EncodeHl, Padding) {
  SubstrateNetwork sn = fig1_substrate();
  ResourceLedger L(sn);
  auto cent = centralities(sn);
  VNR four = make_vnr(0, 0, 1, {fig1_x(), fig1_y(), fig1_x(), fig1_y()});
  auto full = encode_hl(L, sn, four, cent, 4, 1);
  EXPECT_EQ(full.valid, (std::vector<char>{1, 1, 1, 1}));
  VNR two = make_vnr(0, 0, 1, {fig1_x(), fig1_y()});
  auto obs = encode_hl(L, sn, two, cent, 4, 1);
  ASSERT_EQ(obs.alternatives.rows, 4);
  EXPECT_EQ(obs.valid, (std::vector<char>{1, 1, 0, 0}));
  for (int a = 2; a < 4; ++a)
    for (int k = 0; k < 6; ++k) EXPECT_EQ(obs.alternatives(a, k), 0.0);
  EXPECT_EQ(hl_mask(L, two, 4), (std::vector<char>{1, 1, 0, 0, 1}));
}

TEST(EncodeHl, MaskUsesLargestResiduals) {
  SubstrateNetwork sn = fig1_substrate();  // max capacity 30, max bandwidth 200
  ResourceLedger L(sn);
  VNR v = make_vnr(0, 0, 1,
                   {make_alt({31}, {}), make_alt({30}, {}),
                    make_alt({1, 1}, {{0, 1, 201}}), make_alt({1, 1}, {{0, 1, 200}})});
  EXPECT_EQ(hl_mask(L, v, 4), (std::vector<char>{0, 1, 0, 1, 1}));
  EXPECT_EQ(hl_mask(L, v, 2), (std::vector<char>{0, 1, 1}));
}

// ---- policy steps --------------------------------------------------------------

TEST(HlPolicyStep, OnlyRejectLegal) {
  SubstrateNetwork sn = fig1_substrate();
  ResourceLedger L(sn);
  VNR v = make_vnr(0, 0, 1, {make_alt({500}, {})});
  auto obs = encode_hl(L, sn, v, centralities(sn), 4, 1);
  auto mask = hl_mask(L, v, 4);
  PolicyParams p = PolicyParams::init(hl_arch(sn.num_nodes(), 4, 16), 5);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    auto s = hl_policy_step(p, obs, mask, sn, Mode::kTrain, rng);
    EXPECT_EQ(s.action, 4);
    EXPECT_EQ(s.log_prob, 0.0);
  }
}

TEST(HlPolicyStep, ZeroParamsGiveUniformLegalDistribution) {
  SubstrateNetwork sn = fig1_substrate();
  ResourceLedger L(sn);
  VNR v = make_vnr(0, 0, 1, {fig1_x(), make_alt({500}, {}), fig1_y()});
  auto mask = hl_mask(L, v, 4);
  ASSERT_EQ(mask, (std::vector<char>{1, 0, 1, 0, 1}));
  PolicyParams p = PolicyParams::zeros(hl_arch(sn.num_nodes(), 4, 16));
  NetInput in = hl_net_input(encode_hl(L, sn, v, centralities(sn), 4, 1), mask, sn);
  for (int a = 0; a < 5; ++a) EXPECT_NEAR(prob(p, in, a), mask[a] ? 1.0 / 3 : 0.0, 1e-12);
}

TEST(HlPolicyStep, MaskedProbabilityExactlyZeroAndSumOne) {
  std::mt19937_64 rng(41);
  PolicyParams p = PolicyParams::init(small_arch(), 41);
  for (int trial = 0; trial < 50; ++trial) {
    NetInput in = random_input(p.arch(), rng);
    for (auto& m : in.mask) m = rng() % 2;
    in.mask.back() = 1;
    double total = 0;
    for (int a = 0; a < p.arch().actions; ++a) {
      const double q = prob(p, in, a);
      if (!in.mask[a]) EXPECT_EQ(q, 0.0);
      total += q;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(HlPolicyStep, EvalIsDeterministicArgmax) {
  SubstrateNetwork sn = fig1_substrate();
  ResourceLedger L(sn);
  VNR v = make_vnr(0, 0, 1, {fig1_x(), fig1_y()});
  auto obs = encode_hl(L, sn, v, centralities(sn), 4, 1);
  auto mask = hl_mask(L, v, 4);
  PolicyParams p = PolicyParams::init(hl_arch(sn.num_nodes(), 4, 16), 6);
  Rng r1(1), r2(2);
  auto a = hl_policy_step(p, obs, mask, sn, Mode::kEval, r1);
  auto b = hl_policy_step(p, obs, mask, sn, Mode::kEval, r2);
  EXPECT_EQ(a.action, b.action);
  NetInput in = hl_net_input(obs, mask, sn);
  for (int j = 0; j < 5; ++j)
    if (mask[j]) EXPECT_GE(prob(p, in, a.action), prob(p, in, j));
}

// ---- low-level episodes ------------------------------------------------------

TEST(LlEpisode, SingleNodeOneStep) {
  SubstrateNetwork sn = make_substrate({1, 10, 1}, {{0, 1}, {1, 2}}, {5, 5});
  ResourceLedger L(sn);
  VNR v = make_vnr(0, 0, 1, {make_alt({4}, {})});
  PathCache paths(sn);
  PolicyParams p = PolicyParams::init(ll_arch(3, 16), 1);
  Rng rng(1);
  auto ep = ll_embed_episode(p, L, sn, v, 0, paths, centralities(sn), Mode::kTrain, rng);
  ASSERT_TRUE(ep.embedding);
  EXPECT_EQ(ep.embedding->node_map, (std::vector<NodeId>{1}));
  ASSERT_EQ(ep.steps.size(), 1u);
  EXPECT_DOUBLE_EQ(ep.steps[0].reward, 2.0);  // 1/1 + R2C 1
  EXPECT_TRUE(ep.steps[0].done);
}

TEST(LlEpisode, AllMaskedFailsImmediately) {
  SubstrateNetwork sn = triangle(10, 10);
  ResourceLedger L(sn);
  VNR v = make_vnr(0, 0, 1, {make_alt({11, 1}, {{0, 1, 1}})});
  PathCache paths(sn);
  PolicyParams p = PolicyParams::init(ll_arch(3, 16), 1);
  Rng rng(1);
  const std::vector<double> cap(L.residual_capacities().begin(), L.residual_capacities().end());
  auto ep = ll_embed_episode(p, L, sn, v, 0, paths, centralities(sn), Mode::kTrain, rng);
  EXPECT_FALSE(ep.embedding);
  ASSERT_TRUE(ep.failure);
  EXPECT_EQ(ep.failure->stage, EmbedFailure::Stage::kNodePlacement);
  EXPECT_TRUE(ep.steps.empty());
  EXPECT_TRUE(std::equal(cap.begin(), cap.end(), L.residual_capacities().begin()));
}

TEST(LlEpisode, TwoNodesOnTriangleOneHop) {
  SubstrateNetwork sn = triangle(100, 100);
  ResourceLedger L(sn);
  VNR v = make_vnr(0, 0, 1, {make_alt({5, 5}, {{0, 1, 7}})});
  PathCache paths(sn);
  auto cent = centralities(sn);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PolicyParams p = PolicyParams::init(ll_arch(3, 16), seed);
    Rng rng(seed);
    auto ep = ll_embed_episode(p, L, sn, v, 0, paths, cent, Mode::kTrain, rng);
    ASSERT_TRUE(ep.embedding);
    EXPECT_EQ(ep.embedding->link_paths[0].hops(), 1);
    EXPECT_DOUBLE_EQ(r2c(v.alternatives[0], *ep.embedding), 1.0);
    ASSERT_EQ(ep.steps.size(), 2u);
    EXPECT_DOUBLE_EQ(ep.steps[0].reward, 0.5);
    EXPECT_DOUBLE_EQ(ep.steps[1].reward, 1.5);
  }
}

TEST(LlEpisode, LedgerUntouchedFuzz) {
  std::mt19937_64 rng(77);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    SubstrateNetwork sn = uniform_substrate(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}},
                                            std::uniform_real_distribution<double>(5, 30)(rng),
                                            std::uniform_real_distribution<double>(5, 30)(rng));
    ResourceLedger L(sn);
    PathCache paths(sn);
    // Some background load.
    VNR bg = make_vnr(100, 0, 1, {make_alt({3, 3}, {{0, 1, 4}})});
    if (auto e = greedy_embed(L, sn, bg, 0, paths); succeeded(e)) L.commit(sn, bg, std::get<Embedding>(e));
    const std::vector<double> cap(L.residual_capacities().begin(), L.residual_capacities().end());
    const std::vector<double> bw(L.residual_bandwidths().begin(), L.residual_bandwidths().end());
    const int nodes = 1 + static_cast<int>(rng() % 4);
    std::vector<double> d(nodes);
    for (double& x : d) x = std::uniform_real_distribution<double>(1, 15)(rng);
    std::vector<LinkSpec> links;
    for (int i = 1; i < nodes; ++i)
      links.push_back({static_cast<int>(rng() % i), i, std::uniform_real_distribution<double>(1, 20)(rng)});
    VNR v = make_vnr(0, 0, 1, {make_alt(d, links)});
    PolicyParams p = PolicyParams::init(ll_arch(5, 8), trial);
    Rng r(trial);
    auto ep = ll_embed_episode(p, L, sn, v, 0, paths, centralities(sn), Mode::kTrain, r);
    failures += !ep.embedding;
    EXPECT_TRUE(std::equal(cap.begin(), cap.end(), L.residual_capacities().begin()));
    EXPECT_TRUE(std::equal(bw.begin(), bw.end(), L.residual_bandwidths().begin()));
    EXPECT_EQ(L.active_count(), 1 - (cap == std::vector<double>(5, L.initial_capacity(0))));
    EXPECT_NE(ep.embedding.has_value(), ep.failure.has_value());
  }
  EXPECT_GT(failures, 50);  // the fuzz must actually exercise failures
}

// ---- rewards -----------------------------------------------------------------

TEST(Rewards, HighLevel) {
  const double scale = 0.01;
  // Fig. 1 alternative Y embedded with 1-hop paths: revenue = cost = 150.
  Alternative y = fig1_y();
  Embedding e = fig1_y_embedding();
  ASSERT_DOUBLE_EQ(revenue(y), 150);
  ASSERT_DOUBLE_EQ(cost(y, e), 150);
  EXPECT_DOUBLE_EQ(reward_hl({HlOutcome::Kind::kEmbedded, 150, 150}, 1, scale), 150 * scale);
  EXPECT_DOUBLE_EQ(reward_hl({HlOutcome::Kind::kAdmittedNotEmbedded, 0, 0}, 1, scale), -scale);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    EXPECT_EQ(reward_hl({HlOutcome::Kind::kRejected, u(rng), u(rng)}, u(rng), u(rng)), 0.0);
  }
}

TEST(Rewards, LowLevel) {
  double total = 0;
  for (int k = 0; k < 3; ++k) total += reward_ll({true, k, 3, k == 2, 60, 80});
  EXPECT_DOUBLE_EQ(total, 1.0 + 0.75);
  EXPECT_DOUBLE_EQ(reward_ll({false, 0, 4}), -1.0);
  EXPECT_DOUBLE_EQ(reward_ll({false, 2, 4}), -0.5);
  EXPECT_DOUBLE_EQ(reward_ll({true, 1, 2, true, 50, 50}) - 0.5, 1.0);
}

// ---- PPO ---------------------------------------------------------------------

TEST(Ppo, ClipTerm) {
  EXPECT_DOUBLE_EQ(ppo_clip_term(1.5, 1.0, 0.2), 1.2);
  EXPECT_DOUBLE_EQ(ppo_clip_term(0.5, 1.0, 0.2), 0.5);
  EXPECT_DOUBLE_EQ(ppo_clip_term(0.5, -1.0, 0.2), -0.8);
  EXPECT_DOUBLE_EQ(ppo_clip_term(1.0, 3.0, 0.2), 3.0);
}

TEST(Ppo, GaeHandEpisodes) {
  std::vector<Transition> s(3);
  s[0].reward = 1, s[0].value = 0.5;
  s[1].reward = 2, s[1].value = 1.0, s[1].done = true;
  s[2].reward = 3, s[2].value = 0.0, s[2].done = true;
  std::vector<double> adv, ret;
  compute_gae(s, 0.9, 0.5, adv, ret);
  EXPECT_DOUBLE_EQ(adv[1], 1.0);
  EXPECT_DOUBLE_EQ(adv[0], 1 + 0.9 * 1.0 - 0.5 + 0.45 * 1.0);
  EXPECT_DOUBLE_EQ(adv[2], 3.0);
  EXPECT_DOUBLE_EQ(ret[0], adv[0] + 0.5);
}

TEST(Ppo, ZeroAdvantagesAndCoefficientsLeaveParamsUnchanged) {
  PolicyParams p = PolicyParams::init(small_arch(), 9);
  const PolicyParams before = p;
  Adam opt(p, {});
  std::mt19937_64 rng(9);
  std::vector<Transition> steps;
  for (int i = 0; i < 10; ++i) {
    NetInput in = random_input(p.arch(), rng);
    PolicyForward f = policy_forward(p, in);
    const double v = f.graph.value(f.value)(0, 0);
    steps.push_back({in, 0, f.graph.value(f.log_probs)(0, 0), v, v, true});
  }
  PpoConfig cfg;
  cfg.value_coef = 0;
  cfg.entropy_coef = 0;
  Rng r(1);
  auto st = ppo_update_stream(p, opt, steps, cfg, r);
  EXPECT_DOUBLE_EQ(st.policy_loss, 0.0);
  EXPECT_TRUE(same_values(p, before));
  // Still zero advantages: the entropy term alone moves the actor, never the
  // critic's own layers.
  cfg.entropy_coef = 0.01;
  ppo_update_stream(p, opt, steps, cfg, r);
  EXPECT_NE(p.block("actor.l1.W").value, before.block("actor.l1.W").value);
  EXPECT_EQ(p.block("critic.l0.W").value, before.block("critic.l0.W").value);
  EXPECT_EQ(p.block("critic.l1.W").value, before.block("critic.l1.W").value);
}

TEST(Ppo, FirstRatioIsOne) {
  HrlAgent agent = HrlAgent::create(5, {}, 3);
  HrlPolicy pol(agent.hl, agent.ll, agent.settings, Mode::kTrain, 3);
  run(small_source()(11), pol);
  Trajectories t = pol.take_trajectories();
  ASSERT_FALSE(t.hl.empty());
  ASSERT_FALSE(t.ll.empty());
  Rng rng(1);
  auto st = ppo_update(agent, t, {}, rng);
  EXPECT_LT(st.hl.first_ratio_deviation, 1e-12);
  EXPECT_LT(st.ll.first_ratio_deviation, 1e-12);
  EXPECT_EQ(st.hl.samples, static_cast<int>(t.hl.size()));
  EXPECT_THROW(ppo_update(agent, {}, {}, rng), InvalidArgument);
}

TEST(Ppo, BanditConverges) {
  PolicyArch a = small_arch(2, 16);
  a.actions = 2;
  PolicyParams p = PolicyParams::init(a, 12);
  Adam opt(p, {});
  std::mt19937_64 gen(12);
  NetInput in = random_input(a, gen);
  in.mask = {1, 1};
  PpoConfig cfg;
  Rng rng(12);
  int updates = 0;
  while (prob(p, in, 1) <= 0.9 && updates < 200) {
    std::vector<Transition> steps;
    for (int i = 0; i < 16; ++i) {
      StepResult s = policy_step(p, in, Mode::kTrain, rng);
      steps.push_back({in, s.action, s.log_prob, s.value, s.action == 1 ? 1.0 : 0.0, true});
    }
    ppo_update_stream(p, opt, steps, cfg, rng);
    ++updates;
  }
  EXPECT_GT(prob(p, in, 1), 0.9) << "after " << updates << " updates";
}

// ---- agent in the simulator --------------------------------------------------

TEST(HrlPolicy, ConservesResourcesAndRecordsOneHlStepPerRequest) {
  HrlAgent agent = HrlAgent::create(5, {}, 4);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Scenario s = small_source()(seed);
    HrlPolicy pol(agent.hl, agent.ll, agent.settings, Mode::kTrain, seed);
    SimulationReport rep = run(s, pol);
    EXPECT_TRUE(rep.final_ledger.at_initial());
    Trajectories t = pol.take_trajectories();
    EXPECT_EQ(t.hl.size(), s.vnrs.size());
    EXPECT_TRUE(t.hl.back().done);
    EXPECT_EQ(std::count_if(t.hl.begin(), t.hl.end(), [](const Transition& x) { return x.done; }), 1);
    for (std::size_t i = 0; i < s.vnrs.size(); ++i) {
      const VnrRecord& r = rep.records[i];
      if (r.outcome == Outcome::kRejected) EXPECT_EQ(t.hl[i].reward, 0.0);
      if (r.outcome == Outcome::kAccepted) EXPECT_GT(t.hl[i].reward, 0.0);
    }
  }
}

TEST(HrlPolicy, RejectsWrongSubstrateSize) {
  HrlAgent agent = HrlAgent::create(4, {}, 4);
  HrlPolicy pol(agent.hl, agent.ll, agent.settings, Mode::kEval, 1);
  EXPECT_THROW(run(small_source()(1), pol), ShapeError);
}

// ---- training ----------------------------------------------------------------

TEST(Train, ZeroEpisodesReturnsInitialParams) {
  TrainConfig cfg;
  cfg.episodes = 0;
  cfg.seed = 5;
  cfg.settings.hidden = 8;
  TrainResult r = train(small_source(), cfg);
  HrlAgent fresh = HrlAgent::create(5, cfg.settings, 5);
  EXPECT_TRUE(r.agent.hl == fresh.hl);
  EXPECT_TRUE(r.agent.ll == fresh.ll);
  EXPECT_TRUE(r.curve.empty());
}

TEST(Train, DeterministicAcrossJobCounts) {
  TrainConfig cfg;
  cfg.episodes = 6;
  cfg.seed = 8;
  cfg.settings.hidden = 8;
  cfg.jobs = 1;
  TrainResult a = train(small_source(), cfg);
  cfg.jobs = 3;
  TrainResult b = train(small_source(), cfg);
  ASSERT_EQ(a.curve.size(), 6u);
  std::ostringstream ca, cb;
  write_curve_csv(a.curve, ca);
  write_curve_csv(b.curve, cb);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_TRUE(a.agent.hl == b.agent.hl);
  EXPECT_TRUE(a.agent.ll == b.agent.ll);
  EXPECT_FALSE(same_values(a.agent.hl, HrlAgent::create(5, cfg.settings, 8).hl));
}

TEST(Train, WritesCheckpointsAndAgentRoundTrips) {
  const fs::path out = fresh_dir("train_out");
  TrainConfig cfg;
  cfg.episodes = 8;
  cfg.seed = 2;
  cfg.settings.hidden = 8;
  cfg.checkpoint_every = 4;
  cfg.out = out;
  TrainResult r = train(small_source(), cfg);
  EXPECT_TRUE(fs::exists(out / "checkpoints" / "episode_000004" / "hl.params"));
  EXPECT_TRUE(fs::exists(out / "checkpoints" / "episode_000008" / "agent.json"));
  std::ifstream csv(out / "curves.csv");
  int lines = 0;
  for (std::string l; std::getline(csv, l);) ++lines;
  EXPECT_EQ(lines, 9);
  HrlAgent back = load_agent(out / "agent");
  EXPECT_TRUE(back.hl == r.agent.hl);
  EXPECT_TRUE(back.ll == r.agent.ll);
  EXPECT_EQ(back.settings.reward_scale, r.agent.settings.reward_scale);
  EXPECT_GT(r.agent.settings.reward_scale, 0.0);
}

TEST(Train, WorkerFailurePropagatesAndKeepsCheckpoint) {
  const fs::path out = fresh_dir("train_fail");
  TrainConfig cfg;
  cfg.episodes = 12;
  cfg.seed = 2;
  cfg.settings.hidden = 8;
  cfg.checkpoint_every = 4;
  cfg.out = out;
  // Past the scenarios sampled for the reward scale (episodes 0..7).
  const std::uint64_t bad = episode_seed(cfg.seed, 9);
  auto base = small_source();
  ScenarioSource src = [&](std::uint64_t s) {
    if (s == bad) throw InvariantError("worker exploded");
    return base(s);
  };
  EXPECT_THROW(train(src, cfg), InvariantError);
  HrlAgent ck = load_agent(out / "checkpoints" / "episode_000008");
  EXPECT_GT(ck.hl.updates, 0u);
  EXPECT_TRUE(fs::exists(out / "checkpoints" / "episode_000008"));
  EXPECT_FALSE(fs::exists(out / "checkpoints" / "episode_000012"));
  EXPECT_FALSE(fs::exists(out / "agent"));
}

TEST(Train, RejectsBadConfig) {
  TrainConfig cfg;
  cfg.jobs = 0;
  EXPECT_THROW(train(small_source(), cfg), InvalidArgument);
  cfg.jobs = 1;
  cfg.episodes = -1;
  EXPECT_THROW(train(small_source(), cfg), InvalidArgument);
}

TEST(Train, DominanceScenarioLearned) {
  TrainConfig cfg;
  cfg.episodes = 2000;
  cfg.seed = 7;
  cfg.settings.mean_lifetime = 5;
  TrainResult r = train([](std::uint64_t s) { return dominance_scenario(s); }, cfg);
  EXPECT_GE(dominance_rate(r.agent, 1000, 40), 0.9);
}
