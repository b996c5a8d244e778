#include "vneap/hrl.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <queue>
#include <thread>

#include "vneap/error.hpp"
#include "vneap/metrics.hpp"

namespace vneap {

// ---- observations ----------------------------------------------------------

SubstrateFeatures encode_substrate(const SubstrateNetwork& sn, const ResourceLedger& ledger,
                                   std::span<const double> residual_capacity,
                                   std::span<const double> residual_bandwidth,
                                   const Centralities& c) {
  SubstrateFeatures f{Tensor2(sn.num_nodes(), 4), Tensor2(sn.num_edges(), 3)};
  double max_cap = 0, max_bw = 0;
  for (NodeId p = 0; p < sn.num_nodes(); ++p) max_cap = std::max(max_cap, ledger.initial_capacity(p));
  for (EdgeId e = 0; e < sn.num_edges(); ++e) max_bw = std::max(max_bw, ledger.initial_bandwidth(e));
  for (NodeId p = 0; p < sn.num_nodes(); ++p) {
    const double init = ledger.initial_capacity(p);
    f.nodes(p, 0) = residual_capacity[p] / max_cap;
    f.nodes(p, 1) = 1.0 - residual_capacity[p] / init;
    f.nodes(p, 2) = c.degree[p];
    f.nodes(p, 3) = c.node_betweenness[p];
  }
  for (EdgeId e = 0; e < sn.num_edges(); ++e) {
    const double init = ledger.initial_bandwidth(e);
    f.links(e, 0) = residual_bandwidth[e] / max_bw;
    f.links(e, 1) = 1.0 - residual_bandwidth[e] / init;
    f.links(e, 2) = c.edge_betweenness[e];
  }
  return f;
}

std::vector<double> alternative_features(const Alternative& alt) {
  const int n = alt.num_nodes(), m = alt.num_links();
  double cap = 0, bw = 0;
  for (const auto& v : alt.nodes()) cap += v.demand;
  for (const auto& l : alt.links()) bw += l.demand;
  double path_len = 0, density = 0;
  if (n > 1) {
    double total = 0;
    for (int s = 0; s < n; ++s) {
      std::vector<int> dist(n, -1);
      std::queue<int> q;
      dist[s] = 0;
      q.push(s);
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (const auto& adj : alt.neighbors(u))
          if (dist[adj.node] < 0) {
            dist[adj.node] = dist[u] + 1;
            q.push(adj.node);
          }
      }
      for (int t = s + 1; t < n; ++t) total += dist[t];
    }
    path_len = total / (n * (n - 1) / 2.0);
    density = 2.0 * m / (n * (n - 1.0));
  }
  return {static_cast<double>(n), static_cast<double>(m), cap / n, m ? bw / m : 0.0, path_len,
          density};
}

HLObservation encode_hl(const ResourceLedger& ledger, const SubstrateNetwork& sn, const VNR& vnr,
                        const Centralities& centralities, int max_alternatives,
                        double mean_lifetime) {
  HLObservation obs;
  obs.substrate = encode_substrate(sn, ledger, ledger.residual_capacities(),
                                   ledger.residual_bandwidths(), centralities);
  obs.alternatives = Tensor2(max_alternatives, 6);
  obs.valid.assign(max_alternatives, 0);
  const int count = std::min<int>(max_alternatives, static_cast<int>(vnr.alternatives.size()));
  for (int a = 0; a < count; ++a) {
    const auto f = alternative_features(vnr.alternatives[a]);
    for (int k = 0; k < 6; ++k) obs.alternatives(a, k) = f[k];
    obs.valid[a] = 1;
  }
  obs.lifetime_ratio = vnr.lifetime / mean_lifetime;
  return obs;
}

LLObservation encode_ll(const EmbeddingBuilder& b, const ResourceLedger& ledger,
                        const Centralities& centralities, int node, int pad_to) {
  const SubstrateNetwork& sn = b.substrate();
  const Alternative& alt = b.alternative();
  std::vector<double> cap(sn.num_nodes()), bw(sn.num_edges());
  for (NodeId p = 0; p < sn.num_nodes(); ++p) cap[p] = b.residual_capacity(p);
  for (EdgeId e = 0; e < sn.num_edges(); ++e) bw[e] = b.residual_bandwidth(e);
  LLObservation obs;
  obs.substrate = encode_substrate(sn, ledger, cap, bw, centralities);
  const int rows = std::max(pad_to, alt.num_nodes());
  obs.virtual_nodes = Tensor2(rows, 3);
  obs.valid.assign(rows, 0);
  for (int i = 0; i < alt.num_nodes(); ++i) {
    obs.virtual_nodes(i, 0) = alt.node(i).demand;
    obs.virtual_nodes(i, 1) = alt.incident_demand(i);
    obs.virtual_nodes(i, 2) = alt.degree(i);
    obs.valid[i] = 1;
  }
  obs.progress = static_cast<double>(b.placed_count()) / alt.num_nodes();
  obs.current_demand = alt.node(node).demand;
  obs.current_degree = alt.degree(node);
  obs.current_node = node;
  return obs;
}

std::vector<char> hl_mask(const ResourceLedger& ledger, const VNR& vnr, int max_alternatives) {
  std::vector<char> mask(max_alternatives + 1, 0);
  mask[max_alternatives] = 1;
  double max_cap = 0, max_bw = 0;
  for (double c : ledger.residual_capacities()) max_cap = std::max(max_cap, c);
  for (double b : ledger.residual_bandwidths()) max_bw = std::max(max_bw, b);
  const int count = std::min<int>(max_alternatives, static_cast<int>(vnr.alternatives.size()));
  for (int a = 0; a < count; ++a) {
    const Alternative& alt = vnr.alternatives[a];
    double node = 0, link = 0;
    for (const auto& v : alt.nodes()) node = std::max(node, v.demand);
    for (const auto& l : alt.links()) link = std::max(link, l.demand);
    mask[a] = node <= max_cap + kFeasibilityTol && link <= max_bw + kFeasibilityTol;
  }
  return mask;
}

namespace {

// Node rows: the 4 node features followed by the mean of the incident link
// features (zeros for an isolated node, which a substrate never has).
Tensor2 substrate_rows(const SubstrateFeatures& f, const SubstrateNetwork& sn) {
  Tensor2 t(sn.num_nodes(), 7);
  for (NodeId p = 0; p < sn.num_nodes(); ++p) {
    for (int k = 0; k < 4; ++k) t(p, k) = f.nodes(p, k);
    const auto nb = sn.neighbors(p);
    for (const auto& adj : nb)
      for (int k = 0; k < 3; ++k) t(p, 4 + k) += f.links(adj.edge, k) / nb.size();
  }
  return t;
}

}  // namespace

NetInput hl_net_input(const HLObservation& obs, const std::vector<char>& mask,
                      const SubstrateNetwork& sn) {
  NetInput in;
  in.substrate = substrate_rows(obs.substrate, sn);
  const double cap = sn.max_capacity(), bw = sn.max_bandwidth();
  const double n = sn.num_nodes(), m = sn.num_edges();
  const double scale[6] = {n, m, cap, bw, n, 1.0};
  in.vnr = Tensor2(obs.alternatives.rows, 6);
  for (int a = 0; a < obs.alternatives.rows; ++a)
    for (int k = 0; k < 6; ++k) in.vnr(a, k) = obs.alternatives(a, k) / scale[k];
  in.vnr_valid = obs.valid;
  in.context = Tensor2::row({obs.lifetime_ratio});
  in.mask = mask;
  return in;
}

NetInput ll_net_input(const LLObservation& obs, const std::vector<char>& mask,
                      const SubstrateNetwork& sn) {
  NetInput in;
  in.substrate = substrate_rows(obs.substrate, sn);
  const double cap = sn.max_capacity(), bw = sn.max_bandwidth();
  const int valid = static_cast<int>(std::count(obs.valid.begin(), obs.valid.end(), 1));
  const double deg = std::max(1, valid - 1);
  in.vnr = Tensor2(valid, 3);
  for (int i = 0, r = 0; i < obs.virtual_nodes.rows; ++i) {
    if (!obs.valid[i]) continue;
    in.vnr(r, 0) = obs.virtual_nodes(i, 0) / cap;
    in.vnr(r, 1) = obs.virtual_nodes(i, 1) / bw;
    in.vnr(r, 2) = obs.virtual_nodes(i, 2) / deg;
    ++r;
  }
  in.context = Tensor2::row({obs.progress, obs.current_demand / cap, obs.current_degree / deg});
  in.mask = mask;
  return in;
}

PolicyArch hl_arch(int substrate_nodes, int max_alternatives, int hidden) {
  PolicyArch a;
  a.substrate_nodes = substrate_nodes;
  a.substrate_features = 7;
  a.vnr_features = 6;
  a.context_features = 1;
  a.actions = max_alternatives + 1;
  a.vnr_slots = max_alternatives;
  a.hidden = hidden;
  return a;
}

PolicyArch ll_arch(int substrate_nodes, int hidden) {
  PolicyArch a;
  a.substrate_nodes = substrate_nodes;
  a.substrate_features = 7;
  a.vnr_features = 3;
  a.context_features = 3;
  a.actions = substrate_nodes;
  a.hidden = hidden;
  return a;
}

// ---- policy steps ------------------------------------------------------------

StepResult policy_step(const PolicyParams& params, const NetInput& input, Mode mode, Rng& rng) {
  const PolicyForward f = policy_forward(params, input);
  const Tensor2& lp = f.graph.value(f.log_probs);
  StepResult r;
  r.value = f.graph.value(f.value)(0, 0);
  if (mode == Mode::kEval) {
    for (int j = 0; j < lp.cols; ++j)
      if (input.mask[j] && (r.action < 0 || lp(0, j) > lp(0, r.action))) r.action = j;
  } else {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0;
    for (int j = 0; j < lp.cols; ++j) {
      if (!input.mask[j]) continue;
      r.action = j;
      acc += std::exp(lp(0, j));
      if (u < acc) break;
    }
  }
  r.log_prob = lp(0, r.action);
  return r;
}

StepResult hl_policy_step(const PolicyParams& params, const HLObservation& obs,
                          const std::vector<char>& mask, const SubstrateNetwork& sn, Mode mode,
                          Rng& rng) {
  return policy_step(params, hl_net_input(obs, mask, sn), mode, rng);
}

// ---- rewards -----------------------------------------------------------------

double reward_hl(const HlOutcome& o, double sigma, double scale) {
  switch (o.kind) {
    case HlOutcome::Kind::kEmbedded:
      return o.cost > 0 ? o.revenue * o.revenue / o.cost * scale : 0.0;
    case HlOutcome::Kind::kAdmittedNotEmbedded: return -sigma * scale;
    case HlOutcome::Kind::kRejected: return 0.0;
  }
  return 0.0;
}

double reward_ll(const LlStepOutcome& s) {
  if (!s.success) return -(1.0 - static_cast<double>(s.placed_before) / s.total);
  double r = 1.0 / s.total;
  if (s.final) r += s.cost > 0 ? s.revenue / s.cost : 1.0;
  return r;
}

// ---- low-level episode -------------------------------------------------------

LLEpisode ll_embed_episode(const PolicyParams& params, const ResourceLedger& ledger,
                           const SubstrateNetwork& sn, const VNR& vnr, int alternative,
                           const PathCache& paths, const Centralities& centralities, Mode mode,
                           Rng& rng) {
  LLEpisode ep;
  EmbeddingBuilder b(sn, ledger, vnr, alternative, paths);
  const Alternative& alt = b.alternative();
  const int total = alt.num_nodes();
  for (int i : node_visit_order(alt)) {
    const int before = b.placed_count();
    auto mask = b.host_mask(i);
    if (std::none_of(mask.begin(), mask.end(), [](char m) { return m != 0; })) {
      // Dead end: the previous choice is charged with the failure.
      if (!ep.steps.empty())
        ep.steps.back().reward += reward_ll({false, before, total});
      ep.failure = EmbedFailure{EmbedFailure::Stage::kNodePlacement, i};
      break;
    }
    NetInput in = ll_net_input(encode_ll(b, ledger, centralities, i), mask, sn);
    const StepResult s = policy_step(params, in, mode, rng);
    Transition t{std::move(in), s.action, s.log_prob, s.value, 0.0, false};
    if (!b.place(i, s.action)) {
      t.reward = reward_ll({false, before, total});
      ep.steps.push_back(std::move(t));
      ep.failure = EmbedFailure{EmbedFailure::Stage::kLinkRouting, i};
      break;
    }
    LlStepOutcome o{true, before, total, b.complete()};
    if (o.final) {
      ep.embedding = b.finish();
      o.revenue = revenue(alt);
      o.cost = cost(alt, *ep.embedding);
    }
    t.reward = reward_ll(o);
    ep.steps.push_back(std::move(t));
  }
  if (!ep.steps.empty()) ep.steps.back().done = true;
  return ep;
}

// ---- settings ----------------------------------------------------------------

nlohmann::json HrlSettings::to_json() const {
  return {{"max_alternatives", max_alternatives}, {"k", k}, {"hidden", hidden},
          {"sigma", sigma}, {"reward_scale", reward_scale}, {"mean_lifetime", mean_lifetime}};
}

HrlSettings HrlSettings::from_json(const nlohmann::json& j) {
  HrlSettings s;
  try {
    s.max_alternatives = j.at("max_alternatives").get<int>();
    s.k = j.at("k").get<int>();
    s.hidden = j.at("hidden").get<int>();
    s.sigma = j.at("sigma").get<double>();
    s.reward_scale = j.at("reward_scale").get<double>();
    s.mean_lifetime = j.at("mean_lifetime").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("agent settings: ") + e.what());
  }
  return s;
}

nlohmann::json PpoConfig::to_json() const {
  return {{"gamma", gamma},
          {"lambda", lambda},
          {"clip", clip},
          {"value_coef", value_coef},
          {"entropy_coef", entropy_coef},
          {"epochs", epochs},
          {"minibatch", minibatch},
          {"max_grad_norm", max_grad_norm},
          {"normalize_advantages", normalize_advantages},
          {"adam", {{"lr", adam.lr}, {"beta1", adam.beta1}, {"beta2", adam.beta2}, {"eps", adam.eps}}}};
}

// ---- PPO ---------------------------------------------------------------------

double ppo_clip_term(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

void compute_gae(const std::vector<Transition>& steps, double gamma, double lambda,
                 std::vector<double>& adv, std::vector<double>& ret) {
  const std::size_t n = steps.size();
  adv.assign(n, 0.0);
  ret.assign(n, 0.0);
  double next_adv = 0, next_value = 0;
  for (std::size_t k = n; k-- > 0;) {
    const Transition& t = steps[k];
    if (t.done || k + 1 == n) next_adv = 0, next_value = 0;
    const double delta = t.reward + gamma * next_value - t.value;
    adv[k] = delta + gamma * lambda * next_adv;
    ret[k] = adv[k] + t.value;
    next_adv = adv[k];
    next_value = t.value;
  }
}

PpoStats ppo_update_stream(PolicyParams& params, Adam& opt, const std::vector<Transition>& steps,
                           const PpoConfig& cfg, Rng& rng) {
  PpoStats st;
  if (steps.empty()) return st;
  std::vector<double> adv, ret;
  compute_gae(steps, cfg.gamma, cfg.lambda, adv, ret);
  if (cfg.normalize_advantages && adv.size() > 1) {
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / adv.size();
    double var = 0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / adv.size());
    if (sd > 1e-8)
      for (double& a : adv) a = (a - mean) / sd;
  }
  const int n = static_cast<int>(steps.size());
  const int mb = std::max(1, cfg.minibatch);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  double policy_loss = 0, value_loss = 0, entropy = 0;
  int clipped = 0, evaluated = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += mb) {
      const int end = std::min(n, start + mb);
      const double inv = 1.0 / (end - start);
      params.zero_grad();
      for (int k = start; k < end; ++k) {
        const Transition& t = steps[order[k]];
        const double A = adv[order[k]];
        PolicyForward f = policy_forward_tracked(params, t.input);
        const Tensor2& lp = f.graph.value(f.log_probs);
        const double v = f.graph.value(f.value)(0, 0);
        const double ratio = std::exp(lp(0, t.action) - t.log_prob);
        if (epoch == 0 && start == 0)
          st.first_ratio_deviation = std::max(st.first_ratio_deviation, std::abs(ratio - 1.0));
        Tensor2 seed(1, lp.cols);
        const double surrogate = ppo_clip_term(ratio, A, cfg.clip);
        if (ratio * A <= surrogate) {
          seed(0, t.action) -= ratio * A * inv;
        } else {
          ++clipped;
        }
        double h = 0;
        for (int j = 0; j < lp.cols; ++j) {
          if (!t.input.mask[j]) continue;
          const double p = std::exp(lp(0, j));
          h -= p * lp(0, j);
          // d(-c * H)/d logp_j = c * p_j (logp_j + 1)
          seed(0, j) += cfg.entropy_coef * p * (lp(0, j) + 1.0) * inv;
        }
        const double dv = v - ret[order[k]];
        f.graph.backward({{f.log_probs, seed}, {f.value, Tensor2(1, 1, 2 * cfg.value_coef * dv * inv)}});
        policy_loss -= surrogate;
        value_loss += dv * dv;
        entropy += h;
        ++evaluated;
      }
      if (cfg.max_grad_norm > 0) {
        double norm = 0;
        for (const ParamBlock& b : params.blocks())
          for (double g : b.grad.data) norm += g * g;
        norm = std::sqrt(norm);
        if (norm > cfg.max_grad_norm)
          for (ParamBlock& b : params.blocks())
            for (double& g : b.grad.data) g *= cfg.max_grad_norm / norm;
      }
      opt.step(params);
    }
  }
  st.samples = n;
  if (evaluated) {
    st.policy_loss = policy_loss / evaluated;
    st.value_loss = value_loss / evaluated;
    st.entropy = entropy / evaluated;
    st.clip_fraction = static_cast<double>(clipped) / evaluated;
  }
  params.zero_grad();
  return st;
}

HrlAgent HrlAgent::create(int substrate_nodes, const HrlSettings& settings, std::uint64_t seed,
                          const AdamConfig& adam) {
  HrlAgent a;
  a.settings = settings;
  a.hl = PolicyParams::init(hl_arch(substrate_nodes, settings.max_alternatives, settings.hidden),
                            seed * 2 + 1);
  a.ll = PolicyParams::init(ll_arch(substrate_nodes, settings.hidden), seed * 2 + 2);
  a.hl_opt = Adam(a.hl, adam);
  a.ll_opt = Adam(a.ll, adam);
  return a;
}

PpoUpdateStats ppo_update(HrlAgent& agent, const Trajectories& traj, const PpoConfig& cfg,
                          Rng& rng) {
  if (traj.hl.empty() && traj.ll.empty())
    throw InvalidArgument("ppo_update: no transitions in either stream");
  PpoUpdateStats s;
  s.hl = ppo_update_stream(agent.hl, agent.hl_opt, traj.hl, cfg, rng);
  s.ll = ppo_update_stream(agent.ll, agent.ll_opt, traj.ll, cfg, rng);
  return s;
}

// ---- decision policy ---------------------------------------------------------

HrlPolicy::HrlPolicy(const PolicyParams& hl, const PolicyParams& ll, HrlSettings settings,
                     Mode mode, std::uint64_t seed)
    : hl_(hl), ll_(ll), settings_(settings), mode_(mode), rng_(make_rng(seed, 201)) {}

void HrlPolicy::begin_episode(const Scenario& scenario) {
  if (scenario.substrate.num_nodes() != hl_.arch().substrate_nodes)
    throw ShapeError("agent was built for " + std::to_string(hl_.arch().substrate_nodes) +
                     " substrate nodes, scenario has " +
                     std::to_string(scenario.substrate.num_nodes()));
  paths_ = std::make_unique<PathCache>(scenario.substrate, settings_.k);
  substrate_ = &scenario.substrate;
  centralities_ = centralities(scenario.substrate);
}

Decision HrlPolicy::decide(const SubstrateNetwork& sn, const ResourceLedger& ledger,
                           const VNR& vnr) {
  if (substrate_ != &sn) {
    paths_ = std::make_unique<PathCache>(sn, settings_.k);
    substrate_ = &sn;
    centralities_ = centralities(sn);
  }
  const int M = settings_.max_alternatives;
  const auto mask = hl_mask(ledger, vnr, M);
  NetInput in = hl_net_input(encode_hl(ledger, sn, vnr, centralities_, M, settings_.mean_lifetime),
                             mask, sn);
  const StepResult s = policy_step(hl_, in, mode_, rng_);
  if (mode_ == Mode::kTrain)
    traj_.hl.push_back({std::move(in), s.action, s.log_prob, s.value, 0.0, false});
  if (s.action == M) return Decision::reject();
  LLEpisode ep = ll_embed_episode(ll_, ledger, sn, vnr, s.action, *paths_, centralities_, mode_, rng_);
  if (mode_ == Mode::kTrain)
    for (Transition& t : ep.steps) traj_.ll.push_back(std::move(t));
  if (ep.embedding) return Decision::select(std::move(*ep.embedding));
  return Decision::admit_failed(s.action);
}

void HrlPolicy::observe(const VNR&, const VnrRecord& record) {
  if (mode_ != Mode::kTrain || traj_.hl.empty()) return;
  HlOutcome o;
  switch (record.outcome) {
    case Outcome::kAccepted:
      o = {HlOutcome::Kind::kEmbedded, record.revenue, record.cost};
      break;
    case Outcome::kEmbeddingFailed: o.kind = HlOutcome::Kind::kAdmittedNotEmbedded; break;
    case Outcome::kRejected: o.kind = HlOutcome::Kind::kRejected; break;
  }
  traj_.hl.back().reward = reward_hl(o, settings_.sigma, settings_.reward_scale);
}

void HrlPolicy::end_episode() {
  if (!traj_.hl.empty()) traj_.hl.back().done = true;
}

Trajectories HrlPolicy::take_trajectories() {
  Trajectories t = std::move(traj_);
  traj_ = {};
  return t;
}

// ---- training ----------------------------------------------------------------

nlohmann::json TrainConfig::to_json() const {
  return {{"episodes", episodes},
          {"rollouts_per_update", rollouts_per_update},
          {"jobs", jobs},
          {"seed", seed},
          {"checkpoint_every", checkpoint_every},
          {"settings", settings.to_json()},
          {"ppo", ppo.to_json()}};
}

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(episode), 0x5eedu};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double estimate_mean_revenue(const ScenarioSource& source, std::uint64_t seed, int samples) {
  double total = 0;
  int count = 0;
  for (int e = 0; e < samples; ++e) {
    const Scenario s = source(episode_seed(seed, e));
    for (const VNR& v : s.vnrs)
      for (const Alternative& a : v.alternatives) {
        total += revenue(a);
        ++count;
      }
  }
  return count ? total / count : 1.0;
}

void write_curve_csv(const std::vector<CurveRow>& curve, std::ostream& out) {
  out << "episode,acceptance,revenue,r2c,hl_policy_loss,hl_value_loss,hl_entropy,"
         "ll_policy_loss,ll_value_loss,ll_entropy\n";
  for (const CurveRow& r : curve) {
    out << r.episode << ',' << format_double(r.acceptance) << ',' << format_double(r.revenue) << ','
        << format_double(r.r2c) << ',' << format_double(r.stats.hl.policy_loss) << ','
        << format_double(r.stats.hl.value_loss) << ',' << format_double(r.stats.hl.entropy) << ','
        << format_double(r.stats.ll.policy_loss) << ',' << format_double(r.stats.ll.value_loss)
        << ',' << format_double(r.stats.ll.entropy) << '\n';
  }
}

void save_agent(const HrlAgent& agent, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_params(agent.hl, dir / "hl.params");
  save_params(agent.ll, dir / "ll.params");
  nlohmann::json j{{"format", "vneap-agent"},
                   {"version", 1},
                   {"settings", agent.settings.to_json()},
                   {"hl", agent.hl.arch().to_json()},
                   {"ll", agent.ll.arch().to_json()},
                   {"hl_updates", agent.hl.updates},
                   {"ll_updates", agent.ll.updates}};
  std::ofstream out(dir / "agent.json");
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + (dir / "agent.json").string());
}

HrlAgent load_agent(const std::filesystem::path& dir) {
  std::ifstream in(dir / "agent.json");
  if (!in) throw Error("cannot open " + (dir / "agent.json").string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError((dir / "agent.json").string() + ": " + e.what());
  }
  if (j.value("format", "") != "vneap-agent" || j.value("version", 0) != 1)
    throw FormatError((dir / "agent.json").string() + ": not a version 1 agent description");
  HrlAgent a;
  a.settings = HrlSettings::from_json(j.at("settings"));
  a.hl = load_params(dir / "hl.params", PolicyArch::from_json(j.at("hl")));
  a.ll = load_params(dir / "ll.params", PolicyArch::from_json(j.at("ll")));
  if (a.hl.arch().substrate_nodes != a.ll.arch().substrate_nodes)
    throw ShapeError("agent levels disagree on the substrate size");
  a.hl_opt = Adam(a.hl, {});
  a.ll_opt = Adam(a.ll, {});
  return a;
}

namespace {

struct Rollout {
  SimulationReport report;
  Trajectories traj;
  std::exception_ptr error;
};

Rollout rollout(const ScenarioSource& source, const PolicyParams& hl, const PolicyParams& ll,
                const HrlSettings& settings, std::uint64_t seed) {
  Rollout r;
  try {
    const Scenario s = source(seed);
    HrlPolicy policy(hl, ll, settings, Mode::kTrain, seed);
    r.report = run(s, policy);
    r.traj = policy.take_trajectories();
  } catch (...) {
    r.error = std::current_exception();
  }
  return r;
}

}  // namespace

TrainResult train(const ScenarioSource& source, const TrainConfig& cfg) {
  if (cfg.episodes < 0) throw InvalidArgument("train: episodes must be >= 0");
  if (cfg.rollouts_per_update < 1) throw InvalidArgument("train: rollouts_per_update must be >= 1");
  if (cfg.jobs < 1) throw InvalidArgument("train: jobs must be >= 1");
  HrlSettings settings = cfg.settings;
  const Scenario first = source(episode_seed(cfg.seed, 0));
  const int n = first.substrate.num_nodes();
  TrainResult result;
  result.agent = HrlAgent::create(n, settings, cfg.seed, cfg.ppo.adam);
  if (cfg.episodes == 0) return result;
  result.agent.settings.reward_scale = 1.0 / estimate_mean_revenue(source, cfg.seed);
  settings = result.agent.settings;

  if (!cfg.out.empty()) std::filesystem::create_directories(cfg.out);
  auto write_curves = [&] {
    if (cfg.out.empty()) return;
    std::ofstream out(cfg.out / "curves.csv");
    write_curve_csv(result.curve, out);
  };

  Rng rng = make_rng(cfg.seed, 301);
  int done = 0;
  while (done < cfg.episodes) {
    const int batch = std::min(cfg.rollouts_per_update, cfg.episodes - done);
    const PolicyParams hl = result.agent.hl, ll = result.agent.ll;  // snapshots
    std::vector<Rollout> slots(batch);
    auto work = [&](int worker) {
      for (int b = worker; b < batch; b += cfg.jobs)
        slots[b] = rollout(source, hl, ll, settings, episode_seed(cfg.seed, done + b));
    };
    const int threads = std::min(cfg.jobs, batch);
    if (threads <= 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    Trajectories merged;
    for (Rollout& r : slots) {
      if (r.error) {
        write_curves();
        std::rethrow_exception(r.error);
      }
      for (auto& t : r.traj.hl) merged.hl.push_back(std::move(t));
      for (auto& t : r.traj.ll) merged.ll.push_back(std::move(t));
    }
    PpoUpdateStats stats;
    if (!merged.hl.empty() || !merged.ll.empty())
      stats = ppo_update(result.agent, merged, cfg.ppo, rng);
    for (int b = 0; b < batch; ++b) {
      const SimulationReport& rep = slots[b].report;
      result.curve.push_back({done + b, rep.acceptance_ratio, rep.total_revenue, rep.r2c, stats});
    }
    const int before = done;
    done += batch;
    if (!cfg.out.empty() && cfg.checkpoint_every > 0 &&
        done / cfg.checkpoint_every > before / cfg.checkpoint_every) {
      char name[32];
      std::snprintf(name, sizeof name, "episode_%06d", done);
      save_agent(result.agent, cfg.out / "checkpoints" / name);
      write_curves();
    }
  }
  if (!cfg.out.empty()) {
    save_agent(result.agent, cfg.out / "agent");
    write_curves();
  }
  return result;
}

}  // namespace vneap
