#ifndef VNEAP_HRL_HPP_
#define VNEAP_HRL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vneap/centrality.hpp"
#include "vneap/embed.hpp"
#include "vneap/ledger.hpp"
#include "vneap/paths.hpp"
#include "vneap/policy_net.hpp"
#include "vneap/scenario.hpp"
#include "vneap/simulator.hpp"

namespace vneap {

// ---- observations ----------------------------------------------------------

/// Per node [remaining capacity / max initial capacity, load ratio, degree
/// centrality, betweenness]; per link [remaining bandwidth / max initial
/// bandwidth, load ratio, edge betweenness].
struct SubstrateFeatures {
  Tensor2 nodes;  // |N_s| x 4
  Tensor2 links;  // |E_s| x 3
};

SubstrateFeatures encode_substrate(const SubstrateNetwork& sn, const ResourceLedger& ledger,
                                   std::span<const double> residual_capacity,
                                   std::span<const double> residual_bandwidth,
                                   const Centralities& centralities);

struct HLObservation {
  SubstrateFeatures substrate;
  /// Per alternative [nodes, links, avg capacity demand, avg bandwidth
  /// demand, avg path length, connectivity], padded with zero rows to M.
  Tensor2 alternatives;
  std::vector<char> valid;   // M entries
  double lifetime_ratio = 0;  // lifetime / mean lifetime
};

HLObservation encode_hl(const ResourceLedger& ledger, const SubstrateNetwork& sn, const VNR& vnr,
                        const Centralities& centralities, int max_alternatives,
                        double mean_lifetime);

/// [nodes, links, avg capacity demand, avg bandwidth demand, mean pairwise
/// hop distance, edge density]; a single node has path length 0 and
/// density 0.
std::vector<double> alternative_features(const Alternative& alt);

struct LLObservation {
  SubstrateFeatures substrate;
  /// Per virtual node [capacity demand, incident bandwidth, degree], padded.
  Tensor2 virtual_nodes;
  std::vector<char> valid;
  double progress = 0;  // placed / total
  double current_demand = 0;
  double current_degree = 0;
  int current_node = -1;
};

LLObservation encode_ll(const EmbeddingBuilder& builder, const ResourceLedger& ledger,
                        const Centralities& centralities, int node, int pad_to = 0);

/// M + 1 entries: alternatives, then reject (always legal). An alternative
/// is masked when it does not exist, when its largest node demand exceeds
/// the largest residual capacity, or its largest link demand exceeds the
/// largest residual bandwidth.
std::vector<char> hl_mask(const ResourceLedger& ledger, const VNR& vnr, int max_alternatives);

/// Network inputs with fixed scaling (see docs/formats.md).
NetInput hl_net_input(const HLObservation& obs, const std::vector<char>& mask,
                      const SubstrateNetwork& sn);
NetInput ll_net_input(const LLObservation& obs, const std::vector<char>& mask,
                      const SubstrateNetwork& sn);

PolicyArch hl_arch(int substrate_nodes, int max_alternatives, int hidden = 64);
PolicyArch ll_arch(int substrate_nodes, int hidden = 64);

// ---- policy steps ------------------------------------------------------------

enum class Mode { kTrain, kEval };

struct StepResult {
  int action = -1;
  double log_prob = 0;
  double value = 0;
};

/// Samples (train) or takes the argmax (eval, ties to the lowest index).
StepResult policy_step(const PolicyParams& params, const NetInput& input, Mode mode, Rng& rng);

/// Action in [0, M]; M is reject.
StepResult hl_policy_step(const PolicyParams& params, const HLObservation& obs,
                          const std::vector<char>& mask, const SubstrateNetwork& sn, Mode mode,
                          Rng& rng);

struct Transition {
  NetInput input;
  int action = 0;
  double log_prob = 0;
  double value = 0;
  double reward = 0;
  bool done = false;
};

struct Trajectories {
  std::vector<Transition> hl;  // one step per request
  std::vector<Transition> ll;  // one step per node placement
};

// ---- rewards -----------------------------------------------------------------

struct HlOutcome {
  enum class Kind { kEmbedded, kAdmittedNotEmbedded, kRejected } kind = Kind::kRejected;
  double revenue = 0;
  double cost = 0;
};

/// Embedded: revenue^2 / cost * scale; admitted but not embedded:
/// -sigma * scale; rejected: 0.
double reward_hl(const HlOutcome& outcome, double sigma, double scale);

struct LlStepOutcome {
  bool success = true;
  int placed_before = 0;
  int total = 1;
  bool final = false;  // last node placed successfully
  double revenue = 0;
  double cost = 0;
};

/// Success: 1/total, plus revenue/cost on the final step (1 when the cost
/// is zero). Failure: -(1 - placed_before/total).
double reward_ll(const LlStepOutcome& step);

// ---- low-level episode -------------------------------------------------------

struct LLEpisode {
  std::optional<Embedding> embedding;
  std::optional<EmbedFailure> failure;
  std::vector<Transition> steps;
};

/// Places the alternative's nodes in node_visit_order, one policy step
/// each, routing links to placed neighbors over the first feasible
/// candidate path. Works on a private copy of the residuals: the ledger is
/// never modified, so a failure needs no rollback.
LLEpisode ll_embed_episode(const PolicyParams& params, const ResourceLedger& ledger,
                           const SubstrateNetwork& sn, const VNR& vnr, int alternative,
                           const PathCache& paths, const Centralities& centralities, Mode mode,
                           Rng& rng);

// ---- agent / PPO -------------------------------------------------------------

struct HrlSettings {
  int max_alternatives = 4;  // M
  int k = kDefaultK;
  int hidden = 64;
  double sigma = 1.0;
  /// 1 / mean alternative revenue of the training distribution.
  double reward_scale = 1.0;
  double mean_lifetime = 50.0;

  nlohmann::json to_json() const;
  static HrlSettings from_json(const nlohmann::json& j);
};

struct PpoConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  int epochs = 4;
  int minibatch = 64;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;
  AdamConfig adam;

  nlohmann::json to_json() const;
};

/// min(ratio * adv, clip(ratio, 1 - eps, 1 + eps) * adv)
double ppo_clip_term(double ratio, double advantage, double eps);

/// Generalized advantage estimates and returns (advantage + value) for
/// consecutive episodes separated by done flags.
void compute_gae(const std::vector<Transition>& steps, double gamma, double lambda,
                 std::vector<double>& advantages, std::vector<double>& returns);

struct PpoStats {
  int samples = 0;
  double policy_loss = 0;
  double value_loss = 0;
  double entropy = 0;
  double clip_fraction = 0;
  /// max |ratio - 1| over the first minibatch, before any step.
  double first_ratio_deviation = 0;
};

struct HrlAgent {
  HrlSettings settings;
  PolicyParams hl, ll;
  Adam hl_opt, ll_opt;

  static HrlAgent create(int substrate_nodes, const HrlSettings& settings, std::uint64_t seed,
                         const AdamConfig& adam = {});
};

struct PpoUpdateStats {
  PpoStats hl, ll;
};

/// One PPO update of both levels (separate parameters and optimizers).
/// A stream without transitions is left untouched; throws InvalidArgument
/// when both are empty.
PpoUpdateStats ppo_update(HrlAgent& agent, const Trajectories& trajectories,
                          const PpoConfig& cfg, Rng& rng);

/// Single-stream update, exposed for tests.
PpoStats ppo_update_stream(PolicyParams& params, Adam& opt, const std::vector<Transition>& steps,
                           const PpoConfig& cfg, Rng& rng);

/// High level picks the alternative (or rejects), low level embeds it.
/// In train mode transitions are recorded and can be taken with
/// take_trajectories().
class HrlPolicy : public DecisionPolicy {
 public:
  HrlPolicy(const PolicyParams& hl, const PolicyParams& ll, HrlSettings settings, Mode mode,
            std::uint64_t seed);

  std::string name() const override { return "hrl"; }
  void begin_episode(const Scenario& scenario) override;
  Decision decide(const SubstrateNetwork& sn, const ResourceLedger& ledger,
                  const VNR& vnr) override;
  void observe(const VNR& vnr, const VnrRecord& record) override;
  void end_episode() override;

  Trajectories take_trajectories();

 private:
  const PolicyParams& hl_;
  const PolicyParams& ll_;
  HrlSettings settings_;
  Mode mode_;
  Rng rng_;
  std::unique_ptr<PathCache> paths_;
  const SubstrateNetwork* substrate_ = nullptr;
  Centralities centralities_;
  Trajectories traj_;
  std::vector<Transition> pending_ll_;
};

// ---- training ----------------------------------------------------------------

struct TrainConfig {
  int episodes = 100;
  /// Episodes rolled out per PPO update.
  int rollouts_per_update = 4;
  int jobs = 1;
  std::uint64_t seed = 1;
  int checkpoint_every = 0;  // episodes; 0 disables
  std::filesystem::path out;  // empty: nothing written
  HrlSettings settings;
  PpoConfig ppo;

  nlohmann::json to_json() const;
};

struct CurveRow {
  int episode = 0;
  double acceptance = 0;
  double revenue = 0;
  double r2c = 0;
  PpoUpdateStats stats;
};

struct TrainResult {
  HrlAgent agent;
  std::vector<CurveRow> curve;
};

/// Scenario for a given episode seed; every scenario must share the
/// substrate node count.
using ScenarioSource = std::function<Scenario(std::uint64_t episode_seed)>;

/// Seed of episode e: derived from (cfg.seed, e) only.
std::uint64_t episode_seed(std::uint64_t seed, int episode);

/// Mean alternative revenue over the first scenarios of the source.
double estimate_mean_revenue(const ScenarioSource& source, std::uint64_t seed, int samples = 8);

/// Rollouts with snapshot parameters on `jobs` threads (merged in episode
/// order), then one PPO update, repeated. Deterministic for a given config.
/// When cfg.out is set, writes curves.csv, checkpoints and the final
/// agent; a failure propagates after the last checkpoint has been kept.
TrainResult train(const ScenarioSource& source, const TrainConfig& cfg);

void write_curve_csv(const std::vector<CurveRow>& curve, std::ostream& out);

/// hl.params, ll.params and agent.json under dir.
void save_agent(const HrlAgent& agent, const std::filesystem::path& dir);
HrlAgent load_agent(const std::filesystem::path& dir);

}  // namespace vneap

#endif  // VNEAP_HRL_HPP_
