#ifndef VNEAP_POLICY_NET_HPP_
#define VNEAP_POLICY_NET_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vneap/nn.hpp"

namespace vneap {

/// Shape of one policy/value network. The high and low level each own a
/// network of this form with different input widths and action counts.
struct PolicyArch {
  int substrate_nodes = 1;
  int substrate_features = 7;
  int vnr_features = 6;
  int context_features = 1;
  int actions = 2;
  /// When > 0 the request branch has exactly this many rows and its gated
  /// features are also flattened into the state, so that per-slot actions
  /// (the high level's alternatives) can tell the slots apart.
  int vnr_slots = 0;
  int hidden = 64;          // d_h
  int encoder_layers = 2;   // per branch MLP depth
  int head_layers = 2;      // actor / critic MLP depth
  double gem_eps = 1e-6;
  double gem_p_init = 3.0;

  int state_width() const { return hidden * (substrate_nodes + 2 + vnr_slots); }
  void validate() const;
  nlohmann::json to_json() const;
  static PolicyArch from_json(const nlohmann::json& j);
  friend bool operator==(const PolicyArch&, const PolicyArch&) = default;
};

struct ParamBlock {
  std::string name;
  Tensor2 value;
  Tensor2 grad;
};

/// Named parameter blocks with matching gradient buffers.
class PolicyParams {
 public:
  PolicyParams() = default;
  /// Glorot-uniform weights, zero biases, small actor output layer, GeM
  /// exponents at gem_p_init.
  static PolicyParams init(const PolicyArch& arch, std::uint64_t seed);
  /// Every weight and bias zero; GeM exponents at gem_p_init.
  static PolicyParams zeros(const PolicyArch& arch);

  const PolicyArch& arch() const { return arch_; }
  std::vector<ParamBlock>& blocks() { return blocks_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  ParamBlock& block(const std::string& name);
  const ParamBlock& block(const std::string& name) const;
  bool has_block(const std::string& name) const { return index_.count(name) > 0; }
  std::size_t num_scalars() const;
  void zero_grad();

  /// Optimizer steps applied so far.
  std::uint64_t updates = 0;

  friend bool operator==(const PolicyParams& a, const PolicyParams& b);

 private:
  void add_block(std::string name, int rows, int cols);
  void add_mlp(const std::string& prefix, int in, int out, int layers);
  void build(const PolicyArch& arch);

  PolicyArch arch_;
  std::vector<ParamBlock> blocks_;
  std::map<std::string, int> index_;
};

/// Effective GeM exponent of a 1x1 theta block: 1 + softplus(theta).
double gem_exponent(const ParamBlock& theta);

/// One network evaluation. Substrate rows are nodes, vnr rows are the valid
/// entities (alternatives or virtual nodes), context is a single row.
struct NetInput {
  Tensor2 substrate;
  Tensor2 vnr;
  Tensor2 context;
  std::vector<char> mask;  // one entry per action
  /// Valid request rows; empty means all. Invalid rows are left out of
  /// pooling and zeroed in the flattened slots.
  std::vector<char> vnr_valid;
};

struct PolicyForward {
  Graph graph;
  Graph::Var log_probs = -1;  // 1 x actions, -inf where masked
  Graph::Var value = -1;      // 1 x 1
  Graph::Var h_sum = -1;      // GeM of gated substrate features
  Graph::Var h_flat = -1;     // flattened gated substrate features
  Graph::Var v_sum = -1;      // GeM of gated request features
  Graph::Var v_flat = -1;     // flattened gated request slots (vnr_slots > 0)
  Graph::Var s_gated = -1;    // GeM inputs, for clamp-boundary checks
  Graph::Var v_gated = -1;
};

/// Encoders, contextual gating, GeM pooling and the actor / critic heads.
/// With track_grad, backward() on the result accumulates into the
/// parameter gradient buffers (the params must outlive the forward).
PolicyForward policy_forward(const PolicyParams& params, const NetInput& input);
PolicyForward policy_forward_tracked(PolicyParams& params, const NetInput& input);

/// Plain MLP over the blocks `<prefix>.l<k>.{W,b}`: tanh between layers,
/// linear output.
Tensor2 mlp_forward(const PolicyParams& params, const std::string& prefix, const Tensor2& input);
/// With track, gradients accumulate into the params' buffers.
Graph::Var mlp(Graph& g, const PolicyParams& params, const std::string& prefix, Graph::Var x,
               bool track = false);

/// Contextual gate: G = sigmoid([H | h_ctx] W + b), H~ = H * G.
struct GateResult {
  Tensor2 gate;
  Tensor2 gated;
};
GateResult gate(const Tensor2& h, const Tensor2& context, const Tensor2& w, const Tensor2& b);

/// Column-wise generalized mean with exponent p >= 1 and clamp eps.
std::vector<double> gem_pool(const Tensor2& h, double p, double eps = 1e-6);

/// Adaptive moment estimation.
struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(const PolicyParams& params, AdamConfig cfg);
  /// One step from the accumulated gradients; increments params.updates.
  void step(PolicyParams& params);
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::vector<Tensor2> m_, v_;
  std::uint64_t t_ = 0;
};

/// Binary parameter file (see docs/formats.md). Bit-exact round trip.
void save_params(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_params(const std::filesystem::path& path);
/// Also checks every block against `expected`; a mismatch throws
/// ShapeError naming the first offending block.
PolicyParams load_params(const std::filesystem::path& path, const PolicyArch& expected);

}  // namespace vneap

#endif  // VNEAP_POLICY_NET_HPP_
