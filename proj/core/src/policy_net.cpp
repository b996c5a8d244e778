#include "vneap/policy_net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "vneap/error.hpp"

namespace vneap {

namespace {

constexpr char kMagic[8] = {'V', 'N', 'E', 'A', 'P', 'P', 'R', 'M'};
constexpr std::uint32_t kVersion = 1;

std::string layer_name(const std::string& prefix, int k, const char* what) {
  return prefix + ".l" + std::to_string(k) + "." + what;
}

}  // namespace

void PolicyArch::validate() const {
  auto positive = [](int v, const char* field) {
    if (v < 1) throw InvalidArgument(std::string("policy architecture: ") + field + " must be >= 1");
  };
  positive(substrate_nodes, "substrate_nodes");
  positive(substrate_features, "substrate_features");
  positive(vnr_features, "vnr_features");
  positive(context_features, "context_features");
  positive(actions, "actions");
  positive(hidden, "hidden");
  positive(encoder_layers, "encoder_layers");
  positive(head_layers, "head_layers");
  if (vnr_slots < 0) throw InvalidArgument("policy architecture: vnr_slots must be >= 0");
  if (!(gem_eps > 0)) throw InvalidArgument("policy architecture: gem_eps must be > 0");
  if (!(gem_p_init > 1)) throw InvalidArgument("policy architecture: gem_p_init must be > 1");
}

nlohmann::json PolicyArch::to_json() const {
  return {{"substrate_nodes", substrate_nodes}, {"substrate_features", substrate_features},
          {"vnr_features", vnr_features},       {"context_features", context_features},
          {"actions", actions},                 {"vnr_slots", vnr_slots},
          {"hidden", hidden},
          {"encoder_layers", encoder_layers},   {"head_layers", head_layers},
          {"gem_eps", gem_eps},                 {"gem_p_init", gem_p_init}};
}

PolicyArch PolicyArch::from_json(const nlohmann::json& j) {
  PolicyArch a;
  try {
    a.substrate_nodes = j.at("substrate_nodes").get<int>();
    a.substrate_features = j.at("substrate_features").get<int>();
    a.vnr_features = j.at("vnr_features").get<int>();
    a.context_features = j.at("context_features").get<int>();
    a.actions = j.at("actions").get<int>();
    a.vnr_slots = j.at("vnr_slots").get<int>();
    a.hidden = j.at("hidden").get<int>();
    a.encoder_layers = j.at("encoder_layers").get<int>();
    a.head_layers = j.at("head_layers").get<int>();
    a.gem_eps = j.at("gem_eps").get<double>();
    a.gem_p_init = j.at("gem_p_init").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("policy architecture: ") + e.what());
  }
  a.validate();
  return a;
}

void PolicyParams::add_block(std::string name, int rows, int cols) {
  index_[name] = static_cast<int>(blocks_.size());
  blocks_.push_back({std::move(name), Tensor2(rows, cols), Tensor2(rows, cols)});
}

void PolicyParams::add_mlp(const std::string& prefix, int in, int out, int layers) {
  for (int k = 0; k < layers; ++k) {
    const int fan_in = k == 0 ? in : arch_.hidden;
    const int fan_out = k == layers - 1 ? out : arch_.hidden;
    add_block(layer_name(prefix, k, "W"), fan_in, fan_out);
    add_block(layer_name(prefix, k, "b"), 1, fan_out);
  }
}

void PolicyParams::build(const PolicyArch& arch) {
  arch.validate();
  arch_ = arch;
  blocks_.clear();
  index_.clear();
  const int d = arch.hidden;
  add_mlp("enc_s", arch.substrate_features, d, arch.encoder_layers);
  add_mlp("enc_v", arch.vnr_features, d, arch.encoder_layers);
  add_mlp("enc_c", arch.context_features, d, arch.encoder_layers);
  add_block("gate_s.W", 2 * d, d);
  add_block("gate_s.b", 1, d);
  add_block("gate_v.W", 2 * d, d);
  add_block("gate_v.b", 1, d);
  add_block("gem_s.theta", 1, 1);
  add_block("gem_v.theta", 1, 1);
  add_mlp("actor", arch.state_width(), arch.actions, arch.head_layers);
  add_mlp("critic", arch.state_width(), 1, arch.head_layers);
  const double theta = softplus_inverse(arch.gem_p_init - 1.0);
  block("gem_s.theta").value(0, 0) = theta;
  block("gem_v.theta").value(0, 0) = theta;
}

PolicyParams PolicyParams::zeros(const PolicyArch& arch) {
  PolicyParams p;
  p.build(arch);
  return p;
}

PolicyParams PolicyParams::init(const PolicyArch& arch, std::uint64_t seed) {
  PolicyParams p = zeros(arch);
  std::mt19937_64 rng(seed);
  const std::string actor_out = layer_name("actor", arch.head_layers - 1, "W");
  for (ParamBlock& b : p.blocks_) {
    if (b.name.size() < 2 || b.name.substr(b.name.size() - 2) != ".W") continue;
    double limit = std::sqrt(6.0 / (b.value.rows + b.value.cols));
    if (b.name == actor_out) limit *= 0.01;
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& v : b.value.data) v = u(rng);
  }
  return p;
}

ParamBlock& PolicyParams::block(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw InvalidArgument("no parameter block '" + name + "'");
  return blocks_[it->second];
}

const ParamBlock& PolicyParams::block(const std::string& name) const {
  return const_cast<PolicyParams*>(this)->block(name);
}

std::size_t PolicyParams::num_scalars() const {
  std::size_t n = 0;
  for (const ParamBlock& b : blocks_) n += b.value.size();
  return n;
}

void PolicyParams::zero_grad() {
  for (ParamBlock& b : blocks_) std::fill(b.grad.data.begin(), b.grad.data.end(), 0.0);
}

bool operator==(const PolicyParams& a, const PolicyParams& b) {
  if (!(a.arch_ == b.arch_) || a.updates != b.updates || a.blocks_.size() != b.blocks_.size())
    return false;
  for (std::size_t k = 0; k < a.blocks_.size(); ++k)
    if (a.blocks_[k].name != b.blocks_[k].name || !(a.blocks_[k].value == b.blocks_[k].value))
      return false;
  return true;
}

double gem_exponent(const ParamBlock& theta) { return 1.0 + softplus(theta.value(0, 0)); }

namespace {

class Binder {
 public:
  Binder(Graph& g, const PolicyParams& p, bool track) : g_(g), p_(p), track_(track) {}
  Graph::Var operator()(const std::string& name) {
    const ParamBlock& b = p_.block(name);
    return g_.param(b.value, track_ ? const_cast<Tensor2*>(&b.grad) : nullptr);
  }
  Graph& graph() { return g_; }

 private:
  Graph& g_;
  const PolicyParams& p_;
  bool track_;
};

Graph::Var mlp_bound(Binder& bind, const PolicyParams& params, const std::string& prefix,
                     Graph::Var x) {
  Graph& g = bind.graph();
  for (int k = 0;; ++k) {
    const std::string w = layer_name(prefix, k, "W");
    if (!params.has_block(w)) {
      if (k == 0) throw InvalidArgument("no MLP with prefix '" + prefix + "'");
      return x;
    }
    const Tensor2& W = params.block(w).value;
    if (g.value(x).cols != W.rows)
      throw ShapeError("block " + w + ": input has " + std::to_string(g.value(x).cols) +
                       " features, layer expects " + std::to_string(W.rows));
    if (k > 0) x = g.tanh(x);
    x = g.add_row(g.matmul(x, bind(w)), bind(layer_name(prefix, k, "b")));
  }
}

void check_input(const PolicyArch& a, const NetInput& in) {
  auto bad = [](const std::string& what, const Tensor2& t, const std::string& expected) {
    throw ShapeError("network input " + what + " is " + t.shape_string() + ", expected " + expected);
  };
  if (in.substrate.rows != a.substrate_nodes || in.substrate.cols != a.substrate_features)
    bad("substrate", in.substrate,
        std::to_string(a.substrate_nodes) + "x" + std::to_string(a.substrate_features));
  if (in.vnr.rows < 1 || in.vnr.cols != a.vnr_features)
    bad("vnr", in.vnr, "Nx" + std::to_string(a.vnr_features) + " with N >= 1");
  if (a.vnr_slots > 0 && in.vnr.rows != a.vnr_slots)
    bad("vnr", in.vnr, std::to_string(a.vnr_slots) + "x" + std::to_string(a.vnr_features));
  if (!in.vnr_valid.empty()) {
    if (static_cast<int>(in.vnr_valid.size()) != in.vnr.rows)
      throw ShapeError("vnr validity mask has " + std::to_string(in.vnr_valid.size()) +
                       " entries for " + std::to_string(in.vnr.rows) + " rows");
    if (std::none_of(in.vnr_valid.begin(), in.vnr_valid.end(), [](char v) { return v != 0; }))
      throw ShapeError("vnr validity mask selects no row");
  }
  if (in.context.rows != 1 || in.context.cols != a.context_features)
    bad("context", in.context, "1x" + std::to_string(a.context_features));
  if (static_cast<int>(in.mask.size()) != a.actions)
    throw ShapeError("action mask has " + std::to_string(in.mask.size()) + " entries, expected " +
                     std::to_string(a.actions));
}

PolicyForward forward_impl(const PolicyParams& params, const NetInput& in, bool track) {
  const PolicyArch& a = params.arch();
  check_input(a, in);
  PolicyForward f;
  Graph& g = f.graph;
  Binder bind(g, params, track);
  auto gated = [&](Graph::Var h, Graph::Var ctx, const std::string& gate) {
    const int n = g.value(h).rows;
    auto cat = g.concat_cols(h, g.broadcast_rows(ctx, n));
    auto G = g.sigmoid(g.add_row(g.matmul(cat, bind(gate + ".W")), bind(gate + ".b")));
    return g.mul(h, G);
  };
  const auto hs = mlp_bound(bind, params, "enc_s", g.input(in.substrate));
  const auto hv = mlp_bound(bind, params, "enc_v", g.input(in.vnr));
  const auto hc = mlp_bound(bind, params, "enc_c", g.input(in.context));
  const auto hs_t = gated(hs, hc, "gate_s");
  const auto hv_t = gated(hv, hc, "gate_v");
  f.s_gated = hs_t;
  f.v_gated = hv_t;
  f.h_sum = g.gem(hs_t, bind("gem_s.theta"), a.gem_eps);
  f.h_flat = g.flatten(hs_t);
  auto pooled_v = hv_t;
  if (!in.vnr_valid.empty()) {
    std::vector<int> rows;
    Tensor2 keep(in.vnr.rows, a.hidden);
    for (int r = 0; r < in.vnr.rows; ++r)
      if (in.vnr_valid[r]) {
        rows.push_back(r);
        std::fill_n(&keep(r, 0), a.hidden, 1.0);
      }
    pooled_v = g.select_rows(hv_t, rows);
    if (a.vnr_slots > 0) f.v_flat = g.flatten(g.mul(hv_t, g.input(std::move(keep))));
  } else if (a.vnr_slots > 0) {
    f.v_flat = g.flatten(hv_t);
  }
  f.v_sum = g.gem(pooled_v, bind("gem_v.theta"), a.gem_eps);
  auto state = g.concat_cols(g.concat_cols(f.h_sum, f.h_flat), f.v_sum);
  if (f.v_flat >= 0) state = g.concat_cols(state, f.v_flat);
  f.log_probs = g.masked_log_softmax(mlp_bound(bind, params, "actor", state), in.mask);
  f.value = mlp_bound(bind, params, "critic", state);
  return f;
}

}  // namespace

PolicyForward policy_forward(const PolicyParams& params, const NetInput& input) {
  return forward_impl(params, input, false);
}

PolicyForward policy_forward_tracked(PolicyParams& params, const NetInput& input) {
  return forward_impl(params, input, true);
}

Graph::Var mlp(Graph& g, const PolicyParams& params, const std::string& prefix, Graph::Var x,
               bool track) {
  Binder bind(g, params, track);
  return mlp_bound(bind, params, prefix, x);
}

Tensor2 mlp_forward(const PolicyParams& params, const std::string& prefix, const Tensor2& input) {
  Graph g;
  return g.value(mlp(g, params, prefix, g.input(input)));
}

GateResult gate(const Tensor2& h, const Tensor2& context, const Tensor2& w, const Tensor2& b) {
  if (context.rows != 1) throw ShapeError("gate: context must be a single row");
  if (w.rows != h.cols + context.cols)
    throw ShapeError("gate: weight fan-in " + std::to_string(w.rows) + " != " +
                     std::to_string(h.cols) + " features + " + std::to_string(context.cols) +
                     " context");
  if (w.cols != h.cols) throw ShapeError("gate: weight fan-out must equal feature width");
  Graph g;
  auto H = g.input(h);
  auto cat = g.concat_cols(H, g.broadcast_rows(g.input(context), h.rows));
  auto G = g.sigmoid(g.add_row(g.matmul(cat, g.input(w)), g.input(b)));
  auto out = g.mul(H, G);
  return {g.value(G), g.value(out)};
}

std::vector<double> gem_pool(const Tensor2& h, double p, double eps) {
  if (p < 1.0) throw InvalidArgument("gem_pool: p must be >= 1");
  std::vector<double> out(h.cols, 0.0);
  if (h.rows == 0) return out;
  for (int c = 0; c < h.cols; ++c) out[c] = std::pow(gem_mean_power(h, c, p, eps), 1.0 / p);
  return out;
}

Adam::Adam(const PolicyParams& params, AdamConfig cfg) : cfg_(cfg) {
  for (const ParamBlock& b : params.blocks()) {
    m_.emplace_back(b.value.rows, b.value.cols);
    v_.emplace_back(b.value.rows, b.value.cols);
  }
}

void Adam::step(PolicyParams& params) {
  if (m_.size() != params.blocks().size()) throw InvariantError("optimizer bound to other params");
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < m_.size(); ++k) {
    ParamBlock& b = params.blocks()[k];
    for (std::size_t e = 0; e < b.value.size(); ++e) {
      const double g = b.grad.data[e];
      double& m = m_[k].data[e];
      double& v = v_[k].data[e];
      m = cfg_.beta1 * m + (1 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1 - cfg_.beta2) * g * g;
      b.value.data[e] -= cfg_.lr * (m / c1) / (std::sqrt(v / c2) + cfg_.eps);
    }
  }
  ++params.updates;
}

// ---- parameter file -------------------------------------------------------

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.put(static_cast<char>((v >> (8 * k)) & 0xff));
}
void put_u64(std::ostream& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.put(static_cast<char>((v >> (8 * k)) & 0xff));
}

class Reader {
 public:
  Reader(std::istream& in, const std::filesystem::path& path) : in_(in), path_(path) {}
  void bytes(char* dst, std::size_t n) {
    if (!in_.read(dst, static_cast<std::streamsize>(n)))
      throw FormatError(path_.string() + ": truncated parameter file");
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
    return v;
  }
  std::string str(std::size_t n) {
    if (n > (1u << 24)) throw FormatError(path_.string() + ": implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

 private:
  std::istream& in_;
  const std::filesystem::path& path_;
};

}  // namespace

void save_params(const PolicyParams& params, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_u64(out, params.updates);
    const std::string arch = params.arch().to_json().dump();
    put_u32(out, static_cast<std::uint32_t>(arch.size()));
    out << arch;
    put_u32(out, static_cast<std::uint32_t>(params.blocks().size()));
    for (const ParamBlock& b : params.blocks()) {
      put_u32(out, static_cast<std::uint32_t>(b.name.size()));
      out << b.name;
      put_u32(out, static_cast<std::uint32_t>(b.value.rows));
      put_u32(out, static_cast<std::uint32_t>(b.value.cols));
      for (double v : b.value.data) put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

PolicyParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  Reader r(in, path);
  char magic[8];
  r.bytes(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw FormatError(path.string() + ": not a parameter file");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError(path.string() + ": parameter file version " + std::to_string(version) +
                      ", expected " + std::to_string(kVersion));
  const std::uint64_t updates = r.u64();
  nlohmann::json arch_json;
  try {
    arch_json = nlohmann::json::parse(r.str(r.u32()));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": bad architecture header: " + e.what());
  }
  PolicyParams p = PolicyParams::zeros(PolicyArch::from_json(arch_json));
  p.updates = updates;
  const std::uint32_t count = r.u32();
  if (count != p.blocks().size())
    throw FormatError(path.string() + ": " + std::to_string(count) + " blocks, architecture has " +
                      std::to_string(p.blocks().size()));
  for (ParamBlock& b : p.blocks()) {
    const std::string name = r.str(r.u32());
    const int rows = static_cast<int>(r.u32()), cols = static_cast<int>(r.u32());
    if (name != b.name) throw FormatError(path.string() + ": expected block " + b.name + ", found " + name);
    if (rows != b.value.rows || cols != b.value.cols)
      throw ShapeError("block " + name + ": file has " + std::to_string(rows) + "x" +
                       std::to_string(cols) + ", header architecture implies " +
                       b.value.shape_string());
    for (double& v : b.value.data) v = std::bit_cast<double>(r.u64());
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError(path.string() + ": trailing bytes after the last block");
  return p;
}

PolicyParams load_params(const std::filesystem::path& path, const PolicyArch& expected) {
  PolicyParams p = load_params(path);
  const PolicyParams want = PolicyParams::zeros(expected);
  for (const ParamBlock& w : want.blocks()) {
    if (!p.has_block(w.name)) throw ShapeError("block " + w.name + ": missing from " + path.string());
    const ParamBlock& got = p.block(w.name);
    if (!got.value.same_shape(w.value))
      throw ShapeError("block " + w.name + ": file has " + got.value.shape_string() +
                       ", configuration expects " + w.value.shape_string());
  }
  if (!(p.arch() == expected))
    throw ShapeError("parameter file architecture " + p.arch().to_json().dump() +
                     " differs from configuration " + expected.to_json().dump());
  return p;
}

}  // namespace vneap
