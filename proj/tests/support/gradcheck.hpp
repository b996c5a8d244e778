#pragma once
// Central finite-difference check of the full policy network.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "vneap/policy_net.hpp"

namespace vneap::testing {

inline PolicyArch small_arch(int substrate_nodes = 4, int hidden = 8) {
  PolicyArch a;
  a.substrate_nodes = substrate_nodes;
  a.substrate_features = 7;
  a.vnr_features = 6;
  a.context_features = 2;
  a.actions = 5;
  a.hidden = hidden;
  return a;
}

inline Tensor2 random_tensor(int r, int c, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor2 t(r, c);
  for (double& v : t.data) v = u(rng);
  return t;
}

inline NetInput random_input(const PolicyArch& a, std::mt19937_64& rng, int vnr_rows = 3) {
  NetInput in;
  in.substrate = random_tensor(a.substrate_nodes, a.substrate_features, rng, 0, 1.2);
  in.vnr = random_tensor(vnr_rows, a.vnr_features, rng, 0, 1.2);
  in.context = random_tensor(1, a.context_features, rng, 0, 1);
  in.mask.assign(a.actions, 1);
  in.mask[1] = 0;
  return in;
}

/// Random linear functional of the network outputs: sum_j w_j logp_j + w_v V
/// over legal actions.
struct Probe {
  std::vector<double> w;
  double wv = 0.0;
};

inline Probe random_probe(const NetInput& in, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Probe p;
  for (char m : in.mask) p.w.push_back(m ? u(rng) : 0.0);
  p.wv = u(rng);
  return p;
}

inline double probe_value(const PolicyForward& f, const Probe& p) {
  const Tensor2& lp = f.graph.value(f.log_probs);
  double s = p.wv * f.graph.value(f.value)(0, 0);
  for (int j = 0; j < lp.cols; ++j)
    if (p.w[j] != 0.0) s += p.w[j] * lp(0, j);
  return s;
}

inline std::vector<char> clamp_pattern(const PolicyForward& f, double eps) {
  std::vector<char> out;
  for (auto v : {f.s_gated, f.v_gated})
    for (double x : f.graph.value(v).data) out.push_back(x > eps);
  return out;
}

struct BlockCheck {
  double rel_error = 0.0;
  int checked = 0;
  int skipped = 0;  // perturbation crossed a GeM clamp boundary
};

/// Per block: ||g_fd - g|| / max(||g_fd||, ||g||, 1e-12) over the checked
/// entries. `max_entries` (0 = all) samples entries uniformly.
inline std::map<std::string, BlockCheck> finite_difference_check(PolicyParams& params,
                                                                 const NetInput& in,
                                                                 const Probe& probe,
                                                                 std::mt19937_64& rng,
                                                                 double h = 1e-5,
                                                                 int max_entries = 0) {
  params.zero_grad();
  {
    PolicyForward f = policy_forward_tracked(params, in);
    Tensor2 seed(1, params.arch().actions);
    for (int j = 0; j < seed.cols; ++j) seed(0, j) = probe.w[j];
    f.graph.backward({{f.log_probs, seed}, {f.value, Tensor2(1, 1, probe.wv)}});
  }
  const auto base_pattern = clamp_pattern(policy_forward(params, in), params.arch().gem_eps);
  std::map<std::string, BlockCheck> out;
  for (ParamBlock& b : params.blocks()) {
    std::vector<std::size_t> idx(b.value.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    if (max_entries > 0 && static_cast<int>(idx.size()) > max_entries) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(max_entries);
    }
    double num = 0.0, na = 0.0, nf = 0.0;
    BlockCheck c;
    for (std::size_t k : idx) {
      const double orig = b.value.data[k];
      b.value.data[k] = orig + h;
      const PolicyForward fp = policy_forward(params, in);
      b.value.data[k] = orig - h;
      const PolicyForward fm = policy_forward(params, in);
      b.value.data[k] = orig;
      const double eps = params.arch().gem_eps;
      if (clamp_pattern(fp, eps) != base_pattern || clamp_pattern(fm, eps) != base_pattern) {
        ++c.skipped;
        continue;
      }
      const double fd = (probe_value(fp, probe) - probe_value(fm, probe)) / (2 * h);
      const double an = b.grad.data[k];
      num += (fd - an) * (fd - an);
      na += an * an;
      nf += fd * fd;
      ++c.checked;
    }
    c.rel_error = std::sqrt(num) / std::max({std::sqrt(na), std::sqrt(nf), 1e-12});
    out[b.name] = c;
  }
  return out;
}

}  // namespace vneap::testing
