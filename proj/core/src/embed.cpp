#include "vneap/embed.hpp"

#include <algorithm>
#include <numeric>

#include "vneap/metrics.hpp"

namespace vneap {

std::vector<int> node_visit_order(const Alternative& alt) {
  std::vector<int> order(alt.num_nodes());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> weight(alt.num_nodes());
  for (int i = 0; i < alt.num_nodes(); ++i)
    weight[i] = alt.node(i).demand + alt.incident_demand(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weight[a] > weight[b]; });
  return order;
}

EmbeddingBuilder::EmbeddingBuilder(const SubstrateNetwork& sn, const ResourceLedger& ledger,
                                   const VNR& vnr, int alternative, const PathCache& paths)
    : sn_(&sn),
      alt_(&vnr.alternatives.at(alternative)),
      paths_(&paths),
      vnr_id_(vnr.id),
      alternative_(alternative),
      cap_(ledger.residual_capacities().begin(), ledger.residual_capacities().end()),
      bw_(ledger.residual_bandwidths().begin(), ledger.residual_bandwidths().end()),
      used_(sn.num_nodes(), 0),
      node_map_(alt_->num_nodes(), -1),
      link_paths_(alt_->num_links()) {}

bool EmbeddingBuilder::can_host(int i, NodeId p) const {
  return !used_[p] && alt_->node(i).allows(p) &&
         alt_->node(i).demand <= cap_[p] + kFeasibilityTol;
}

std::vector<char> EmbeddingBuilder::host_mask(int i) const {
  std::vector<char> mask(sn_->num_nodes());
  for (NodeId p = 0; p < sn_->num_nodes(); ++p) mask[p] = can_host(i, p) ? 1 : 0;
  return mask;
}

bool EmbeddingBuilder::place(int i, NodeId p) {
  std::vector<double> bw = bw_;
  std::vector<std::pair<int, SubstratePath>> routed;
  for (const auto& adj : alt_->neighbors(i)) {
    if (node_map_[adj.node] < 0) continue;
    const VirtualLink& link = alt_->link(adj.edge);
    const NodeId from = link.i == i ? p : node_map_[link.i];
    const NodeId to = link.j == i ? p : node_map_[link.j];
    bool ok = false;
    for (const auto& path : paths_->paths(from, to)) {
      auto edges = path.edges_in(*sn_);
      if (std::all_of(edges.begin(), edges.end(),
                      [&](EdgeId e) { return link.demand <= bw[e] + kFeasibilityTol; })) {
        for (EdgeId e : edges) bw[e] -= link.demand;
        routed.emplace_back(adj.edge, path);
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  bw_ = std::move(bw);
  for (auto& [l, path] : routed) link_paths_[l] = std::move(path);
  node_map_[i] = p;
  used_[p] = 1;
  cap_[p] -= alt_->node(i).demand;
  ++placed_;
  return true;
}

Embedding EmbeddingBuilder::finish() const {
  Embedding emb;
  emb.vnr_id = vnr_id_;
  emb.alternative = alternative_;
  emb.node_map = node_map_;
  for (const auto& path : link_paths_) emb.link_paths.push_back(*path);
  return emb;
}

std::string_view to_string(EmbedFailure::Stage stage) {
  return stage == EmbedFailure::Stage::kNodePlacement ? "node-placement" : "link-routing";
}

EmbedResult greedy_embed(const ResourceLedger& ledger, const SubstrateNetwork& sn,
                         const VNR& vnr, int alternative, const PathCache& paths) {
  EmbeddingBuilder b(sn, ledger, vnr, alternative, paths);
  for (int i : node_visit_order(b.alternative())) {
    NodeId best = -1;
    for (NodeId p = 0; p < sn.num_nodes(); ++p)
      if (b.can_host(i, p) && (best < 0 || b.residual_capacity(p) > b.residual_capacity(best)))
        best = p;
    if (best < 0) return EmbedFailure{EmbedFailure::Stage::kNodePlacement, i};
    if (!b.place(i, best)) return EmbedFailure{EmbedFailure::Stage::kLinkRouting, i};
  }
  return b.finish();
}

EmbedResult random_embed(const ResourceLedger& ledger, const SubstrateNetwork& sn,
                         const VNR& vnr, int alternative, const PathCache& paths, Rng& rng) {
  EmbeddingBuilder b(sn, ledger, vnr, alternative, paths);
  for (int i : node_visit_order(b.alternative())) {
    std::vector<NodeId> hosts;
    for (NodeId p = 0; p < sn.num_nodes(); ++p)
      if (b.can_host(i, p)) hosts.push_back(p);
    if (hosts.empty()) return EmbedFailure{EmbedFailure::Stage::kNodePlacement, i};
    NodeId p = hosts[std::uniform_int_distribution<std::size_t>(0, hosts.size() - 1)(rng)];
    if (!b.place(i, p)) return EmbedFailure{EmbedFailure::Stage::kLinkRouting, i};
  }
  return b.finish();
}

int hl_random(const VNR& vnr, Rng& rng) {
  return std::uniform_int_distribution<int>(0, static_cast<int>(vnr.alternatives.size()) - 1)(rng);
}

int hl_max_revenue(const VNR& vnr) {
  int best = 0;
  double best_rev = revenue(vnr.alternatives[0]);
  for (int a = 1; a < static_cast<int>(vnr.alternatives.size()); ++a) {
    double rev = revenue(vnr.alternatives[a]);
    if (rev > best_rev) {
      best = a;
      best_rev = rev;
    }
  }
  return best;
}

std::optional<int> hl_best_r2c(const ResourceLedger& ledger, const SubstrateNetwork& sn,
                               const VNR& vnr, const PathCache& paths) {
  std::optional<int> best;
  double best_ratio = -1.0;
  for (int a = 0; a < static_cast<int>(vnr.alternatives.size()); ++a) {
    auto result = greedy_embed(ledger, sn, vnr, a, paths);
    if (!succeeded(result)) continue;
    const auto& alt = vnr.alternatives[a];
    const double c = cost(alt, std::get<Embedding>(result));
    const double ratio = c > 0.0 ? revenue(alt) / c : 1.0;
    if (ratio > best_ratio) {
      best = a;
      best_ratio = ratio;
    }
  }
  return best;
}

}  // namespace vneap
