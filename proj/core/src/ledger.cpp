#include "vneap/ledger.hpp"

#include <cmath>
#include <map>

#include "vneap/error.hpp"
#include "vneap/validate.hpp"

namespace vneap {

ResourceDemand demand_of(const SubstrateNetwork& sn, const Alternative& alt,
                         const Embedding& emb) {
  std::map<NodeId, double> nodes;
  std::map<EdgeId, double> edges;
  for (int i = 0; i < alt.num_nodes(); ++i) nodes[emb.node_map[i]] += alt.node(i).demand;
  for (int l = 0; l < alt.num_links(); ++l)
    for (EdgeId e : emb.link_paths[l].edges_in(sn)) edges[e] += alt.link(l).demand;
  ResourceDemand d;
  d.nodes.assign(nodes.begin(), nodes.end());
  d.edges.assign(edges.begin(), edges.end());
  return d;
}

ResourceLedger::ResourceLedger(const SubstrateNetwork& sn) {
  for (const auto& n : sn.nodes()) initial_cap_.push_back(n.capacity);
  for (const auto& e : sn.edges()) initial_bw_.push_back(e.bandwidth);
  residual_cap_ = initial_cap_;
  residual_bw_ = initial_bw_;
  node_debits_.resize(initial_cap_.size());
  edge_debits_.resize(initial_bw_.size());
}

void ResourceLedger::commit(const SubstrateNetwork& sn, const VNR& vnr,
                            const Embedding& emb) {
  if (active_.count(vnr.id))
    throw InvariantError("request " + std::to_string(vnr.id) + " already committed");
  auto report = validate_embedding(sn, vnr, emb, *this);
  if (!report.ok())
    throw FeasibilityError("cannot commit request " + std::to_string(vnr.id) + ": " +
                           report.summary());
  ResourceDemand d = demand_of(sn, vnr.alternatives[emb.alternative], emb);
  for (auto [p, amount] : d.nodes) {
    node_debits_[p][vnr.id] = amount;
    recompute_node(p);
  }
  for (auto [e, amount] : d.edges) {
    edge_debits_[e][vnr.id] = amount;
    recompute_edge(e);
  }
  active_.emplace(vnr.id, std::move(d));
}

void ResourceLedger::release(int vnr_id) {
  auto it = active_.find(vnr_id);
  if (it == active_.end())
    throw InvariantError("release of request " + std::to_string(vnr_id) +
                         " which holds no resources");
  for (auto [p, amount] : it->second.nodes) {
    node_debits_[p].erase(vnr_id);
    recompute_node(p);
  }
  for (auto [e, amount] : it->second.edges) {
    edge_debits_[e].erase(vnr_id);
    recompute_edge(e);
  }
  active_.erase(it);
}

void ResourceLedger::recompute_node(NodeId p) {
  double r = initial_cap_[p];
  for (const auto& [id, amount] : node_debits_[p]) r -= amount;
  residual_cap_[p] = r;
}

void ResourceLedger::recompute_edge(EdgeId e) {
  double r = initial_bw_[e];
  for (const auto& [id, amount] : edge_debits_[e]) r -= amount;
  residual_bw_[e] = r;
}

bool ResourceLedger::within_bounds(double tol) const {
  for (std::size_t p = 0; p < residual_cap_.size(); ++p)
    if (residual_cap_[p] < -tol || residual_cap_[p] > initial_cap_[p] + tol) return false;
  for (std::size_t e = 0; e < residual_bw_.size(); ++e)
    if (residual_bw_[e] < -tol || residual_bw_[e] > initial_bw_[e] + tol) return false;
  return true;
}

bool ResourceLedger::at_initial(double tol) const {
  for (std::size_t p = 0; p < residual_cap_.size(); ++p)
    if (std::abs(residual_cap_[p] - initial_cap_[p]) > tol) return false;
  for (std::size_t e = 0; e < residual_bw_.size(); ++e)
    if (std::abs(residual_bw_[e] - initial_bw_[e]) > tol) return false;
  return true;
}

}  // namespace vneap
