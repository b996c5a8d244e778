#ifndef VNEAP_LEDGER_HPP_
#define VNEAP_LEDGER_HPP_

#include <map>
#include <span>
#include <vector>

#include "vneap/types.hpp"

namespace vneap {

/// Per-element resource usage of one embedding, aggregated so that two
/// virtual links sharing a substrate edge debit it twice.
struct ResourceDemand {
  std::vector<std::pair<NodeId, double>> nodes;
  std::vector<std::pair<EdgeId, double>> edges;
};

/// Aggregates node and edge debits of emb. Precondition: emb is
/// structurally valid for alt in sn.
ResourceDemand demand_of(const SubstrateNetwork& sn, const Alternative& alt,
                         const Embedding& emb);

/// Time-varying residual capacities and bandwidths.
///
/// The residual of an element is recomputed as its initial value minus the
/// debits of the currently active embeddings, summed in request-id order.
/// The state is therefore a pure function of the active set: a commit
/// followed by the matching release restores it bit for bit.
class ResourceLedger {
 public:
  ResourceLedger() = default;
  explicit ResourceLedger(const SubstrateNetwork& sn);

  int num_nodes() const { return static_cast<int>(residual_cap_.size()); }
  int num_edges() const { return static_cast<int>(residual_bw_.size()); }

  double residual_capacity(NodeId p) const { return residual_cap_[p]; }
  double residual_bandwidth(EdgeId e) const { return residual_bw_[e]; }
  double initial_capacity(NodeId p) const { return initial_cap_[p]; }
  double initial_bandwidth(EdgeId e) const { return initial_bw_[e]; }
  std::span<const double> residual_capacities() const { return residual_cap_; }
  std::span<const double> residual_bandwidths() const { return residual_bw_; }
  std::span<const double> initial_capacities() const { return initial_cap_; }
  std::span<const double> initial_bandwidths() const { return initial_bw_; }

  /// Debits emb. Throws FeasibilityError (ledger untouched) when the
  /// embedding fails validate_embedding, InvariantError when the request id
  /// is already active.
  void commit(const SubstrateNetwork& sn, const VNR& vnr, const Embedding& emb);
  /// Credits back the embedding committed for vnr_id. Throws InvariantError
  /// when no such embedding is active.
  void release(int vnr_id);

  bool is_active(int vnr_id) const { return active_.count(vnr_id) > 0; }
  int active_count() const { return static_cast<int>(active_.size()); }

  /// 0 <= residual <= initial for every element, within tol.
  bool within_bounds(double tol = kFeasibilityTol) const;
  /// residual == initial element-wise within tol.
  bool at_initial(double tol = kFeasibilityTol) const;

 private:
  void recompute_node(NodeId p);
  void recompute_edge(EdgeId e);

  std::vector<double> initial_cap_, initial_bw_;
  std::vector<double> residual_cap_, residual_bw_;
  std::vector<std::map<int, double>> node_debits_, edge_debits_;
  std::map<int, ResourceDemand> active_;
};

}  // namespace vneap

#endif  // VNEAP_LEDGER_HPP_
