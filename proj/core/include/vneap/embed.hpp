#ifndef VNEAP_EMBED_HPP_
#define VNEAP_EMBED_HPP_

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "vneap/ledger.hpp"
#include "vneap/paths.hpp"
#include "vneap/scenario.hpp"
#include "vneap/types.hpp"

namespace vneap {

/// Virtual nodes sorted by descending (node demand + incident link demand),
/// ties by index. Shared by every low-level embedder.
std::vector<int> node_visit_order(const Alternative& alt);

/// Incrementally builds one embedding against a read-only ledger. Resources
/// claimed by earlier placements of the same request are tracked locally,
/// so the ledger itself is never touched; abandoning the builder is the
/// rollback.
class EmbeddingBuilder {
 public:
  EmbeddingBuilder(const SubstrateNetwork& sn, const ResourceLedger& ledger, const VNR& vnr,
                   int alternative, const PathCache& paths);

  const Alternative& alternative() const { return *alt_; }
  const SubstrateNetwork& substrate() const { return *sn_; }
  int placed_count() const { return placed_; }
  bool complete() const { return placed_ == alt_->num_nodes(); }
  bool is_placed(int i) const { return node_map_[i] >= 0; }
  bool is_used(NodeId p) const { return used_[p] != 0; }
  double residual_capacity(NodeId p) const { return cap_[p]; }
  double residual_bandwidth(EdgeId e) const { return bw_[e]; }

  /// p unused by this request, permitted for i, and with enough residual.
  bool can_host(int i, NodeId p) const;
  std::vector<char> host_mask(int i) const;

  /// Places virtual node i on p and routes each link to an already placed
  /// neighbor over the first of the K candidate paths with enough residual
  /// bandwidth on every edge. Returns false, leaving the builder unchanged,
  /// when some link cannot be routed. Precondition: can_host(i, p).
  bool place(int i, NodeId p);

  /// Precondition: complete().
  Embedding finish() const;

 private:
  const SubstrateNetwork* sn_;
  const Alternative* alt_;
  const PathCache* paths_;
  int vnr_id_;
  int alternative_;
  std::vector<double> cap_, bw_;
  std::vector<char> used_;
  std::vector<NodeId> node_map_;
  std::vector<std::optional<SubstratePath>> link_paths_;
  int placed_ = 0;
};

struct EmbedFailure {
  enum class Stage { kNodePlacement, kLinkRouting };
  Stage stage = Stage::kNodePlacement;
  int virtual_node = -1;
};

std::string_view to_string(EmbedFailure::Stage stage);

using EmbedResult = std::variant<Embedding, EmbedFailure>;

inline bool succeeded(const EmbedResult& r) { return std::holds_alternative<Embedding>(r); }

/// Rank-greedy low-level embedder: visits nodes in node_visit_order and puts
/// each on the permitted unused node with the largest residual capacity
/// (ties by id), routing links as in EmbeddingBuilder::place.
EmbedResult greedy_embed(const ResourceLedger& ledger, const SubstrateNetwork& sn,
                         const VNR& vnr, int alternative, const PathCache& paths);

/// Same visit order, host drawn uniformly among the feasible ones.
EmbedResult random_embed(const ResourceLedger& ledger, const SubstrateNetwork& sn,
                         const VNR& vnr, int alternative, const PathCache& paths, Rng& rng);

/// Uniform alternative index; never rejects.
int hl_random(const VNR& vnr, Rng& rng);

/// Index of the largest-revenue alternative, ties to the lowest index.
int hl_max_revenue(const VNR& vnr);

/// Trial-embeds every alternative with greedy_embed and returns the one
/// with the best revenue-to-cost ratio (ties to the lowest index). A
/// zero-cost alternative counts as ratio 1. nullopt when none embeds.
std::optional<int> hl_best_r2c(const ResourceLedger& ledger, const SubstrateNetwork& sn,
                               const VNR& vnr, const PathCache& paths);

}  // namespace vneap

#endif  // VNEAP_EMBED_HPP_
