#ifndef VNEAP_TYPES_HPP_
#define VNEAP_TYPES_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vneap {

using NodeId = int;
using EdgeId = int;

/// Absolute tolerance used for every resource feasibility comparison.
inline constexpr double kFeasibilityTol = 1e-9;

struct SubstrateNode {
  std::string name;
  double capacity = 0.0;
};

struct SubstrateEdge {
  NodeId u = 0;
  NodeId v = 0;
  double bandwidth = 0.0;

  NodeId other(NodeId x) const { return x == u ? v : u; }
};

struct Adjacency {
  NodeId node;
  EdgeId edge;
};

/// Undirected, connected, capacitated physical network. Node ids are the
/// contiguous indices 0..n-1; names are metadata only.
class SubstrateNetwork {
 public:
  SubstrateNetwork() = default;
  /// Throws InvalidArgument on self-loops, duplicate edges, unknown
  /// endpoints, non-positive resources or a disconnected graph.
  SubstrateNetwork(std::vector<SubstrateNode> nodes,
                   std::vector<SubstrateEdge> edges, std::string name = {});

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::string& name() const { return name_; }

  const SubstrateNode& node(NodeId p) const { return nodes_[p]; }
  const SubstrateEdge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const SubstrateNode> nodes() const { return nodes_; }
  std::span<const SubstrateEdge> edges() const { return edges_; }
  std::span<const Adjacency> neighbors(NodeId p) const { return adjacency_[p]; }
  int degree(NodeId p) const { return static_cast<int>(adjacency_[p].size()); }

  /// Edge joining u and v in either orientation, if any.
  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const;
  bool contains(NodeId p) const { return p >= 0 && p < num_nodes(); }

  double max_capacity() const;
  double max_bandwidth() const;

  friend bool operator==(const SubstrateNetwork& a, const SubstrateNetwork& b);

 private:
  std::string name_;
  std::vector<SubstrateNode> nodes_;
  std::vector<SubstrateEdge> edges_;
  std::vector<std::vector<Adjacency>> adjacency_;
  std::vector<EdgeId> edge_index_;  // dense n*n, -1 when absent
};

struct VirtualNode {
  double demand = 0.0;
  /// Candidate substrate hosts. nullopt means every substrate node.
  std::optional<std::vector<NodeId>> hosts;

  bool allows(NodeId p) const;
  friend bool operator==(const VirtualNode&, const VirtualNode&) = default;
};

struct VirtualLink {
  int i = 0;
  int j = 0;
  double demand = 0.0;
  friend bool operator==(const VirtualLink&, const VirtualLink&) = default;
};

/// One functionally equivalent virtual topology of a request.
class Alternative {
 public:
  Alternative() = default;
  /// Throws InvalidArgument unless the graph is simple, connected, has at
  /// least one node, nonnegative demands and nonempty restricted host sets.
  Alternative(std::vector<VirtualNode> nodes, std::vector<VirtualLink> links);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_links() const { return static_cast<int>(links_.size()); }
  const VirtualNode& node(int i) const { return nodes_[i]; }
  const VirtualLink& link(int l) const { return links_[l]; }
  std::span<const VirtualNode> nodes() const { return nodes_; }
  std::span<const VirtualLink> links() const { return links_; }
  /// (neighbor, link index) pairs of virtual node i.
  std::span<const Adjacency> neighbors(int i) const { return adjacency_[i]; }
  int degree(int i) const { return static_cast<int>(adjacency_[i].size()); }
  /// Bandwidth demand summed over the links incident to node i.
  double incident_demand(int i) const;

  friend bool operator==(const Alternative& a, const Alternative& b) {
    return a.nodes_ == b.nodes_ && a.links_ == b.links_;
  }

 private:
  std::vector<VirtualNode> nodes_;
  std::vector<VirtualLink> links_;
  std::vector<std::vector<Adjacency>> adjacency_;
};

/// Virtual network request: a timed set of alternatives.
struct VNR {
  int id = 0;
  double arrival = 0.0;
  double lifetime = 1.0;
  std::vector<Alternative> alternatives;

  double departure() const { return arrival + lifetime; }
  /// True when the request holds resources at instant t (half-open window).
  bool alive_at(double t) const { return arrival <= t && t < departure(); }
  /// Throws InvalidArgument on an empty alternative list, negative arrival
  /// or non-positive lifetime.
  void check() const;

  friend bool operator==(const VNR&, const VNR&) = default;
};

/// Simple substrate path given as its node sequence.
class SubstratePath {
 public:
  SubstratePath() = default;
  explicit SubstratePath(std::vector<NodeId> nodes) : nodes_(std::move(nodes)) {}

  std::span<const NodeId> nodes() const { return nodes_; }
  int hops() const { return nodes_.empty() ? 0 : static_cast<int>(nodes_.size()) - 1; }
  NodeId front() const { return nodes_.front(); }
  NodeId back() const { return nodes_.back(); }
  bool empty() const { return nodes_.empty(); }
  SubstratePath reversed() const;

  /// Consecutive nodes adjacent in sn, no repeated node, at least one hop.
  bool is_valid_in(const SubstrateNetwork& sn) const;
  /// Edge ids along the path. Precondition: is_valid_in(sn).
  std::vector<EdgeId> edges_in(const SubstrateNetwork& sn) const;

  friend auto operator<=>(const SubstratePath&, const SubstratePath&) = default;

 private:
  std::vector<NodeId> nodes_;
};

/// Chosen alternative plus node and link mapping. `link_paths[l]` routes
/// virtual link l of the alternative from node_map[link.i] to node_map[link.j].
struct Embedding {
  int vnr_id = 0;
  int alternative = 0;
  std::vector<NodeId> node_map;
  std::vector<SubstratePath> link_paths;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Connectivity of an undirected graph given by an edge list.
bool is_connected(int num_nodes, std::span<const std::pair<int, int>> edges);

}  // namespace vneap

#endif  // VNEAP_TYPES_HPP_
