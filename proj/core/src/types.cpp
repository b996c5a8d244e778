#include "vneap/types.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

#include "vneap/error.hpp"

namespace vneap {

bool is_connected(int num_nodes, std::span<const std::pair<int, int>> edges) {
  if (num_nodes <= 0) return false;
  std::vector<int> parent(num_nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = num_nodes;
  for (auto [u, v] : edges) {
    int a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

SubstrateNetwork::SubstrateNetwork(std::vector<SubstrateNode> nodes,
                                   std::vector<SubstrateEdge> edges,
                                   std::string name)
    : name_(std::move(name)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const int n = num_nodes();
  if (n == 0) throw InvalidArgument("substrate network has no nodes");
  for (int p = 0; p < n; ++p) {
    if (!(nodes_[p].capacity > 0.0))
      throw InvalidArgument("substrate node " + std::to_string(p) +
                            " has non-positive capacity");
  }
  adjacency_.assign(n, {});
  edge_index_.assign(static_cast<std::size_t>(n) * n, -1);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(edges_.size());
  for (int e = 0; e < num_edges(); ++e) {
    const auto& ed = edges_[e];
    if (!contains(ed.u) || !contains(ed.v))
      throw InvalidArgument("substrate edge " + std::to_string(e) +
                            " has unknown endpoint");
    if (ed.u == ed.v)
      throw InvalidArgument("substrate edge " + std::to_string(e) +
                            " is a self-loop");
    if (!(ed.bandwidth > 0.0))
      throw InvalidArgument("substrate edge " + std::to_string(e) +
                            " has non-positive bandwidth");
    auto& slot = edge_index_[static_cast<std::size_t>(ed.u) * n + ed.v];
    if (slot != -1)
      throw InvalidArgument("duplicate substrate edge " + std::to_string(ed.u) +
                            "-" + std::to_string(ed.v));
    slot = e;
    edge_index_[static_cast<std::size_t>(ed.v) * n + ed.u] = e;
    adjacency_[ed.u].push_back({ed.v, e});
    adjacency_[ed.v].push_back({ed.u, e});
    pairs.emplace_back(ed.u, ed.v);
  }
  for (auto& adj : adjacency_)
    std::sort(adj.begin(), adj.end(),
              [](const Adjacency& a, const Adjacency& b) { return a.node < b.node; });
  if (!is_connected(n, pairs))
    throw InvalidArgument("substrate network is not connected");
}

std::optional<EdgeId> SubstrateNetwork::find_edge(NodeId u, NodeId v) const {
  if (!contains(u) || !contains(v)) return std::nullopt;
  EdgeId e = edge_index_[static_cast<std::size_t>(u) * num_nodes() + v];
  if (e < 0) return std::nullopt;
  return e;
}

double SubstrateNetwork::max_capacity() const {
  double m = 0.0;
  for (const auto& n : nodes_) m = std::max(m, n.capacity);
  return m;
}

double SubstrateNetwork::max_bandwidth() const {
  double m = 0.0;
  for (const auto& e : edges_) m = std::max(m, e.bandwidth);
  return m;
}

bool operator==(const SubstrateNetwork& a, const SubstrateNetwork& b) {
  if (a.name_ != b.name_ || a.nodes_.size() != b.nodes_.size() ||
      a.edges_.size() != b.edges_.size())
    return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i)
    if (a.nodes_[i].name != b.nodes_[i].name ||
        a.nodes_[i].capacity != b.nodes_[i].capacity)
      return false;
  for (std::size_t i = 0; i < a.edges_.size(); ++i)
    if (a.edges_[i].u != b.edges_[i].u || a.edges_[i].v != b.edges_[i].v ||
        a.edges_[i].bandwidth != b.edges_[i].bandwidth)
      return false;
  return true;
}

bool VirtualNode::allows(NodeId p) const {
  if (!hosts) return true;
  return std::find(hosts->begin(), hosts->end(), p) != hosts->end();
}

Alternative::Alternative(std::vector<VirtualNode> nodes,
                         std::vector<VirtualLink> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  const int n = num_nodes();
  if (n == 0) throw InvalidArgument("alternative has no virtual nodes");
  for (int i = 0; i < n; ++i) {
    if (!(nodes_[i].demand >= 0.0))
      throw InvalidArgument("virtual node " + std::to_string(i) +
                            " has negative demand");
    if (nodes_[i].hosts && nodes_[i].hosts->empty())
      throw InvalidArgument("virtual node " + std::to_string(i) +
                            " has an empty candidate host set");
  }
  adjacency_.assign(n, {});
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> pairs;
  for (int l = 0; l < num_links(); ++l) {
    const auto& lk = links_[l];
    if (lk.i < 0 || lk.i >= n || lk.j < 0 || lk.j >= n)
      throw InvalidArgument("virtual link " + std::to_string(l) +
                            " has unknown endpoint");
    if (lk.i == lk.j)
      throw InvalidArgument("virtual link " + std::to_string(l) + " is a self-loop");
    if (!(lk.demand >= 0.0))
      throw InvalidArgument("virtual link " + std::to_string(l) +
                            " has negative demand");
    if (!seen.insert(std::minmax(lk.i, lk.j)).second)
      throw InvalidArgument("duplicate virtual link " + std::to_string(lk.i) +
                            "-" + std::to_string(lk.j));
    adjacency_[lk.i].push_back({lk.j, l});
    adjacency_[lk.j].push_back({lk.i, l});
    pairs.emplace_back(lk.i, lk.j);
  }
  if (!is_connected(n, pairs))
    throw InvalidArgument("alternative virtual graph is not connected");
}

double Alternative::incident_demand(int i) const {
  double s = 0.0;
  for (const auto& adj : adjacency_[i]) s += links_[adj.edge].demand;
  return s;
}

void VNR::check() const {
  if (alternatives.empty())
    throw InvalidArgument("VNR " + std::to_string(id) + " has no alternatives");
  if (!(arrival >= 0.0))
    throw InvalidArgument("VNR " + std::to_string(id) + " has negative arrival");
  if (!(lifetime > 0.0))
    throw InvalidArgument("VNR " + std::to_string(id) +
                          " has non-positive lifetime");
}

SubstratePath SubstratePath::reversed() const {
  return SubstratePath(std::vector<NodeId>(nodes_.rbegin(), nodes_.rend()));
}

bool SubstratePath::is_valid_in(const SubstrateNetwork& sn) const {
  if (nodes_.size() < 2) return false;
  std::vector<char> seen(sn.num_nodes(), 0);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    NodeId p = nodes_[k];
    if (!sn.contains(p) || seen[p]) return false;
    seen[p] = 1;
    if (k > 0 && !sn.find_edge(nodes_[k - 1], p)) return false;
  }
  return true;
}

std::vector<EdgeId> SubstratePath::edges_in(const SubstrateNetwork& sn) const {
  std::vector<EdgeId> out;
  out.reserve(nodes_.size());
  for (std::size_t k = 1; k < nodes_.size(); ++k)
    out.push_back(*sn.find_edge(nodes_[k - 1], nodes_[k]));
  return out;
}

}  // namespace vneap
