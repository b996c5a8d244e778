#include "vneap/paths.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <set>

#include "vneap/error.hpp"

namespace vneap {

namespace {

struct HopsThenSequence {
  bool operator()(const SubstratePath& a, const SubstratePath& b) const {
    if (a.hops() != b.hops()) return a.hops() < b.hops();
    return std::lexicographical_compare(a.nodes().begin(), a.nodes().end(),
                                        b.nodes().begin(), b.nodes().end());
  }
};

// Lexicographically smallest shortest path from src to dst avoiding the
// blocked nodes and edges.
std::optional<std::vector<NodeId>> restricted_shortest(const SubstrateNetwork& sn, NodeId src,
                                                       NodeId dst,
                                                       const std::vector<char>& blocked_node,
                                                       const std::vector<char>& blocked_edge) {
  const int n = sn.num_nodes();
  std::vector<int> dist(n, -1);
  std::deque<NodeId> queue{dst};
  dist[dst] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    if (u == src) break;
    for (const auto& adj : sn.neighbors(u)) {
      if (blocked_edge[adj.edge] || blocked_node[adj.node] || dist[adj.node] >= 0) continue;
      dist[adj.node] = dist[u] + 1;
      queue.push_back(adj.node);
    }
  }
  if (dist[src] < 0) return std::nullopt;
  std::vector<NodeId> path{src};
  NodeId cur = src;
  while (cur != dst) {
    for (const auto& adj : sn.neighbors(cur)) {  // sorted by node id
      if (blocked_edge[adj.edge] || blocked_node[adj.node]) continue;
      if (dist[adj.node] >= 0 && dist[adj.node] == dist[cur] - 1) {
        cur = adj.node;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

}  // namespace

std::vector<int> bfs_hops(const SubstrateNetwork& sn, NodeId src) {
  std::vector<int> dist(sn.num_nodes(), -1);
  std::deque<NodeId> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (const auto& adj : sn.neighbors(u))
      if (dist[adj.node] < 0) {
        dist[adj.node] = dist[u] + 1;
        queue.push_back(adj.node);
      }
  }
  return dist;
}

std::vector<SubstratePath> k_shortest_paths(const SubstrateNetwork& sn, NodeId p, NodeId q,
                                            int k) {
  if (k < 1) throw InvalidArgument("K must be at least 1");
  if (p == q) throw InvalidArgument("K-SP endpoints must differ");
  if (!sn.contains(p) || !sn.contains(q)) throw InvalidArgument("K-SP endpoint out of range");

  std::vector<char> blocked_node(sn.num_nodes(), 0), blocked_edge(sn.num_edges(), 0);
  auto first = restricted_shortest(sn, p, q, blocked_node, blocked_edge);
  if (!first) return {};
  std::vector<SubstratePath> found{SubstratePath(std::move(*first))};
  std::set<SubstratePath, HopsThenSequence> candidates;

  while (static_cast<int>(found.size()) < k) {
    const auto prev = found.back().nodes();
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
      const NodeId spur = prev[i];
      std::fill(blocked_node.begin(), blocked_node.end(), 0);
      std::fill(blocked_edge.begin(), blocked_edge.end(), 0);
      for (const auto& path : found) {
        auto nodes = path.nodes();
        if (nodes.size() > i + 1 && std::equal(prev.begin(), prev.begin() + i + 1, nodes.begin()))
          blocked_edge[*sn.find_edge(nodes[i], nodes[i + 1])] = 1;
      }
      for (std::size_t r = 0; r < i; ++r) blocked_node[prev[r]] = 1;
      auto spur_path = restricted_shortest(sn, spur, q, blocked_node, blocked_edge);
      if (!spur_path) continue;
      std::vector<NodeId> total(prev.begin(), prev.begin() + i);
      total.insert(total.end(), spur_path->begin(), spur_path->end());
      SubstratePath candidate(std::move(total));
      if (std::find(found.begin(), found.end(), candidate) == found.end())
        candidates.insert(std::move(candidate));
    }
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return found;
}

PathCache::PathCache(const SubstrateNetwork& sn, int k)
    : sn_(&sn),
      k_(k),
      slots_(std::make_unique<Slot[]>(static_cast<std::size_t>(sn.num_nodes()) *
                                      sn.num_nodes())) {
  if (k < 1) throw InvalidArgument("K must be at least 1");
}

PathCache::Slot& PathCache::slot(NodeId p, NodeId q) const {
  return slots_[static_cast<std::size_t>(p) * sn_->num_nodes() + q];
}

std::span<const SubstratePath> PathCache::paths(NodeId p, NodeId q) const {
  if (p == q) return {};
  Slot& s = slot(p, q);
  std::call_once(s.once, [&] {
    if (p < q) {
      s.paths = k_shortest_paths(*sn_, p, q, k_);
    } else {
      for (const auto& path : paths(q, p)) s.paths.push_back(path.reversed());
    }
  });
  return s.paths;
}

void PathCache::fill_all() const {
  for (NodeId p = 0; p < sn_->num_nodes(); ++p)
    for (NodeId q = 0; q < sn_->num_nodes(); ++q) paths(p, q);
}

}  // namespace vneap
