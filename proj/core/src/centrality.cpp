#include "vneap/centrality.hpp"

#include <deque>

namespace vneap {

Centralities centralities(const SubstrateNetwork& sn) {
  const int n = sn.num_nodes();
  const int m = sn.num_edges();
  Centralities c;
  c.degree.assign(n, 0.0);
  c.node_betweenness.assign(n, 0.0);
  c.edge_betweenness.assign(m, 0.0);
  for (NodeId v = 0; v < n; ++v)
    c.degree[v] = n > 1 ? static_cast<double>(sn.degree(v)) / (n - 1) : 0.0;

  std::vector<double> sigma(n), delta(n);
  std::vector<int> dist(n);
  std::vector<NodeId> order;
  order.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<NodeId> queue{s};
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (const auto& adj : sn.neighbors(u)) {
        if (dist[adj.node] < 0) {
          dist[adj.node] = dist[u] + 1;
          queue.push_back(adj.node);
        }
        if (dist[adj.node] == dist[u] + 1) sigma[adj.node] += sigma[u];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId w = *it;
      for (const auto& adj : sn.neighbors(w)) {
        NodeId v = adj.node;
        if (dist[v] != dist[w] - 1) continue;  // v is a predecessor of w
        const double share = sigma[v] / sigma[w] * (1.0 + delta[w]);
        c.edge_betweenness[adj.edge] += share;
        delta[v] += share;
      }
      if (w != s) c.node_betweenness[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both ends.
  const double node_pairs = n > 2 ? (n - 1.0) * (n - 2.0) / 2.0 : 0.0;
  const double all_pairs = n > 1 ? n * (n - 1.0) / 2.0 : 0.0;
  for (auto& b : c.node_betweenness) b = node_pairs > 0 ? b / 2.0 / node_pairs : 0.0;
  for (auto& b : c.edge_betweenness) b = all_pairs > 0 ? b / 2.0 / all_pairs : 0.0;
  return c;
}

}  // namespace vneap
