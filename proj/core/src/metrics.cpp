#include "vneap/metrics.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "vneap/error.hpp"

namespace vneap {

namespace {

void check_structure(const Alternative& alt, const Embedding& emb) {
  if (static_cast<int>(emb.node_map.size()) != alt.num_nodes())
    throw InvalidArgument("embedding node map size does not match alternative");
  if (static_cast<int>(emb.link_paths.size()) != alt.num_links())
    throw InvalidArgument("embedding link map size does not match alternative");
  std::set<NodeId> used(emb.node_map.begin(), emb.node_map.end());
  if (used.size() != emb.node_map.size())
    throw InvalidArgument("embedding co-locates virtual nodes");
  for (int l = 0; l < alt.num_links(); ++l) {
    const auto& path = emb.link_paths[l];
    const auto& lk = alt.link(l);
    if (path.hops() < 1)
      throw InvalidArgument("path of virtual link " + std::to_string(l) +
                            " has no hops");
    std::set<NodeId> on_path(path.nodes().begin(), path.nodes().end());
    if (on_path.size() != path.nodes().size())
      throw InvalidArgument("path of virtual link " + std::to_string(l) +
                            " is not simple");
    if (path.front() != emb.node_map[lk.i] || path.back() != emb.node_map[lk.j])
      throw InvalidArgument("path of virtual link " + std::to_string(l) +
                            " does not join its mapped endpoints");
  }
}

}  // namespace

double revenue(const Alternative& alt) {
  double r = 0.0;
  for (const auto& n : alt.nodes()) r += n.demand;
  for (const auto& l : alt.links()) r += l.demand;
  return r;
}

double cost(const Alternative& alt, const Embedding& emb) {
  check_structure(alt, emb);
  double c = 0.0;
  for (const auto& n : alt.nodes()) c += n.demand;
  for (int l = 0; l < alt.num_links(); ++l)
    c += alt.link(l).demand * emb.link_paths[l].hops();
  return c;
}

double r2c(const Alternative& alt, const Embedding& emb) {
  const double c = cost(alt, emb);
  if (c == 0.0) throw UndefinedRatio("revenue-to-cost ratio undefined: zero cost");
  return revenue(alt) / c;
}

double linear_objective(const Alternative& alt, const Embedding& emb) {
  return revenue(alt) - cost(alt, emb);
}

}  // namespace vneap
