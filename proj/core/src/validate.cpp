#include "vneap/validate.hpp"

#include <algorithm>
#include <sstream>

namespace vneap {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kUnknownAlternative: return "unknown-alternative";
    case ViolationKind::kNodeMapSize: return "node-map-size";
    case ViolationKind::kLinkMapSize: return "link-map-size";
    case ViolationKind::kUnknownHost: return "unknown-host";
    case ViolationKind::kHostNotPermitted: return "host-not-permitted";
    case ViolationKind::kCoLocation: return "co-location";
    case ViolationKind::kInvalidPath: return "invalid-path";
    case ViolationKind::kEndpointCoupling: return "endpoint-coupling";
    case ViolationKind::kNodeCapacity: return "node-capacity";
    case ViolationKind::kLinkBandwidth: return "link-bandwidth";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) os << "; ";
    os << to_string(violations[k].kind) << ": " << violations[k].detail;
  }
  return os.str();
}

ValidationReport validate_embedding(const SubstrateNetwork& sn, const VNR& vnr,
                                    const Embedding& emb,
                                    const ResourceLedger& ledger) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::string detail) {
    report.violations.push_back({k, std::move(detail)});
  };
  if (emb.alternative < 0 ||
      emb.alternative >= static_cast<int>(vnr.alternatives.size())) {
    add(ViolationKind::kUnknownAlternative,
        "alternative " + std::to_string(emb.alternative));
    return report;
  }
  const Alternative& alt = vnr.alternatives[emb.alternative];
  if (static_cast<int>(emb.node_map.size()) != alt.num_nodes()) {
    add(ViolationKind::kNodeMapSize, std::to_string(emb.node_map.size()) +
                                         " entries for " +
                                         std::to_string(alt.num_nodes()) + " nodes");
    return report;
  }

  bool nodes_ok = true;
  std::vector<int> owner(sn.num_nodes(), -1);
  for (int i = 0; i < alt.num_nodes(); ++i) {
    NodeId p = emb.node_map[i];
    if (!sn.contains(p)) {
      add(ViolationKind::kUnknownHost,
          "virtual node " + std::to_string(i) + " -> " + std::to_string(p));
      nodes_ok = false;
      continue;
    }
    if (!alt.node(i).allows(p))
      add(ViolationKind::kHostNotPermitted,
          "virtual node " + std::to_string(i) + " -> " + std::to_string(p));
    if (owner[p] >= 0)
      add(ViolationKind::kCoLocation, "virtual nodes " + std::to_string(owner[p]) +
                                          " and " + std::to_string(i) + " on " +
                                          std::to_string(p));
    else
      owner[p] = i;
  }

  bool links_ok = true;
  if (static_cast<int>(emb.link_paths.size()) != alt.num_links()) {
    add(ViolationKind::kLinkMapSize, std::to_string(emb.link_paths.size()) +
                                         " paths for " +
                                         std::to_string(alt.num_links()) + " links");
    links_ok = false;
  } else {
    for (int l = 0; l < alt.num_links(); ++l) {
      const auto& path = emb.link_paths[l];
      const auto& lk = alt.link(l);
      if (!path.is_valid_in(sn)) {
        add(ViolationKind::kInvalidPath, "virtual link " + std::to_string(l));
        links_ok = false;
        continue;
      }
      if (nodes_ok &&
          (path.front() != emb.node_map[lk.i] || path.back() != emb.node_map[lk.j]))
        add(ViolationKind::kEndpointCoupling, "virtual link " + std::to_string(l));
    }
  }

  // Capacity checks aggregate per substrate element.
  if (nodes_ok) {
    std::vector<double> node_use(sn.num_nodes(), 0.0);
    for (int i = 0; i < alt.num_nodes(); ++i)
      node_use[emb.node_map[i]] += alt.node(i).demand;
    for (NodeId p = 0; p < sn.num_nodes(); ++p)
      if (node_use[p] > ledger.residual_capacity(p) + kFeasibilityTol)
        add(ViolationKind::kNodeCapacity,
            "node " + std::to_string(p) + " demand " + std::to_string(node_use[p]) +
                " > residual " + std::to_string(ledger.residual_capacity(p)));
  }
  if (links_ok) {
    std::vector<double> edge_use(sn.num_edges(), 0.0);
    for (int l = 0; l < alt.num_links(); ++l)
      for (EdgeId e : emb.link_paths[l].edges_in(sn)) edge_use[e] += alt.link(l).demand;
    for (EdgeId e = 0; e < sn.num_edges(); ++e)
      if (edge_use[e] > ledger.residual_bandwidth(e) + kFeasibilityTol)
        add(ViolationKind::kLinkBandwidth,
            "edge " + std::to_string(e) + " demand " + std::to_string(edge_use[e]) +
                " > residual " + std::to_string(ledger.residual_bandwidth(e)));
  }
  return report;
}

}  // namespace vneap
