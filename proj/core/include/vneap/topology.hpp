#ifndef VNEAP_TOPOLOGY_HPP_
#define VNEAP_TOPOLOGY_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vneap/types.hpp"

namespace vneap {

/// Graph structure without resources: what a topology file contributes.
struct TopologySkeleton {
  std::string name;
  std::vector<std::string> node_names;
  std::vector<std::pair<NodeId, NodeId>> edges;

  int num_nodes() const { return static_cast<int>(node_names.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

/// SNDlib native text format. Only NODES and LINKS are interpreted; other
/// sections must be well formed but are skipped. Capacity fields are
/// ignored. Throws ParseError carrying the offending line.
TopologySkeleton parse_sndlib(std::string_view text);

/// Plain edge list: one `<u> <v>` pair per line, `node <name>` declares an
/// isolated node, `#` starts a comment. Ids follow first appearance.
TopologySkeleton parse_edge_list(std::string_view text);

/// Dispatches on content: SNDlib when a `NODES (` section is present,
/// edge list otherwise.
TopologySkeleton parse_topology(std::string_view text);

TopologySkeleton load_topology_file(const std::filesystem::path& path);

/// Builtins: atlanta, geant (SNDlib), ring-N, path-N, star-N, complete-N,
/// grid-RxC. Throws InvalidArgument for unknown names.
TopologySkeleton builtin_topology(std::string_view name);
std::vector<std::string> builtin_topology_names();

/// `builtin:<name>` selects a builtin, anything else is read as a file.
TopologySkeleton resolve_topology(std::string_view source);

}  // namespace vneap

#endif  // VNEAP_TOPOLOGY_HPP_
