#ifndef VNEAP_CENTRALITY_HPP_
#define VNEAP_CENTRALITY_HPP_

#include <vector>

#include "vneap/types.hpp"

namespace vneap {

struct Centralities {
  std::vector<double> degree;            // deg(v) / (n - 1)
  std::vector<double> node_betweenness;  // normalized by (n-1)(n-2)/2
  std::vector<double> edge_betweenness;  // normalized by n(n-1)/2
};

/// Brandes shortest-path counting on the unweighted substrate. All values
/// lie in [0, 1].
Centralities centralities(const SubstrateNetwork& sn);

}  // namespace vneap

#endif  // VNEAP_CENTRALITY_HPP_
