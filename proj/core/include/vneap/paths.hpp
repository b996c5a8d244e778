#ifndef VNEAP_PATHS_HPP_
#define VNEAP_PATHS_HPP_

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "vneap/types.hpp"

namespace vneap {

inline constexpr int kDefaultK = 5;

/// Yen's loopless K shortest paths under the hop metric. Paths come out in
/// nondecreasing hop count; equal-length paths are ordered
/// lexicographically by node sequence, so the result is exactly the first K
/// simple p-q paths under (hops, sequence) order. Empty when p and q are
/// disconnected. Throws InvalidArgument when p == q or K < 1.
std::vector<SubstratePath> k_shortest_paths(const SubstrateNetwork& sn, NodeId p,
                                            NodeId q, int k);

/// Lazily filled K-SP table over all ordered substrate pairs. Each pair is
/// computed at most once (std::call_once) and never modified afterwards, so
/// concurrent readers are safe. (q, p) holds the reversals of (p, q).
class PathCache {
 public:
  PathCache(const SubstrateNetwork& sn, int k = kDefaultK);
  PathCache(const PathCache&) = delete;
  PathCache& operator=(const PathCache&) = delete;

  int k() const { return k_; }
  const SubstrateNetwork& substrate() const { return *sn_; }
  /// Candidate paths from p to q; empty span when p == q.
  std::span<const SubstratePath> paths(NodeId p, NodeId q) const;
  /// Fills every pair eagerly.
  void fill_all() const;

 private:
  struct Slot {
    std::once_flag once;
    std::vector<SubstratePath> paths;
  };
  Slot& slot(NodeId p, NodeId q) const;

  const SubstrateNetwork* sn_;
  int k_;
  std::unique_ptr<Slot[]> slots_;
};

/// Hop distances from src (-1 for unreachable).
std::vector<int> bfs_hops(const SubstrateNetwork& sn, NodeId src);

}  // namespace vneap

#endif  // VNEAP_PATHS_HPP_
