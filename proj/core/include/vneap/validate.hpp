#ifndef VNEAP_VALIDATE_HPP_
#define VNEAP_VALIDATE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "vneap/ledger.hpp"
#include "vneap/types.hpp"

namespace vneap {

enum class ViolationKind {
  kUnknownAlternative,  // alternative index out of range
  kNodeMapSize,
  kLinkMapSize,
  kUnknownHost,         // node mapped outside the substrate
  kHostNotPermitted,    // node_map(i) not in S_{r,a,i}
  kCoLocation,          // two virtual nodes share a substrate node
  kInvalidPath,         // path not simple, not on substrate edges, or 0 hops
  kEndpointCoupling,    // path does not start/end at the mapped endpoints
  kNodeCapacity,        // node demand exceeds residual capacity
  kLinkBandwidth,       // aggregated link demand exceeds residual bandwidth
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

/// Checks every embedding invariant and feasibility against the ledger's
/// current residuals. Violations are data; this never throws.
ValidationReport validate_embedding(const SubstrateNetwork& sn, const VNR& vnr,
                                    const Embedding& emb,
                                    const ResourceLedger& ledger);

}  // namespace vneap

#endif  // VNEAP_VALIDATE_HPP_
