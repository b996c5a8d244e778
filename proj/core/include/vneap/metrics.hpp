#ifndef VNEAP_METRICS_HPP_
#define VNEAP_METRICS_HPP_

#include "vneap/types.hpp"

namespace vneap {

/// Sum of node CPU demands and link bandwidth demands.
double revenue(const Alternative& alt);

/// Node demands plus each link demand times the hop count of its path.
/// Throws InvalidArgument when the embedding is structurally inconsistent
/// with alt (wrong sizes, co-location, path not simple, wrong endpoints).
double cost(const Alternative& alt, const Embedding& emb);

/// revenue / cost. Throws UndefinedRatio when cost is zero.
double r2c(const Alternative& alt, const Embedding& emb);

/// revenue - cost: the linear objective contribution of an accepted request.
double linear_objective(const Alternative& alt, const Embedding& emb);

}  // namespace vneap

#endif  // VNEAP_METRICS_HPP_
