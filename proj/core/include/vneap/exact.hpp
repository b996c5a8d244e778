#ifndef VNEAP_EXACT_HPP_
#define VNEAP_EXACT_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "vneap/milp.hpp"
#include "vneap/paths.hpp"
#include "vneap/scenario.hpp"
#include "vneap/types.hpp"

namespace vneap {

struct ExactLimits {
  int max_vnrs = 3;
  int max_substrate_nodes = 8;
  int max_virtual_nodes = 4;
  int max_k = 3;
  /// Complete assignments visited before giving up.
  std::uint64_t max_leaves = 200'000'000;
};

/// Accepted requests with their embeddings; everything else is rejected.
///
/// Among assignments with equal objective (within 1e-9) the one accepting
/// more requests wins, then the lexicographically smallest: requests in
/// arrival order, each encoded as (alternative, node map, candidate-path
/// indices) with rejection sorting first.
struct ExactSolution {
  std::map<int, Embedding> accepted;  // by request id
  double objective = 0.0;             // revenue - cost, summed over accepted
  std::uint64_t explored = 0;         // leaves (exhaustive) or nodes (bnb)

  int accepted_count() const { return static_cast<int>(accepted.size()); }
};

/// Enumerates every combination of per-request choices, pruning only on
/// capacity and bandwidth at the decision instants. Throws LimitExceeded
/// outside `limits` or when max_leaves is hit.
ExactSolution solve_exhaustive(const Scenario& scenario, const PathCache& paths,
                               const ExactLimits& limits = {});

struct BnbResult {
  bool has_incumbent = false;
  bool optimal = false;
  ExactSolution solution;
};

/// Depth-first branch and bound over the model (selection, then placement,
/// then routing variables) with a combinatorial bound from the objective
/// coefficients. Stops after time_budget_seconds; a budget of 0 returns
/// without an incumbent.
BnbResult solve_bnb(const MilpModel& model,
                    double time_budget_seconds = std::numeric_limits<double>::infinity());

/// Interprets variable values (binary, rounded at 0.5) as an assignment.
/// Throws FormatError for unknown variable names starting with y_, x_ or
/// w_, and when the values break the selection / placement structure.
ExactSolution solution_from_values(const MilpModel& model,
                                   const std::map<std::string, double>& values);

/// Revenue minus cost of the accepted embeddings, in arrival order.
double solution_objective(const Scenario& scenario, const ExactSolution& solution);

/// Empty when every accepted embedding passes validate_embedding at every
/// decision instant where it is alive, with the other alive accepted
/// embeddings committed; otherwise a description of the first problem.
std::string check_solution(const Scenario& scenario, const ExactSolution& solution);

}  // namespace vneap

#endif  // VNEAP_EXACT_HPP_
