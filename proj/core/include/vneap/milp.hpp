#ifndef VNEAP_MILP_HPP_
#define VNEAP_MILP_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vneap/paths.hpp"
#include "vneap/scenario.hpp"
#include "vneap/types.hpp"

namespace vneap {

enum class VarKind { kY, kX, kW };

/// One binary variable. y: (vnr, a). x: (vnr, a, i, host). w: (vnr, a,
/// link, path) where the path runs from the host of link.i to the host of
/// link.j.
struct MilpVar {
  VarKind kind = VarKind::kY;
  int vnr_id = 0;
  int alternative = 0;
  int node = -1;   // x: virtual node; w: link.i
  int node2 = -1;  // w: link.j
  int link = -1;   // w: link index within the alternative
  NodeId host = -1;
  int path = -1;   // w: index into MilpModel::paths
  std::string name;
};

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

enum class RowSense { kLe, kEq, kGe };

struct MilpRow {
  std::string name;
  std::vector<LinearTerm> terms;
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
};

struct MilpLinkBlock {
  int i = 0, j = 0;
  double demand = 0.0;
  /// (host of i, host of j) -> w variables in candidate-path order.
  std::map<std::pair<NodeId, NodeId>, std::vector<int>> w_by_hosts;
};

struct MilpAltBlock {
  int y = -1;
  /// Per virtual node, x variables in ascending host order.
  std::vector<std::vector<int>> x;
  std::vector<MilpLinkBlock> links;
};

struct MilpVnrBlock {
  int vnr_id = 0;
  std::vector<MilpAltBlock> alternatives;
};

/// Time-expanded selection / placement / routing model. Every variable is
/// binary; the objective is revenue - cost of the accepted requests.
struct MilpModel {
  int k = kDefaultK;
  std::vector<double> instants;  // decision instants (distinct arrivals)
  std::vector<MilpVar> vars;
  std::vector<LinearTerm> objective;  // one term per variable, zeros kept
  std::vector<MilpRow> rows;
  std::vector<SubstratePath> paths;   // path table referenced by w vars
  std::vector<MilpVnrBlock> vnrs;     // arrival order
  /// Rows that bound resources (capacity and bandwidth), for solvers that
  /// track activity incrementally.
  std::vector<int> resource_rows;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int count(VarKind kind) const;
};

struct MilpBuildOptions {
  std::size_t max_variables = 2'000'000;
};

/// Builds the model over the scenario with candidate paths from `paths`.
/// Throws LimitExceeded when the variable count would exceed the cap.
MilpModel build_milp(const Scenario& scenario, const PathCache& paths,
                     const MilpBuildOptions& options = {});

/// Generic LP problem as read back from a file.
struct LpProblem {
  bool maximize = true;
  std::vector<std::string> var_names;  // order of first appearance in the objective
  std::vector<LinearTerm> objective;
  std::vector<MilpRow> rows;
  std::vector<std::string> binaries;

  friend bool operator==(const LpProblem& a, const LpProblem& b);
};

LpProblem to_lp_problem(const MilpModel& model);

/// CPLEX-style LP text. Deterministic: the same model always produces the
/// same bytes.
void write_lp(const MilpModel& model, std::ostream& out);
void export_lp(const MilpModel& model, const std::filesystem::path& path);

/// Reads the LP subset written by write_lp (objective, Subject To, Bounds,
/// Binary/General, End; `\` comments). Throws ParseError.
LpProblem read_lp(std::istream& in);
LpProblem read_lp_file(const std::filesystem::path& path);

/// Reads `name value` pairs, one per line. Lines that are not exactly a
/// name followed by a number (headers, comments) are skipped.
std::map<std::string, double> read_solution(std::istream& in);

}  // namespace vneap

#endif  // VNEAP_MILP_HPP_
