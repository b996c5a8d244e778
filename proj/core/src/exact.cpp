#include "vneap/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "vneap/error.hpp"
#include "vneap/ledger.hpp"
#include "vneap/metrics.hpp"
#include "vneap/validate.hpp"

namespace vneap {

namespace {

constexpr double kObjTol = 1e-9;

using ChoiceKey = std::vector<std::vector<int>>;

// Strictly better under (objective, accepted count); lexicographic order is
// handled by the enumeration order of both solvers.
bool strictly_better(double obj, int count, double best_obj, int best_count) {
  if (obj > best_obj + kObjTol) return true;
  if (obj < best_obj - kObjTol) return false;
  return count > best_count;
}

bool cannot_improve(double ub_obj, int ub_count, double best_obj, int best_count) {
  if (ub_obj < best_obj - kObjTol) return true;
  if (ub_obj > best_obj + kObjTol) return false;
  return ub_count <= best_count;
}

std::vector<double> decision_instants(const Scenario& s) {
  std::vector<double> t;
  for (const VNR& v : s.vnrs)
    if (t.empty() || t.back() != v.arrival) t.push_back(v.arrival);
  return t;
}

class Exhaustive {
 public:
  Exhaustive(const Scenario& s, const PathCache& paths, const ExactLimits& limits)
      : s_(s), sn_(s.substrate), paths_(paths), limits_(limits) {
    const auto instants = decision_instants(s);
    alive_.resize(s.vnrs.size());
    for (std::size_t r = 0; r < s.vnrs.size(); ++r)
      for (std::size_t t = 0; t < instants.size(); ++t)
        if (s.vnrs[r].alive_at(instants[t])) alive_[r].push_back(static_cast<int>(t));
    cap_use_.assign(instants.size(), std::vector<double>(sn_.num_nodes(), 0.0));
    bw_use_.assign(instants.size(), std::vector<double>(sn_.num_edges(), 0.0));
    current_.resize(s.vnrs.size());
    used_.assign(sn_.num_nodes(), 0);
  }

  ExactSolution run() {
    dfs_vnr(0, 0.0, 0);
    ExactSolution sol;
    sol.objective = best_obj_;
    sol.explored = leaves_;
    for (std::size_t r = 0; r < s_.vnrs.size(); ++r)
      if (best_[r]) sol.accepted.emplace(s_.vnrs[r].id, *best_[r]);
    return sol;
  }

 private:
  void dfs_vnr(std::size_t r, double obj, int count) {
    if (r == s_.vnrs.size()) {
      if (++leaves_ > limits_.max_leaves)
        throw LimitExceeded("exhaustive search exceeded " + std::to_string(limits_.max_leaves) +
                            " assignments");
      if (!have_best_ || strictly_better(obj, count, best_obj_, best_count_)) {
        have_best_ = true;
        best_obj_ = obj;
        best_count_ = count;
        best_ = current_;
      }
      return;
    }
    current_[r].reset();
    dfs_vnr(r + 1, obj, count);
    const VNR& vnr = s_.vnrs[r];
    for (int a = 0; a < static_cast<int>(vnr.alternatives.size()); ++a) {
      emb_.vnr_id = vnr.id;
      emb_.alternative = a;
      emb_.node_map.assign(vnr.alternatives[a].num_nodes(), -1);
      emb_.link_paths.assign(vnr.alternatives[a].num_links(), SubstratePath());
      place(r, a, 0, obj, count);
    }
    current_[r].reset();
  }

  void place(std::size_t r, int a, int i, double obj, int count) {
    const Alternative& alt = s_.vnrs[r].alternatives[a];
    if (i == alt.num_nodes()) {
      route(r, a, 0, obj, count);
      return;
    }
    const double c = alt.node(i).demand;
    for (NodeId p = 0; p < sn_.num_nodes(); ++p) {
      if (used_[p] || !alt.node(i).allows(p)) continue;
      bool ok = true;
      for (int t : alive_[r]) {
        cap_use_[t][p] += c;
        ok = ok && cap_use_[t][p] <= sn_.node(p).capacity + kFeasibilityTol;
      }
      if (ok) {
        used_[p] = 1;
        emb_.node_map[i] = p;
        place(r, a, i + 1, obj, count);
        emb_.node_map[i] = -1;
        used_[p] = 0;
      }
      for (int t : alive_[r]) cap_use_[t][p] -= c;
    }
  }

  void route(std::size_t r, int a, int l, double obj, int count) {
    const Alternative& alt = s_.vnrs[r].alternatives[a];
    if (l == alt.num_links()) {
      std::fill(used_.begin(), used_.end(), 0);
      current_[r] = emb_;
      const Embedding saved = emb_;
      dfs_vnr(r + 1, obj + linear_objective(alt, saved), count + 1);
      // restore this request's partial state for the caller's loops
      emb_ = saved;
      current_[r].reset();
      std::fill(used_.begin(), used_.end(), 0);
      for (NodeId p : emb_.node_map) used_[p] = 1;
      return;
    }
    const VirtualLink& link = alt.link(l);
    const NodeId p = emb_.node_map[link.i], q = emb_.node_map[link.j];
    for (const SubstratePath& path : paths_.paths(p, q)) {
      const auto edges = path.edges_in(sn_);
      bool ok = true;
      for (EdgeId e : edges)
        for (int t : alive_[r]) {
          bw_use_[t][e] += link.demand;
          ok = ok && bw_use_[t][e] <= sn_.edge(e).bandwidth + kFeasibilityTol;
        }
      if (ok) {
        emb_.link_paths[l] = path;
        route(r, a, l + 1, obj, count);
      }
      for (EdgeId e : edges)
        for (int t : alive_[r]) bw_use_[t][e] -= link.demand;
    }
  }

  const Scenario& s_;
  const SubstrateNetwork& sn_;
  const PathCache& paths_;
  ExactLimits limits_;
  std::vector<std::vector<int>> alive_;
  std::vector<std::vector<double>> cap_use_, bw_use_;
  std::vector<char> used_;
  Embedding emb_;
  std::vector<std::optional<Embedding>> current_, best_;
  bool have_best_ = false;
  double best_obj_ = 0.0;
  int best_count_ = 0;
  std::uint64_t leaves_ = 0;
};

}  // namespace

ExactSolution solve_exhaustive(const Scenario& scenario, const PathCache& paths,
                               const ExactLimits& limits) {
  if (static_cast<int>(scenario.vnrs.size()) > limits.max_vnrs)
    throw LimitExceeded("exhaustive search limited to " + std::to_string(limits.max_vnrs) +
                        " requests");
  if (scenario.substrate.num_nodes() > limits.max_substrate_nodes)
    throw LimitExceeded("exhaustive search limited to " +
                        std::to_string(limits.max_substrate_nodes) + " substrate nodes");
  if (paths.k() > limits.max_k)
    throw LimitExceeded("exhaustive search limited to K <= " + std::to_string(limits.max_k));
  for (const VNR& v : scenario.vnrs)
    for (const Alternative& alt : v.alternatives)
      if (alt.num_nodes() > limits.max_virtual_nodes)
        throw LimitExceeded("exhaustive search limited to " +
                            std::to_string(limits.max_virtual_nodes) + " virtual nodes");
  return Exhaustive(scenario, paths, limits).run();
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& m, double budget) : m_(m), budget_(budget) {
    start_ = std::chrono::steady_clock::now();
    incidence_.resize(m.vars.size());
    activity_.assign(m.rows.size(), 0.0);
    for (int row : m.resource_rows)
      for (const LinearTerm& t : m.rows[row].terms) incidence_[t.var].push_back({row, t.coef});
    coef_.assign(m.vars.size(), 0.0);
    for (const LinearTerm& t : m.objective) coef_[t.var] += t.coef;

    // Optimistic contribution of each request: best alternative with every
    // node and link at its largest coefficient, or 0 for rejection.
    const std::size_t R = m.vnrs.size();
    alt_best_.resize(R);
    suffix_.assign(R + 1, 0.0);
    int max_host = -1;
    for (const MilpVar& v : m.vars) max_host = std::max(max_host, v.host);
    used_.assign(static_cast<std::size_t>(max_host + 1), 0);
    for (std::size_t r = 0; r < R; ++r) {
      double best = 0.0;
      for (const MilpAltBlock& ab : m.vnrs[r].alternatives) {
        AltBound b;
        for (const auto& xs : ab.x) b.nodes.push_back(max_coef(xs));
        b.incident.resize(ab.x.size());
        for (std::size_t l = 0; l < ab.links.size(); ++l) {
          b.incident[ab.links[l].i].push_back({static_cast<int>(l), ab.links[l].j});
          b.incident[ab.links[l].j].push_back({static_cast<int>(l), ab.links[l].i});
        }
        for (const MilpLinkBlock& lb : ab.links) {
          std::vector<int> all;
          for (const auto& [hosts, ws] : lb.w_by_hosts) all.insert(all.end(), ws.begin(), ws.end());
          b.links.push_back(max_coef(all));
        }
        b.node_suffix.assign(b.nodes.size() + 1, 0.0);
        for (std::size_t i = b.nodes.size(); i-- > 0;)
          b.node_suffix[i] = b.node_suffix[i + 1] + b.nodes[i];
        b.link_suffix.assign(b.links.size() + 1, 0.0);
        for (std::size_t l = b.links.size(); l-- > 0;)
          b.link_suffix[l] = b.link_suffix[l + 1] + b.links[l];
        best = std::max(best, coef_[ab.y] + b.node_suffix[0] + b.link_suffix[0]);
        alt_best_[r].push_back(std::move(b));
      }
      suffix_[r] = best;
    }
    for (std::size_t r = R; r-- > 0;) suffix_[r] += suffix_[r + 1];
    choice_.assign(R, Choice{});
  }

  BnbResult run() {
    BnbResult res;
    if (budget_ <= 0.0) return res;
    dfs_vnr(0, 0.0, 0);
    res.has_incumbent = have_best_;
    res.optimal = have_best_ && !expired_;
    if (have_best_) {
      res.solution = decode(best_);
      res.solution.objective = best_obj_;
    }
    res.solution.explored = nodes_;
    return res;
  }

 private:
  struct AltBound {
    std::vector<double> nodes, links, node_suffix, link_suffix;
    std::vector<std::vector<std::pair<int, int>>> incident;  // (link, other node)
  };
  struct Choice {
    int alternative = -1;
    std::vector<int> x;  // chosen x var per virtual node
    std::vector<int> w;  // chosen w var per link
  };

  double max_coef(const std::vector<int>& vars) const {
    double m = -std::numeric_limits<double>::infinity();
    for (int v : vars) m = std::max(m, coef_[v]);
    return m;
  }

  bool tick() {
    if (expired_) return true;
    if ((++nodes_ & 1023u) == 0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (elapsed > budget_) expired_ = true;
    }
    return expired_;
  }

  bool prune(double ub_obj, int ub_count) const {
    return have_best_ && cannot_improve(ub_obj, ub_count, best_obj_, best_count_);
  }

  bool assign(int var) {
    bool ok = true;
    for (const auto& [row, coef] : incidence_[var]) {
      activity_[row] += coef;
      ok = ok && activity_[row] <= m_.rows[row].rhs + kFeasibilityTol;
    }
    return ok;
  }
  void unassign(int var) {
    for (const auto& [row, coef] : incidence_[var]) activity_[row] -= coef;
  }

  void dfs_vnr(std::size_t r, double obj, int count) {
    if (tick()) return;
    const std::size_t R = m_.vnrs.size();
    if (r == R) {
      if (!have_best_ || strictly_better(obj, count, best_obj_, best_count_)) {
        have_best_ = true;
        best_obj_ = obj;
        best_count_ = count;
        best_ = choice_;
      }
      return;
    }
    if (prune(obj + suffix_[r], count + static_cast<int>(R - r))) return;
    choice_[r] = Choice{};
    dfs_vnr(r + 1, obj, count);
    const MilpVnrBlock& block = m_.vnrs[r];
    for (int a = 0; a < static_cast<int>(block.alternatives.size()); ++a) {
      const MilpAltBlock& ab = block.alternatives[a];
      choice_[r] = Choice{a, std::vector<int>(ab.x.size(), -1), std::vector<int>(ab.links.size(), -1)};
      if (assign(ab.y))
        place(r, a, 0, obj + coef_[ab.y], count, alt_best_[r][a].link_suffix[0]);
      unassign(ab.y);
    }
    choice_[r] = Choice{};
  }

  // Best objective coefficient of a link once both endpoints are placed:
  // the shortest candidate path between the hosts comes first.
  std::optional<double> routed_bound(const MilpLinkBlock& lb, NodeId p, NodeId q) const {
    auto it = lb.w_by_hosts.find({p, q});
    if (it == lb.w_by_hosts.end() || it->second.empty()) return std::nullopt;
    return coef_[it->second.front()];
  }

  // link_ub: bound on the routing terms given the hosts placed so far.
  void place(std::size_t r, int a, std::size_t i, double obj, int count, double link_ub) {
    if (tick()) return;
    const MilpAltBlock& ab = m_.vnrs[r].alternatives[a];
    const AltBound& b = alt_best_[r][a];
    const int rest = static_cast<int>(m_.vnrs.size() - r - 1);
    if (prune(obj + b.node_suffix[i] + link_ub + suffix_[r + 1], count + 1 + rest)) return;
    if (i == ab.x.size()) {
      route(r, a, 0, obj, count);
      return;
    }
    for (int v : ab.x[i]) {
      const NodeId p = m_.vars[v].host;
      if (used_[p]) continue;
      double ub = link_ub;
      bool routable = true;
      for (const auto& [l, other] : b.incident[i]) {
        const int ov = choice_[r].x[other];
        if (ov < 0) continue;
        const MilpLinkBlock& lb = ab.links[l];
        const NodeId q = m_.vars[ov].host;
        auto best = lb.i == static_cast<int>(i) ? routed_bound(lb, p, q) : routed_bound(lb, q, p);
        if (!best) {
          routable = false;
          break;
        }
        ub += *best - b.links[l];
      }
      if (!routable) continue;
      if (assign(v)) {
        used_[p] = 1;
        choice_[r].x[i] = v;
        place(r, a, i + 1, obj + coef_[v], count, ub);
        choice_[r].x[i] = -1;
        used_[p] = 0;
      }
      unassign(v);
    }
  }

  void route(std::size_t r, int a, std::size_t l, double obj, int count) {
    if (tick()) return;
    const MilpAltBlock& ab = m_.vnrs[r].alternatives[a];
    const int rest = static_cast<int>(m_.vnrs.size() - r - 1);
    double ub = 0.0;
    for (std::size_t k = l; k < ab.links.size(); ++k)
      ub += *routed_bound(ab.links[k], m_.vars[choice_[r].x[ab.links[k].i]].host,
                          m_.vars[choice_[r].x[ab.links[k].j]].host);
    if (prune(obj + ub + suffix_[r + 1], count + 1 + rest)) return;
    if (l == ab.links.size()) {
      // Hosts are only exclusive within one request.
      std::vector<char> saved(used_.size(), 0);
      std::swap(saved, used_);
      dfs_vnr(r + 1, obj, count + 1);
      std::swap(saved, used_);
      return;
    }
    const MilpLinkBlock& lb = ab.links[l];
    const NodeId p = m_.vars[choice_[r].x[lb.i]].host, q = m_.vars[choice_[r].x[lb.j]].host;
    auto it = lb.w_by_hosts.find({p, q});
    if (it == lb.w_by_hosts.end()) return;
    for (int v : it->second) {
      if (assign(v)) {
        choice_[r].w[l] = v;
        route(r, a, l + 1, obj + coef_[v], count);
        choice_[r].w[l] = -1;
      }
      unassign(v);
    }
  }

  ExactSolution decode(const std::vector<Choice>& choices) const {
    ExactSolution sol;
    for (std::size_t r = 0; r < choices.size(); ++r) {
      const Choice& c = choices[r];
      if (c.alternative < 0) continue;
      Embedding e;
      e.vnr_id = m_.vnrs[r].vnr_id;
      e.alternative = c.alternative;
      for (int v : c.x) e.node_map.push_back(m_.vars[v].host);
      for (int v : c.w) e.link_paths.push_back(m_.paths[m_.vars[v].path]);
      sol.accepted.emplace(e.vnr_id, std::move(e));
    }
    return sol;
  }

  const MilpModel& m_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::vector<std::pair<int, double>>> incidence_;
  std::vector<double> activity_, coef_;
  std::vector<std::vector<AltBound>> alt_best_;
  std::vector<double> suffix_;
  std::vector<char> used_;
  std::vector<Choice> choice_, best_;
  bool have_best_ = false;
  double best_obj_ = 0.0;
  int best_count_ = 0;
  std::uint64_t nodes_ = 0;
  bool expired_ = false;
};

}  // namespace

BnbResult solve_bnb(const MilpModel& model, double time_budget_seconds) {
  return BranchAndBound(model, time_budget_seconds).run();
}

ExactSolution solution_from_values(const MilpModel& model,
                                   const std::map<std::string, double>& values) {
  std::map<std::string, int> index;
  for (int v = 0; v < model.num_vars(); ++v) index.emplace(model.vars[v].name, v);
  std::vector<char> on(model.vars.size(), 0);
  for (const auto& [name, value] : values) {
    auto it = index.find(name);
    if (it == index.end()) {
      if (name.size() > 2 && name[1] == '_' && (name[0] == 'y' || name[0] == 'x' || name[0] == 'w'))
        throw FormatError("solution names unknown variable '" + name + "'");
      continue;
    }
    on[it->second] = value > 0.5 ? 1 : 0;
  }
  ExactSolution sol;
  for (const MilpVnrBlock& block : model.vnrs) {
    int chosen = -1;
    for (int a = 0; a < static_cast<int>(block.alternatives.size()); ++a)
      if (on[block.alternatives[a].y]) {
        if (chosen >= 0)
          throw FormatError("request " + std::to_string(block.vnr_id) +
                            " selects more than one alternative");
        chosen = a;
      }
    if (chosen < 0) continue;
    const MilpAltBlock& ab = block.alternatives[chosen];
    Embedding e;
    e.vnr_id = block.vnr_id;
    e.alternative = chosen;
    sol.objective += model.objective[ab.y].coef;
    for (std::size_t i = 0; i < ab.x.size(); ++i) {
      NodeId host = -1;
      for (int v : ab.x[i])
        if (on[v]) {
          if (host >= 0) throw FormatError("virtual node placed twice in request " +
                                           std::to_string(block.vnr_id));
          host = model.vars[v].host;
          sol.objective += model.objective[v].coef;
        }
      if (host < 0)
        throw FormatError("virtual node unplaced in request " + std::to_string(block.vnr_id));
      e.node_map.push_back(host);
    }
    for (const MilpLinkBlock& lb : ab.links) {
      int path = -1;
      for (const auto& [hosts, ws] : lb.w_by_hosts)
        for (int v : ws)
          if (on[v]) {
            if (path >= 0) throw FormatError("virtual link routed twice in request " +
                                             std::to_string(block.vnr_id));
            path = model.vars[v].path;
            sol.objective += model.objective[v].coef;
          }
      if (path < 0)
        throw FormatError("virtual link unrouted in request " + std::to_string(block.vnr_id));
      e.link_paths.push_back(model.paths[path]);
    }
    sol.accepted.emplace(e.vnr_id, std::move(e));
  }
  return sol;
}

double solution_objective(const Scenario& scenario, const ExactSolution& solution) {
  double obj = 0.0;
  for (const VNR& v : scenario.vnrs) {
    auto it = solution.accepted.find(v.id);
    if (it == solution.accepted.end()) continue;
    obj += linear_objective(v.alternatives.at(it->second.alternative), it->second);
  }
  return obj;
}

std::string check_solution(const Scenario& scenario, const ExactSolution& solution) {
  std::map<int, const VNR*> by_id;
  for (const VNR& v : scenario.vnrs) by_id[v.id] = &v;
  for (const auto& [id, emb] : solution.accepted)
    if (!by_id.count(id)) return "solution accepts unknown request " + std::to_string(id);

  for (double t : decision_instants(scenario)) {
    std::vector<const VNR*> alive;
    for (const VNR& v : scenario.vnrs)
      if (solution.accepted.count(v.id) && v.alive_at(t)) alive.push_back(&v);
    for (const VNR* target : alive) {
      ResourceLedger ledger(scenario.substrate);
      try {
        for (const VNR* other : alive)
          if (other != target) ledger.commit(scenario.substrate, *other, solution.accepted.at(other->id));
      } catch (const Error& e) {
        return "at t=" + std::to_string(t) + ": " + e.what();
      }
      auto report =
          validate_embedding(scenario.substrate, *target, solution.accepted.at(target->id), ledger);
      if (!report.ok())
        return "request " + std::to_string(target->id) + " at t=" + std::to_string(t) + ": " +
               report.summary();
    }
  }
  return {};
}

}  // namespace vneap
