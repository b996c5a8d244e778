#include "vneap/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vneap/error.hpp"
#include "vneap/metrics.hpp"
#include "vneap/simulator.hpp"

namespace vneap {

int MilpModel::count(VarKind kind) const {
  return static_cast<int>(
      std::count_if(vars.begin(), vars.end(), [&](const MilpVar& v) { return v.kind == kind; }));
}

namespace {

std::string join_ids(std::initializer_list<long long> ids) {
  std::string s;
  for (long long v : ids) {
    s += '_';
    s += std::to_string(v);
  }
  return s;
}

class ModelBuilder {
 public:
  ModelBuilder(MilpModel& m, std::size_t cap) : m_(m), cap_(cap) {}

  int add_var(MilpVar v, double obj) {
    if (m_.vars.size() >= cap_)
      throw LimitExceeded("model exceeds the variable cap of " + std::to_string(cap_));
    const int id = static_cast<int>(m_.vars.size());
    m_.vars.push_back(std::move(v));
    m_.objective.push_back({id, obj});
    return id;
  }

  int path_id(const SubstratePath& p) {
    auto [it, inserted] = path_index_.try_emplace(p, static_cast<int>(m_.paths.size()));
    if (inserted) m_.paths.push_back(p);
    return it->second;
  }

  void add_row(std::string name, std::vector<LinearTerm> terms, RowSense sense, double rhs,
               bool resource = false) {
    if (terms.empty()) return;
    if (resource) m_.resource_rows.push_back(static_cast<int>(m_.rows.size()));
    m_.rows.push_back({std::move(name), std::move(terms), sense, rhs});
  }

 private:
  MilpModel& m_;
  std::size_t cap_;
  std::map<SubstratePath, int> path_index_;
};

}  // namespace

MilpModel build_milp(const Scenario& scenario, const PathCache& paths,
                     const MilpBuildOptions& options) {
  const SubstrateNetwork& sn = scenario.substrate;
  const int n = sn.num_nodes();
  MilpModel m;
  m.k = paths.k();
  ModelBuilder b(m, options.max_variables);

  // Per request: resource terms by substrate node / edge, for the
  // capacity and bandwidth rows assembled afterwards.
  const std::size_t R = scenario.vnrs.size();
  std::vector<std::vector<std::vector<LinearTerm>>> node_terms(R), edge_terms(R);

  for (std::size_t r = 0; r < R; ++r) {
    const VNR& vnr = scenario.vnrs[r];
    node_terms[r].resize(n);
    edge_terms[r].resize(sn.num_edges());
    MilpVnrBlock block;
    block.vnr_id = vnr.id;
    std::vector<LinearTerm> sel;
    for (int a = 0; a < static_cast<int>(vnr.alternatives.size()); ++a) {
      const Alternative& alt = vnr.alternatives[a];
      MilpAltBlock ab;
      ab.y = b.add_var({VarKind::kY, vnr.id, a, -1, -1, -1, -1, -1, "y" + join_ids({vnr.id, a})},
                       revenue(alt));
      sel.push_back({ab.y, 1.0});

      ab.x.resize(alt.num_nodes());
      std::vector<std::vector<int>> x_at(alt.num_nodes(), std::vector<int>(n, -1));
      for (int i = 0; i < alt.num_nodes(); ++i)
        for (NodeId p = 0; p < n; ++p) {
          if (!alt.node(i).allows(p)) continue;
          const double c = alt.node(i).demand;
          int v = b.add_var({VarKind::kX, vnr.id, a, i, -1, -1, p, -1,
                             "x" + join_ids({vnr.id, a, i, p})},
                            -c);
          ab.x[i].push_back(v);
          x_at[i][p] = v;
          if (c != 0.0) node_terms[r][p].push_back({v, c});
        }

      for (int l = 0; l < alt.num_links(); ++l) {
        const VirtualLink& link = alt.link(l);
        MilpLinkBlock lb{link.i, link.j, link.demand, {}};
        for (NodeId p = 0; p < n; ++p) {
          if (x_at[link.i][p] < 0) continue;
          for (NodeId q = 0; q < n; ++q) {
            if (q == p || x_at[link.j][q] < 0) continue;
            auto& list = lb.w_by_hosts[{p, q}];
            for (const SubstratePath& path : paths.paths(p, q)) {
              const int pid = b.path_id(path);
              int v = b.add_var({VarKind::kW, vnr.id, a, link.i, link.j, l, -1, pid,
                                 "w" + join_ids({vnr.id, a, link.i, link.j, pid})},
                                -link.demand * path.hops());
              list.push_back(v);
              if (link.demand != 0.0)
                for (EdgeId e : path.edges_in(sn)) edge_terms[r][e].push_back({v, link.demand});
            }
          }
        }
        ab.links.push_back(std::move(lb));
      }
      block.alternatives.push_back(std::move(ab));
    }
    m.vnrs.push_back(std::move(block));
    b.add_row("sel" + join_ids({vnr.id}), std::move(sel), RowSense::kLe, 1.0);
  }

  // Structural rows per (request, alternative).
  for (const MilpVnrBlock& block : m.vnrs) {
    for (int a = 0; a < static_cast<int>(block.alternatives.size()); ++a) {
      const MilpAltBlock& ab = block.alternatives[a];
      const std::string base = join_ids({block.vnr_id, a});
      for (std::size_t i = 0; i < ab.x.size(); ++i) {
        std::vector<LinearTerm> t;
        for (int v : ab.x[i]) t.push_back({v, 1.0});
        t.push_back({ab.y, -1.0});
        b.add_row("assign" + base + join_ids({static_cast<long long>(i)}), std::move(t),
                  RowSense::kEq, 0.0);
      }
      for (NodeId p = 0; p < n; ++p) {
        std::vector<LinearTerm> t;
        for (const auto& xs : ab.x)
          for (int v : xs)
            if (m.vars[v].host == p) t.push_back({v, 1.0});
        if (t.size() >= 2)
          b.add_row("coloc" + base + join_ids({p}), std::move(t), RowSense::kLe, 1.0);
      }
      for (const MilpLinkBlock& lb : ab.links) {
        const std::string lname = base + join_ids({lb.i, lb.j});
        std::vector<LinearTerm> route;
        std::map<NodeId, std::vector<LinearTerm>> src, dst;
        for (const auto& [hosts, ws] : lb.w_by_hosts)
          for (int v : ws) {
            route.push_back({v, 1.0});
            src[hosts.first].push_back({v, 1.0});
            dst[hosts.second].push_back({v, 1.0});
          }
        route.push_back({ab.y, -1.0});
        b.add_row("route" + lname, std::move(route), RowSense::kEq, 0.0);
        for (int v : ab.x[lb.i]) {
          auto t = src[m.vars[v].host];
          t.push_back({v, -1.0});
          b.add_row("src" + lname + join_ids({m.vars[v].host}), std::move(t), RowSense::kEq, 0.0);
        }
        for (int v : ab.x[lb.j]) {
          auto t = dst[m.vars[v].host];
          t.push_back({v, -1.0});
          b.add_row("dst" + lname + join_ids({m.vars[v].host}), std::move(t), RowSense::kEq, 0.0);
        }
      }
    }
  }

  // Resource rows at the decision instants. An instant whose alive set is
  // contained in another instant's set yields implied rows and is skipped.
  for (const VNR& v : scenario.vnrs)
    if (m.instants.empty() || m.instants.back() != v.arrival) m.instants.push_back(v.arrival);
  std::vector<std::vector<std::size_t>> alive(m.instants.size());
  for (std::size_t t = 0; t < m.instants.size(); ++t)
    for (std::size_t r = 0; r < R; ++r)
      if (scenario.vnrs[r].alive_at(m.instants[t])) alive[t].push_back(r);
  for (std::size_t t = 0; t < m.instants.size(); ++t) {
    bool implied = false;
    for (std::size_t u = 0; u < m.instants.size() && !implied; ++u) {
      if (u == t) continue;
      const bool subset = std::includes(alive[u].begin(), alive[u].end(), alive[t].begin(),
                                        alive[t].end());
      implied = subset && (alive[u].size() > alive[t].size() || u < t);
    }
    if (implied) continue;
    for (NodeId p = 0; p < n; ++p) {
      std::vector<LinearTerm> terms;
      for (std::size_t r : alive[t])
        terms.insert(terms.end(), node_terms[r][p].begin(), node_terms[r][p].end());
      b.add_row("cap" + join_ids({static_cast<long long>(t), p}), std::move(terms), RowSense::kLe,
                sn.node(p).capacity, true);
    }
    for (EdgeId e = 0; e < sn.num_edges(); ++e) {
      std::vector<LinearTerm> terms;
      for (std::size_t r : alive[t])
        terms.insert(terms.end(), edge_terms[r][e].begin(), edge_terms[r][e].end());
      b.add_row("bw" + join_ids({static_cast<long long>(t), e}), std::move(terms), RowSense::kLe,
                sn.edge(e).bandwidth, true);
    }
  }
  return m;
}

bool operator==(const LpProblem& a, const LpProblem& b) {
  if (a.maximize != b.maximize || a.var_names != b.var_names || a.objective != b.objective ||
      a.binaries != b.binaries || a.rows.size() != b.rows.size())
    return false;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    const MilpRow &x = a.rows[k], &y = b.rows[k];
    if (x.name != y.name || x.terms != y.terms || x.sense != y.sense || x.rhs != y.rhs)
      return false;
  }
  return true;
}

LpProblem to_lp_problem(const MilpModel& model) {
  LpProblem lp;
  lp.maximize = true;
  for (const MilpVar& v : model.vars) {
    lp.var_names.push_back(v.name);
    lp.binaries.push_back(v.name);
  }
  lp.objective = model.objective;
  lp.rows = model.rows;
  return lp;
}

namespace {

constexpr int kTermsPerLine = 8;

void write_terms(std::ostream& out, const std::vector<LinearTerm>& terms,
                 const std::vector<MilpVar>& vars) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k && k % kTermsPerLine == 0) out << "\n  ";
    const double c = terms[k].coef;
    out << (std::signbit(c) ? " - " : " + ") << format_double(std::abs(c)) << ' '
        << vars[terms[k].var].name;
  }
}

const char* sense_text(RowSense s) {
  switch (s) {
    case RowSense::kLe: return "<=";
    case RowSense::kEq: return "=";
    case RowSense::kGe: return ">=";
  }
  return "=";
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
  out << "\\ vneap alternative-selection embedding model\n"
      << "\\ k " << model.k << ", instants " << model.instants.size() << ", variables "
      << model.vars.size() << ", rows " << model.rows.size() << '\n';
  for (std::size_t t = 0; t < model.instants.size(); ++t)
    out << "\\ instant " << t << ": " << format_double(model.instants[t]) << '\n';
  for (std::size_t p = 0; p < model.paths.size(); ++p) {
    out << "\\ path " << p << ":";
    for (NodeId v : model.paths[p].nodes()) out << ' ' << v;
    out << '\n';
  }
  out << "Maximize\n obj:";
  write_terms(out, model.objective, model.vars);
  out << "\nSubject To\n";
  for (const MilpRow& row : model.rows) {
    out << ' ' << row.name << ':';
    write_terms(out, row.terms, model.vars);
    out << ' ' << sense_text(row.sense) << ' ' << format_double(row.rhs) << '\n';
  }
  out << "Binary\n";
  for (std::size_t k = 0; k < model.vars.size(); ++k)
    out << (k % kTermsPerLine == 0 ? (k ? "\n " : " ") : " ") << model.vars[k].name;
  out << "\nEnd\n";
}

void export_lp(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_lp(model, out);
  out.flush();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool is_sense(const std::string& s) {
  return s == "<=" || s == ">=" || s == "=" || s == "=<" || s == "=>" || s == "<" || s == ">";
}

RowSense to_sense(const std::string& s) {
  if (s == "=") return RowSense::kEq;
  if (s == ">=" || s == "=>" || s == ">") return RowSense::kGe;
  return RowSense::kLe;
}

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinary, kGeneral, kEnd };

// Recognizes a section header line; "subject to" spans two words.
bool section_of(const std::string& line, Section& s) {
  std::istringstream ls(line);
  std::string w1, w2, rest;
  ls >> w1 >> w2 >> rest;
  w1 = lower(w1);
  w2 = lower(w2);
  if (!rest.empty()) return false;
  if (w2.empty()) {
    if (w1 == "maximize" || w1 == "maximum" || w1 == "max" || w1 == "minimize" ||
        w1 == "minimum" || w1 == "min") {
      s = Section::kObjective;
      return true;
    }
    if (w1 == "st" || w1 == "s.t." || w1 == "st.") s = Section::kConstraints;
    else if (w1 == "bounds" || w1 == "bound") s = Section::kBounds;
    else if (w1 == "binary" || w1 == "binaries" || w1 == "bin") s = Section::kBinary;
    else if (w1 == "general" || w1 == "generals" || w1 == "gen") s = Section::kGeneral;
    else if (w1 == "end") s = Section::kEnd;
    else return false;
    return true;
  }
  if ((w1 == "subject" && w2 == "to") || (w1 == "such" && w2 == "that")) {
    s = Section::kConstraints;
    return true;
  }
  return false;
}

class LpParser {
 public:
  explicit LpParser(LpProblem& lp) : lp_(lp) {}

  int var_id(const std::string& name) {
    auto [it, inserted] = index_.try_emplace(name, static_cast<int>(lp_.var_names.size()));
    if (inserted) lp_.var_names.push_back(name);
    return it->second;
  }

  // Parses "[name:] terms" from tokens[pos..end) for the objective.
  void objective(const std::vector<Token>& toks) {
    std::size_t pos = 0;
    skip_label(toks, pos);
    lp_.objective = terms(toks, pos, toks.size());
  }

  void constraints(const std::vector<Token>& toks) {
    std::size_t pos = 0;
    while (pos < toks.size()) {
      MilpRow row;
      const std::size_t start_line = toks[pos].line;
      row.name = skip_label(toks, pos);
      std::size_t end = pos;
      while (end < toks.size() && !is_sense(toks[end].text)) ++end;
      if (end + 1 >= toks.size())
        throw ParseError("constraint without sense and right-hand side", start_line);
      row.terms = terms(toks, pos, end);
      row.sense = to_sense(toks[end].text);
      std::string rhs = toks[end + 1].text;
      pos = end + 2;
      if ((rhs == "-" || rhs == "+") && pos < toks.size()) rhs += toks[pos++].text;
      if (!parse_number(rhs, row.rhs))
        throw ParseError("bad right-hand side '" + rhs + "'", toks[end + 1].line);
      if (row.name.empty()) row.name = "r" + std::to_string(lp_.rows.size());
      lp_.rows.push_back(std::move(row));
    }
  }

 private:
  static std::string skip_label(const std::vector<Token>& toks, std::size_t& pos) {
    if (pos < toks.size() && toks[pos].text.size() > 1 && toks[pos].text.back() == ':') {
      const std::string& t = toks[pos++].text;
      return t.substr(0, t.size() - 1);
    }
    if (pos + 1 < toks.size() && toks[pos + 1].text == ":") {
      std::string name = toks[pos].text;
      pos += 2;
      return name;
    }
    return {};
  }

  std::vector<LinearTerm> terms(const std::vector<Token>& toks, std::size_t pos,
                                std::size_t end) {
    std::vector<LinearTerm> out;
    while (pos < end) {
      double sign = 1.0, coef = 1.0;
      while (pos < end && (toks[pos].text == "+" || toks[pos].text == "-")) {
        if (toks[pos].text == "-") sign = -sign;
        ++pos;
      }
      if (pos >= end) throw ParseError("dangling sign", toks[end - 1].line);
      double num;
      if (parse_number(toks[pos].text, num)) {
        coef = num;
        ++pos;
        if (pos >= end) throw ParseError("coefficient without variable", toks[pos - 1].line);
      }
      const std::string& name = toks[pos].text;
      if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
        throw ParseError("expected a variable name, got '" + name + "'", toks[pos].line);
      out.push_back({var_id(name), sign * coef});
      ++pos;
    }
    return out;
  }

  LpProblem& lp_;
  std::map<std::string, int> index_;
};

}  // namespace

LpProblem read_lp(std::istream& in) {
  LpProblem lp;
  LpParser parser(lp);
  Section section = Section::kNone;
  std::vector<Token> pending;
  bool saw_objective = false, saw_end = false;

  auto flush = [&] {
    if (section == Section::kObjective) {
      parser.objective(pending);
      saw_objective = true;
    } else if (section == Section::kConstraints) {
      parser.constraints(pending);
    } else if (section == Section::kBinary) {
      for (const Token& t : pending) {
        parser.var_id(t.text);
        lp.binaries.push_back(t.text);
      }
    } else if (section == Section::kNone && !pending.empty()) {
      throw ParseError("content before the objective section", pending.front().line);
    }
    pending.clear();
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    Section next;
    if (section_of(line, next)) {
      flush();
      if (next == Section::kObjective) lp.maximize = lower(line).find("max") != std::string::npos;
      section = next;
      if (section == Section::kEnd) {
        saw_end = true;
        break;
      }
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) pending.push_back({tok, lineno});
  }
  if (!saw_end) throw ParseError("missing End section (truncated file?)", lineno);
  if (!saw_objective) throw ParseError("missing objective section", lineno);
  return lp;
}

LpProblem read_lp_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_lp(in);
}

std::map<std::string, double> read_solution(std::istream& in) {
  std::map<std::string, double> values;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name, value, extra;
    if (!(ls >> name >> value) || (ls >> extra)) continue;
    double v;
    if (!parse_number(value, v)) continue;
    values[name] = v;
  }
  return values;
}

}  // namespace vneap
