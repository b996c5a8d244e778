#include "vneap/topology.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vneap/error.hpp"

namespace vneap {

namespace detail {
extern const char* const kAtlantaSndlib;
extern const char* const kGeantSndlib;
}  // namespace detail

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : line) {
    if (c == '(' || c == ')') {
      flush();
      out.emplace_back(1, c);
    } else if (c == ' ' || c == '\t' || c == '\r') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

class SkeletonBuilder {
 public:
  NodeId add_node(const std::string& name, std::size_t line) {
    if (ids_.count(name)) throw ParseError("duplicate node '" + name + "'", line);
    NodeId id = static_cast<NodeId>(sk_.node_names.size());
    ids_.emplace(name, id);
    sk_.node_names.push_back(name);
    return id;
  }
  NodeId find_or_add(const std::string& name, std::size_t line) {
    auto it = ids_.find(name);
    return it != ids_.end() ? it->second : add_node(name, line);
  }
  NodeId require(const std::string& name, std::size_t line) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) throw ParseError("unknown endpoint '" + name + "'", line);
    return it->second;
  }
  void add_edge(NodeId u, NodeId v, std::size_t line) {
    if (u == v)
      throw ParseError("self-loop on '" + sk_.node_names[u] + "'", line);
    if (!edges_.insert(std::minmax(u, v)).second)
      throw ParseError("duplicate edge " + sk_.node_names[u] + " - " +
                           sk_.node_names[v],
                       line);
    sk_.edges.emplace_back(u, v);
  }
  TopologySkeleton take() { return std::move(sk_); }

 private:
  TopologySkeleton sk_;
  std::map<std::string, NodeId> ids_;
  std::set<std::pair<NodeId, NodeId>> edges_;
};

std::string trim_comment(std::string_view line) {
  auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  return std::string(line);
}

int parse_size(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
    throw InvalidArgument("bad size '" + std::string(s) + "' in builtin " +
                          std::string(what));
  return v;
}

TopologySkeleton make_named(int n, std::string name) {
  TopologySkeleton sk;
  sk.name = std::move(name);
  for (int i = 0; i < n; ++i) sk.node_names.push_back("n" + std::to_string(i));
  return sk;
}

}  // namespace

TopologySkeleton parse_sndlib(std::string_view text) {
  SkeletonBuilder b;
  std::string network_name;
  enum class Section { kNone, kNodes, kLinks, kOther } section = Section::kNone;
  std::size_t section_line = 0;
  bool saw_nodes = false, saw_links = false;
  auto lines = split_lines(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::size_t lineno = k + 1;
    std::string_view raw = lines[k];
    if (!raw.empty() && raw.front() == '?') continue;
    if (raw.rfind("# network ", 0) == 0) {
      auto toks = tokenize(raw.substr(10));
      if (!toks.empty()) network_name = toks.front();
    }
    auto toks = tokenize(trim_comment(raw));
    if (toks.empty()) continue;
    if (section == Section::kNone) {
      if (toks.size() != 2 || toks[1] != "(")
        throw ParseError("expected '<SECTION> (' but found '" + std::string(raw) + "'",
                         lineno);
      section_line = lineno;
      if (toks[0] == "NODES") {
        if (saw_nodes) throw ParseError("repeated NODES section", lineno);
        section = Section::kNodes;
        saw_nodes = true;
      } else if (toks[0] == "LINKS") {
        if (!saw_nodes) throw ParseError("LINKS section before NODES", lineno);
        if (saw_links) throw ParseError("repeated LINKS section", lineno);
        section = Section::kLinks;
        saw_links = true;
      } else {
        section = Section::kOther;
      }
      continue;
    }
    if (toks.size() == 1 && toks[0] == ")") {
      section = Section::kNone;
      continue;
    }
    if (section == Section::kNodes) {
      // <id> [( <x> <y> )]
      if (toks.size() != 1 && !(toks.size() == 5 && toks[1] == "(" && toks[4] == ")"))
        throw ParseError("malformed node record", lineno);
      b.add_node(toks[0], lineno);
    } else if (section == Section::kLinks) {
      // <id> ( <src> <tgt> ) ...
      if (toks.size() < 5 || toks[1] != "(" || toks[4] != ")")
        throw ParseError("malformed link record", lineno);
      b.add_edge(b.require(toks[2], lineno), b.require(toks[3], lineno), lineno);
    }
  }
  if (section != Section::kNone)
    throw ParseError("unterminated section", section_line);
  if (!saw_nodes) throw ParseError("missing NODES section", 0);
  if (!saw_links) throw ParseError("missing LINKS section", 0);
  auto sk = b.take();
  sk.name = network_name;
  return sk;
}

TopologySkeleton parse_edge_list(std::string_view text) {
  SkeletonBuilder b;
  auto lines = split_lines(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::size_t lineno = k + 1;
    auto toks = tokenize(trim_comment(lines[k]));
    if (toks.empty()) continue;
    if (toks.size() == 2 && toks[0] == "node") {
      b.add_node(toks[1], lineno);
      continue;
    }
    if (toks.size() != 2) throw ParseError("expected '<u> <v>'", lineno);
    NodeId u = b.find_or_add(toks[0], lineno);
    NodeId v = b.find_or_add(toks[1], lineno);
    b.add_edge(u, v, lineno);
  }
  auto sk = b.take();
  if (sk.node_names.empty()) throw ParseError("edge list declares no nodes", 0);
  return sk;
}

TopologySkeleton parse_topology(std::string_view text) {
  for (auto line : split_lines(text)) {
    auto toks = tokenize(trim_comment(line));
    if (toks.size() == 2 && toks[0] == "NODES" && toks[1] == "(")
      return parse_sndlib(text);
  }
  return parse_edge_list(text);
}

TopologySkeleton load_topology_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open topology file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto sk = parse_topology(ss.str());
  if (sk.name.empty()) sk.name = path.stem().string();
  return sk;
}

std::vector<std::string> builtin_topology_names() {
  return {"atlanta", "geant", "ring-N", "path-N", "star-N", "complete-N", "grid-RxC"};
}

TopologySkeleton builtin_topology(std::string_view name) {
  if (name == "atlanta") {
    auto sk = parse_sndlib(detail::kAtlantaSndlib);
    sk.name = "atlanta";
    return sk;
  }
  if (name == "geant") {
    auto sk = parse_sndlib(detail::kGeantSndlib);
    sk.name = "geant";
    return sk;
  }
  auto dash = name.find('-');
  if (dash == std::string_view::npos)
    throw InvalidArgument("unknown builtin topology '" + std::string(name) + "'");
  std::string_view kind = name.substr(0, dash), arg = name.substr(dash + 1);
  std::string full(name);
  if (kind == "grid") {
    auto x = arg.find('x');
    if (x == std::string_view::npos)
      throw InvalidArgument("grid topology needs RxC, got '" + full + "'");
    int rows = parse_size(arg.substr(0, x), name), cols = parse_size(arg.substr(x + 1), name);
    auto sk = make_named(rows * cols, full);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        int id = r * cols + c;
        if (c + 1 < cols) sk.edges.emplace_back(id, id + 1);
        if (r + 1 < rows) sk.edges.emplace_back(id, id + cols);
      }
    return sk;
  }
  int n = parse_size(arg, name);
  auto sk = make_named(n, full);
  if (kind == "ring") {
    if (n < 3) throw InvalidArgument("ring topology needs at least 3 nodes");
    for (int i = 0; i < n; ++i) sk.edges.emplace_back(i, (i + 1) % n);
    std::swap(sk.edges.back().first, sk.edges.back().second);
  } else if (kind == "path") {
    for (int i = 0; i + 1 < n; ++i) sk.edges.emplace_back(i, i + 1);
  } else if (kind == "star") {
    // star-N: one center plus N leaves
    sk = make_named(n + 1, full);
    for (int i = 1; i <= n; ++i) sk.edges.emplace_back(0, i);
  } else if (kind == "complete") {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) sk.edges.emplace_back(i, j);
  } else {
    throw InvalidArgument("unknown builtin topology '" + full + "'");
  }
  return sk;
}

TopologySkeleton resolve_topology(std::string_view source) {
  constexpr std::string_view kPrefix = "builtin:";
  if (source.rfind(kPrefix, 0) == 0) return builtin_topology(source.substr(kPrefix.size()));
  return load_topology_file(std::filesystem::path(std::string(source)));
}

}  // namespace vneap
