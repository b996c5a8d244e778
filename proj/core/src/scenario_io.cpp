#include "vneap/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "vneap/error.hpp"

namespace vneap {

using nlohmann::json;

namespace {

constexpr const char* kScenarioFormat = "vneap-scenario";

json range_json(Range r) { return json::array({r.lo, r.hi}); }

const json& field(const json& j, const char* key, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end())
    throw FormatError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

template <typename T>
T get_as(const json& j, const char* key, std::string_view where) {
  const json& v = field(j, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

Range range_from(const json& v, const std::string& key, std::string_view origin) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw FormatError(std::string(origin) + ": field '" + key +
                      "' must be a [lo, hi] pair of numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

json alternative_json(const Alternative& alt) {
  json nodes = json::array();
  for (const auto& n : alt.nodes()) {
    json jn = {{"demand", n.demand}};
    if (n.hosts) jn["hosts"] = *n.hosts;
    nodes.push_back(std::move(jn));
  }
  json links = json::array();
  for (const auto& l : alt.links())
    links.push_back({{"i", l.i}, {"j", l.j}, {"demand", l.demand}});
  return {{"nodes", std::move(nodes)}, {"links", std::move(links)}};
}

Alternative alternative_from(const json& j) {
  std::vector<VirtualNode> nodes;
  for (const auto& jn : field(j, "nodes", "alternative")) {
    VirtualNode n;
    n.demand = get_as<double>(jn, "demand", "virtual node");
    if (jn.contains("hosts")) n.hosts = get_as<std::vector<NodeId>>(jn, "hosts", "virtual node");
    nodes.push_back(std::move(n));
  }
  std::vector<VirtualLink> links;
  for (const auto& jl : field(j, "links", "alternative"))
    links.push_back({get_as<int>(jl, "i", "virtual link"), get_as<int>(jl, "j", "virtual link"),
                     get_as<double>(jl, "demand", "virtual link")});
  return Alternative(std::move(nodes), std::move(links));
}

}  // namespace

json config_to_json(const ScenarioConfig& c) {
  return {
      {"substrate", c.substrate},
      {"capacity", range_json(c.capacity)},
      {"bandwidth", range_json(c.bandwidth)},
      {"vnr_count", c.vnr_count},
      {"alternatives_per_vnr", c.alternatives_per_vnr},
      {"node_demand", range_json(c.node_demand)},
      {"link_demand", range_json(c.link_demand)},
      {"mutation_probability", range_json(c.mutation_probability)},
      {"mean_lifetime", c.mean_lifetime},
      {"arrival_rate", c.arrival_rate},
      {"base_min_nodes", c.base_min_nodes},
      {"base_max_nodes", c.base_max_nodes},
      {"base_edge_probability", c.base_edge_probability},
      {"seed", c.seed},
      {"strict_generation", c.strict_generation},
  };
}

ScenarioConfig config_from_json(const json& j, std::string_view origin) {
  if (!j.is_object()) throw FormatError(std::string(origin) + ": config must be an object");
  ScenarioConfig c;
  for (const auto& [key, v] : j.items()) {
    auto bad_type = [&] {
      return FormatError(std::string(origin) + ": field '" + key + "' has the wrong type");
    };
    auto number = [&]() -> double {
      if (!v.is_number()) throw bad_type();
      return v.get<double>();
    };
    auto integer = [&]() -> long long {
      if (!v.is_number_integer()) throw bad_type();
      return v.get<long long>();
    };
    if (key == "substrate") {
      if (!v.is_string()) throw bad_type();
      c.substrate = v.get<std::string>();
    } else if (key == "capacity") c.capacity = range_from(v, key, origin);
    else if (key == "bandwidth") c.bandwidth = range_from(v, key, origin);
    else if (key == "vnr_count") c.vnr_count = static_cast<int>(integer());
    else if (key == "alternatives_per_vnr") c.alternatives_per_vnr = static_cast<int>(integer());
    else if (key == "node_demand") c.node_demand = range_from(v, key, origin);
    else if (key == "link_demand") c.link_demand = range_from(v, key, origin);
    else if (key == "mutation_probability") c.mutation_probability = range_from(v, key, origin);
    else if (key == "mean_lifetime") c.mean_lifetime = number();
    else if (key == "arrival_rate") c.arrival_rate = number();
    else if (key == "base_min_nodes") c.base_min_nodes = static_cast<int>(integer());
    else if (key == "base_max_nodes") c.base_max_nodes = static_cast<int>(integer());
    else if (key == "base_edge_probability") c.base_edge_probability = number();
    else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw bad_type();
      c.seed = v.get<std::uint64_t>();
    } else if (key == "strict_generation") {
      if (!v.is_boolean()) throw bad_type();
      c.strict_generation = v.get<bool>();
    } else {
      throw FormatError(std::string(origin) + ": unknown field '" + key + "'");
    }
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string(origin) + ": " + e.what());
  }
  return c;
}

json scenario_to_json(const Scenario& s) {
  json nodes = json::array();
  for (const auto& n : s.substrate.nodes())
    nodes.push_back({{"name", n.name}, {"capacity", n.capacity}});
  json edges = json::array();
  for (const auto& e : s.substrate.edges())
    edges.push_back({{"u", e.u}, {"v", e.v}, {"bandwidth", e.bandwidth}});
  json vnrs = json::array();
  for (const auto& r : s.vnrs) {
    json alts = json::array();
    for (const auto& a : r.alternatives) alts.push_back(alternative_json(a));
    vnrs.push_back({{"id", r.id},
                    {"arrival", r.arrival},
                    {"lifetime", r.lifetime},
                    {"alternatives", std::move(alts)}});
  }
  return {
      {"format", kScenarioFormat},
      {"version", kScenarioSchemaVersion},
      {"provenance",
       {{"config", config_to_json(s.provenance.config)},
        {"arrival_process", s.provenance.arrival_process},
        {"generation_fallbacks", s.provenance.generation_fallbacks}}},
      {"substrate",
       {{"name", s.substrate.name()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}}},
      {"vnrs", std::move(vnrs)},
  };
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != kScenarioFormat)
    throw FormatError("not a vneap scenario document");
  if (!j.contains("version") || j["version"] != kScenarioSchemaVersion)
    throw FormatError("unsupported scenario schema version (expected " +
                      std::to_string(kScenarioSchemaVersion) + ")");
  Scenario s;
  const json& prov = field(j, "provenance", "scenario");
  s.provenance.config = config_from_json(field(prov, "config", "provenance"), "provenance.config");
  s.provenance.arrival_process = get_as<std::string>(prov, "arrival_process", "provenance");
  s.provenance.generation_fallbacks = get_as<int>(prov, "generation_fallbacks", "provenance");

  const json& sub = field(j, "substrate", "scenario");
  std::vector<SubstrateNode> nodes;
  for (const auto& jn : field(sub, "nodes", "substrate"))
    nodes.push_back({get_as<std::string>(jn, "name", "substrate node"),
                     get_as<double>(jn, "capacity", "substrate node")});
  std::vector<SubstrateEdge> edges;
  for (const auto& je : field(sub, "edges", "substrate"))
    edges.push_back({get_as<int>(je, "u", "substrate edge"), get_as<int>(je, "v", "substrate edge"),
                     get_as<double>(je, "bandwidth", "substrate edge")});
  s.substrate = SubstrateNetwork(std::move(nodes), std::move(edges),
                                 get_as<std::string>(sub, "name", "substrate"));

  for (const auto& jr : field(j, "vnrs", "scenario")) {
    VNR r;
    r.id = get_as<int>(jr, "id", "vnr");
    r.arrival = get_as<double>(jr, "arrival", "vnr");
    r.lifetime = get_as<double>(jr, "lifetime", "vnr");
    for (const auto& ja : field(jr, "alternatives", "vnr"))
      r.alternatives.push_back(alternative_from(ja));
    for (const auto& alt : r.alternatives)
      for (const auto& n : alt.nodes())
        if (n.hosts)
          for (NodeId p : *n.hosts)
            if (!s.substrate.contains(p))
              throw InvalidArgument("VNR " + std::to_string(r.id) +
                                    " names unknown host " + std::to_string(p));
    s.vnrs.push_back(std::move(r));
  }
  std::stable_sort(s.vnrs.begin(), s.vnrs.end(), [](const VNR& a, const VNR& b) {
    return a.arrival < b.arrival || (a.arrival == b.arrival && a.id < b.id);
  });
  s.check();
  return s;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  write_json_file(scenario_to_json(s), path);
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path));
}

}  // namespace vneap
