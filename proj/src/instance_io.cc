#include "plb/instance_io.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "json.hpp"
#include "plb/error.h"

namespace plb {

using nlohmann::json;

namespace {

// ---- SNDlib -------------------------------------------------------------

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  std::string s = hash == std::string::npos ? line : line.substr(0, hash);
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits on whitespace, with parentheses as separate tokens.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      if (c == '(' || c == ')') out.emplace_back(1, c);
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_number(const std::string& token, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse number '" + token + "'", line);
  }
}

int paren_balance(const std::vector<std::string>& tokens) {
  int b = 0;
  for (const auto& t : tokens) {
    if (t == "(") ++b;
    if (t == ")") --b;
  }
  return b;
}

struct SndlibLink {
  std::string id, a, b;
  double capacity;
  double cost;
  int line;
};

struct SndlibDemand {
  std::string id, a, b;
  double value;
  int line;
};

}  // namespace

NetworkInstance parse_sndlib(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::string section;  // current section name, empty at top level
  int depth = 0;        // paren depth inside the current section
  std::set<std::string> seen;
  std::vector<std::pair<std::string, int>> node_entries;
  std::vector<SndlibLink> links;
  std::vector<SndlibDemand> demands;

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw[0] == '?') continue;  // format banner
    const std::string line = strip_comment(raw);
    if (line.empty()) continue;
    const auto tok = tokenize(line);
    if (section.empty()) {
      if (tok.size() != 2 || tok[1] != "(" ||
          !std::all_of(tok[0].begin(), tok[0].end(),
                       [](char c) { return std::isupper(static_cast<unsigned char>(c)) || c == '_'; })) {
        throw ParseError("malformed section header '" + line + "'", line_no);
      }
      section = tok[0];
      depth = 1;
      seen.insert(section);
      continue;
    }
    if (tok.size() == 1 && tok[0] == ")" && depth == 1) {
      section.clear();
      depth = 0;
      continue;
    }
    if (section == "NODES") {
      if (tok.empty() || tok[0] == "(" || tok[0] == ")") {
        throw ParseError("malformed node entry", line_no);
      }
      node_entries.emplace_back(tok[0], line_no);
    } else if (section == "LINKS") {
      // id ( a b ) pre_cap pre_cost routing_cost setup_cost ( {mod_cap mod_cost}* )
      if (tok.size() < 10 || tok[1] != "(" || tok[4] != ")" || tok[9] != "(" ||
          tok.back() != ")") {
        throw ParseError("malformed link entry", line_no);
      }
      SndlibLink l{tok[0], tok[2], tok[3], 0.0, 0.0, line_no};
      const double pre_cap = parse_number(tok[5], line_no);
      parse_number(tok[6], line_no);
      const double routing = parse_number(tok[7], line_no);
      parse_number(tok[8], line_no);
      double module_cap = 0.0;
      if (tok.size() >= 13) module_cap = parse_number(tok[10], line_no);
      for (std::size_t i = 10; i + 1 < tok.size(); ++i) parse_number(tok[i], line_no);
      l.capacity = pre_cap > 0 ? pre_cap : (module_cap > 0 ? module_cap : kInfiniteCapacity);
      l.cost = routing > 0 ? routing : 1.0;
      links.push_back(l);
    } else if (section == "DEMANDS") {
      // id ( a b ) routing_unit value max_path_length
      if (tok.size() < 7 || tok[1] != "(" || tok[4] != ")") {
        throw ParseError("malformed demand entry", line_no);
      }
      parse_number(tok[5], line_no);
      demands.push_back({tok[0], tok[2], tok[3], parse_number(tok[6], line_no), line_no});
    } else {
      depth += paren_balance(tok);
      if (depth < 1) throw ParseError("unbalanced parentheses in " + section, line_no);
    }
  }
  if (!section.empty()) throw ParseError("unterminated section " + section, line_no);
  for (const char* required : {"NODES", "LINKS", "DEMANDS"}) {
    if (!seen.count(required)) {
      throw ParseError(std::string("missing ") + required + " section", line_no);
    }
  }

  NetworkInstance g;
  for (const auto& [id, line] : node_entries) {
    if (g.find_node(id)) throw ParseError("duplicate node '" + id + "'", line);
    g.add_node(id);
  }
  auto node = [&](const std::string& id, int line) {
    const auto n = g.find_node(id);
    if (!n) throw ParseError("unknown node '" + id + "'", line);
    return *n;
  };
  for (const SndlibLink& l : links) {
    const NodeIndex a = node(l.a, l.line);
    const NodeIndex b = node(l.b, l.line);
    if (a == b) continue;
    if (const auto existing = g.link_between(a, b)) {
      g.links[*existing].capacity += l.capacity;
      continue;
    }
    if (g.find_link(l.id)) throw ParseError("duplicate link '" + l.id + "'", l.line);
    g.add_link(a, b, l.capacity, l.cost, l.id);
  }
  for (const SndlibDemand& d : demands) {
    const NodeIndex a = node(d.a, d.line);
    const NodeIndex b = node(d.b, d.line);
    if (a == b || d.value <= 0) continue;
    g.tunnels.push_back(Tunnel{d.id, a, b, d.value, false});
  }
  return g;
}

// ---- GraphML -------------------------------------------------------------

NetworkInstance parse_graphml(const std::string& text, const GraphmlOptions& options) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XML: " + e.message(), static_cast<int>(e.line()));
  }
  const auto root = tree.get_child_optional("graphml");
  if (!root) throw ParseError("no graphml element", 0);

  std::map<std::string, std::string> edge_keys;  // key id -> attr.name
  for (const auto& [tag, child] : *root) {
    if (tag != "key") continue;
    const std::string target = child.get("<xmlattr>.for", "");
    if (target == "edge" || target == "all") {
      // "attr.name" contains the default path separator
      edge_keys[child.get("<xmlattr>.id", "")] =
          child.get(pt::ptree::path_type("<xmlattr>/attr.name", '/'), "");
    }
  }
  const auto graph = root->get_child_optional("graph");
  if (!graph) throw ParseError("no graph element", 0);

  NetworkInstance g;
  for (const auto& [tag, child] : *graph) {
    if (tag != "node") continue;
    const std::string id = child.get("<xmlattr>.id", "");
    if (id.empty()) throw ParseError("node without id", 0);
    if (g.find_node(id)) throw ParseError("duplicate node '" + id + "'", 0);
    g.add_node(id);
  }
  for (const auto& [tag, child] : *graph) {
    if (tag != "edge") continue;
    const std::string s = child.get("<xmlattr>.source", "");
    const std::string t = child.get("<xmlattr>.target", "");
    const auto a = g.find_node(s);
    const auto b = g.find_node(t);
    if (!a || !b) {
      throw ParseError("edge references unknown node '" + (a ? t : s) + "'", 0);
    }
    if (*a == *b || g.link_between(*a, *b)) continue;
    double capacity = options.default_capacity;
    double cost = options.default_cost;
    for (const auto& [dtag, data] : child) {
      if (dtag != "data") continue;
      const auto key = edge_keys.find(data.get("<xmlattr>.key", ""));
      if (key == edge_keys.end()) continue;
      const std::string value = data.get_value<std::string>();
      try {
        if (key->second == options.capacity_key) capacity = std::stod(value);
        if (key->second == options.cost_key) cost = std::stod(value);
      } catch (const std::exception&) {
        throw ParseError("non-numeric " + key->second + " '" + value + "'", 0);
      }
    }
    std::string id = child.get("<xmlattr>.id", "");
    if (id.empty() || g.find_link(id)) id = {};
    g.add_link(*a, *b, capacity, cost, id);
  }
  return g;
}

// ---- demands --------------------------------------------------------------

NetworkInstance generate_demands(NetworkInstance instance, const DemandGenSpec& spec) {
  const auto n = static_cast<long long>(instance.nodes.size());
  if (n < 2) throw InvalidParameter("demand generation needs at least two nodes");
  if (spec.tunnel_count < 1) throw InvalidParameter("tunnel_count must be at least 1");
  if (!(spec.lo <= spec.hi) || spec.lo <= 0) throw InvalidParameter("bad demand range");
  if (!(spec.protected_fraction >= 0 && spec.protected_fraction <= 1)) {
    throw InvalidParameter("protected_fraction must lie in [0, 1]");
  }
  if (spec.tunnel_count > n * (n - 1)) {
    throw InvalidParameter("tunnel_count exceeds the number of distinct node pairs");
  }
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  for (NodeIndex a = 0; a < n; ++a) {
    for (NodeIndex b = 0; b < n; ++b) {
      if (a != b) pairs.emplace_back(a, b);
    }
  }
  std::mt19937_64 rng(spec.seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  // partial Fisher-Yates: the first tunnel_count entries are a uniform sample
  for (int i = 0; i < spec.tunnel_count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng() % (pairs.size() - i));
    std::swap(pairs[i], pairs[j]);
  }
  const int protected_count = static_cast<int>(
      std::ceil(spec.protected_fraction * spec.tunnel_count - 1e-9));
  instance.tunnels.clear();
  for (int i = 0; i < spec.tunnel_count; ++i) {
    const double demand = spec.lo + (spec.hi - spec.lo) * unit();
    instance.tunnels.push_back(Tunnel{"k" + std::to_string(i), pairs[i].first, pairs[i].second,
                                      demand, i < protected_count});
  }
  return instance;
}

// ---- JSON -------------------------------------------------------------------

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
}

template <typename F>
auto schema(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what(), 0);
  }
}

NodeIndex node_ref(const NetworkInstance& g, const std::string& id) {
  const auto n = g.find_node(id);
  if (!n) throw ParseError("unknown node '" + id + "'", 0);
  return *n;
}

LinkIndex link_ref(const NetworkInstance& g, const std::string& id) {
  const auto l = g.find_link(id);
  if (!l) throw ParseError("unknown link '" + id + "'", 0);
  return *l;
}

json splits_json(const NetworkInstance& instance, const PathSet& paths,
                 const SplitAssignment& splits) {
  json out = json::object();
  for (std::size_t k = 0; k < instance.tunnels.size(); ++k) {
    json per = json::object();
    for (std::size_t p = 0; p < paths.by_tunnel[k].size(); ++p) {
      per[paths.by_tunnel[k][p].id] = splits.ratios[k][p];
    }
    out[instance.tunnels[k].id] = per;
  }
  return out;
}

}  // namespace

std::string write_instance(const NetworkInstance& instance) {
  json j;
  j["nodes"] = instance.nodes;
  j["links"] = json::array();
  for (const Link& l : instance.links) {
    json capacity = std::isfinite(l.capacity) ? json(l.capacity) : json(nullptr);
    j["links"].push_back({{"id", l.id},
                          {"a", instance.nodes[l.a]},
                          {"b", instance.nodes[l.b]},
                          {"capacity", capacity},
                          {"cost", l.unit_cost}});
  }
  j["tunnels"] = json::array();
  for (const Tunnel& t : instance.tunnels) {
    j["tunnels"].push_back({{"id", t.id},
                            {"src", instance.nodes[t.source]},
                            {"dst", instance.nodes[t.destination]},
                            {"demand", t.demand},
                            {"protected", t.is_protected}});
  }
  j["srlgs"] = json::array();
  for (const Srlg& s : instance.srlgs) {
    json ids = json::array();
    for (LinkIndex e : s.links) ids.push_back(instance.links[e].id);
    j["srlgs"].push_back(ids);
  }
  j["epsilon"] = instance.epsilon;
  return j.dump(2);
}

NetworkInstance read_instance(const std::string& text) {
  const json j = parse_json(text);
  return schema("instance", [&] {
    NetworkInstance g;
    for (const auto& n : j.at("nodes")) g.add_node(n.get<std::string>());
    for (const auto& l : j.at("links")) {
      const double capacity =
          l.at("capacity").is_null() ? kInfiniteCapacity : l.at("capacity").get<double>();
      g.add_link(node_ref(g, l.at("a").get<std::string>()),
                 node_ref(g, l.at("b").get<std::string>()), capacity, l.at("cost").get<double>(),
                 l.at("id").get<std::string>());
    }
    for (const auto& t : j.at("tunnels")) {
      g.tunnels.push_back(Tunnel{t.at("id").get<std::string>(),
                                 node_ref(g, t.at("src").get<std::string>()),
                                 node_ref(g, t.at("dst").get<std::string>()),
                                 t.at("demand").get<double>(), t.at("protected").get<bool>()});
    }
    if (j.contains("srlgs")) {
      for (const auto& s : j.at("srlgs")) {
        Srlg srlg{"S" + std::to_string(g.srlgs.size()), {}};
        for (const auto& id : s) srlg.links.push_back(link_ref(g, id.get<std::string>()));
        std::sort(srlg.links.begin(), srlg.links.end());
        g.srlgs.push_back(std::move(srlg));
      }
    }
    g.epsilon = j.value("epsilon", kDefaultEpsilon);
    return g;
  });
}

std::string write_paths(const NetworkInstance& instance, const PathSet& paths) {
  json j = json::array();
  for (std::size_t k = 0; k < instance.tunnels.size(); ++k) {
    json list = json::array();
    for (const Path& p : paths.by_tunnel[k]) {
      json links = json::array();
      for (LinkIndex e : p.links) links.push_back(instance.links[e].id);
      list.push_back({{"id", p.id}, {"links", links}, {"cost", p.routing_cost}});
    }
    j.push_back({{"tunnel", instance.tunnels[k].id}, {"paths", list}});
  }
  return j.dump(2);
}

PathSet read_paths(const NetworkInstance& instance, const std::string& text) {
  const json j = parse_json(text);
  return schema("paths", [&] {
    PathSet ps;
    ps.by_tunnel.resize(instance.tunnels.size());
    std::vector<bool> seen(instance.tunnels.size(), false);
    for (const auto& entry : j) {
      const std::string tid = entry.at("tunnel").get<std::string>();
      TunnelIndex k = -1;
      for (std::size_t i = 0; i < instance.tunnels.size(); ++i) {
        if (instance.tunnels[i].id == tid) k = static_cast<TunnelIndex>(i);
      }
      if (k < 0) throw ParseError("unknown tunnel '" + tid + "'", 0);
      if (seen[k]) throw ParseError("tunnel '" + tid + "' listed twice", 0);
      seen[k] = true;
      for (const auto& p : entry.at("paths")) {
        Path path{p.at("id").get<std::string>(), k, {}, p.value("cost", 0.0)};
        for (const auto& id : p.at("links")) path.links.push_back(link_ref(instance, id));
        ps.by_tunnel[k].push_back(std::move(path));
      }
    }
    return ps;
  });
}

std::string write_splits(const NetworkInstance& instance, const PathSet& paths,
                         const SplitAssignment& splits) {
  return splits_json(instance, paths, splits).dump(2);
}

SplitAssignment read_splits(const NetworkInstance& instance, const PathSet& paths,
                            const std::string& text) {
  const json j = parse_json(text);
  return schema("splits", [&] {
    SplitAssignment s;
    s.ratios.resize(instance.tunnels.size());
    for (std::size_t k = 0; k < instance.tunnels.size(); ++k) {
      s.ratios[k].assign(paths.by_tunnel[k].size(), 0.0);
      const auto it = j.find(instance.tunnels[k].id);
      if (it == j.end()) continue;
      for (const auto& [pid, value] : it->items()) {
        bool found = false;
        for (std::size_t p = 0; p < paths.by_tunnel[k].size(); ++p) {
          if (paths.by_tunnel[k][p].id == pid) {
            s.ratios[k][p] = value.get<double>();
            found = true;
          }
        }
        if (!found) throw ParseError("unknown path '" + pid + "'", 0);
      }
    }
    return s;
  });
}

std::string write_solution(const NetworkInstance& instance, const PathSet& paths,
                           const SolutionRecord& record) {
  json j;
  j["splits"] = record.splits.ratios.empty() ? json::object()
                                              : splits_json(instance, paths, record.splits);
  j["reservations"] = json::object();
  for (std::size_t e = 0; e < record.reservations.size(); ++e) {
    j["reservations"][instance.links[e].id] = record.reservations[e];
  }
  j["objective"] = {{"reservation_cost", record.reservation_cost},
                    {"routing_cost", record.routing_cost}};
  j["stats"] = {{"iterations", record.iterations},
                {"cuts", record.cuts},
                {"wall_ms", record.wall_ms}};
  j["feasible"] = record.feasible;
  return j.dump(2);
}

std::string write_surrogate(const ConvexSurrogate& surrogate) {
  json j;
  j["neurons"] = json::array();
  for (const Neuron& n : surrogate.neurons) {
    j["neurons"].push_back({{"kind", n.activation.name()},
                            {"ax", n.ax},
                            {"ay", n.ay},
                            {"bi", n.bias},
                            {"ai", n.out}});
  }
  j["bias"] = surrogate.bias;
  return j.dump(2);
}

ConvexSurrogate read_surrogate(const std::string& text) {
  const json j = parse_json(text);
  return schema("surrogate", [&] {
    ConvexSurrogate s;
    for (const auto& n : j.at("neurons")) {
      s.neurons.push_back(Neuron{Activation::parse(n.at("kind").get<std::string>()),
                                 n.at("ax").get<double>(), n.at("ay").get<double>(),
                                 n.at("bi").get<double>(), n.at("ai").get<double>()});
    }
    s.bias = j.at("bias").get<double>();
    return s;
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error writing " + path);
}

}  // namespace plb
