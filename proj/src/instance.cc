#include "plb/instance.h"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <utility>

#include "plb/error.h"

namespace plb {

std::optional<NodeIndex> NetworkInstance::find_node(const std::string& id) const {
  auto it = std::find(nodes.begin(), nodes.end(), id);
  if (it == nodes.end()) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes.begin());
}

std::optional<LinkIndex> NetworkInstance::find_link(const std::string& id) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].id == id) return static_cast<LinkIndex>(i);
  }
  return std::nullopt;
}

std::optional<LinkIndex> NetworkInstance::link_between(NodeIndex u, NodeIndex v) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    if ((l.a == u && l.b == v) || (l.a == v && l.b == u)) return static_cast<LinkIndex>(i);
  }
  return std::nullopt;
}

NodeIndex NetworkInstance::add_node(const std::string& id) {
  if (auto existing = find_node(id)) return *existing;
  nodes.push_back(id);
  return static_cast<NodeIndex>(nodes.size() - 1);
}

LinkIndex NetworkInstance::add_link(NodeIndex a, NodeIndex b, double capacity,
                                    double unit_cost, std::string id) {
  if (id.empty()) id = "e" + std::to_string(links.size());
  links.push_back(Link{std::move(id), a, b, capacity, unit_cost});
  return static_cast<LinkIndex>(links.size() - 1);
}

int NetworkInstance::protected_count() const {
  return static_cast<int>(std::count_if(tunnels.begin(), tunnels.end(),
                                        [](const Tunnel& t) { return t.is_protected; }));
}

const std::vector<Path>& PathSet::paths(TunnelIndex k) const {
  if (k < 0 || k >= tunnel_count()) {
    throw LookupError("unknown tunnel index " + std::to_string(k));
  }
  return by_tunnel[k];
}

int PathSet::total_paths() const {
  int total = 0;
  for (const auto& v : by_tunnel) total += static_cast<int>(v.size());
  return total;
}

std::vector<Violation> validate(const NetworkInstance& instance) {
  std::vector<Violation> out;
  auto add = [&out](std::string what) { out.push_back(Violation{std::move(what)}); };
  const int n = static_cast<int>(instance.nodes.size());

  std::set<std::string> node_ids;
  for (const auto& id : instance.nodes) {
    if (!node_ids.insert(id).second) add("duplicate node id " + id);
  }

  if (!(instance.epsilon >= 0.0 && instance.epsilon < 1.0)) {
    add("epsilon outside [0,1)");
  }

  std::set<std::string> link_ids;
  std::set<std::pair<NodeIndex, NodeIndex>> pairs;
  for (const Link& l : instance.links) {
    if (!link_ids.insert(l.id).second) add("duplicate link id " + l.id);
    if (l.a < 0 || l.a >= n || l.b < 0 || l.b >= n) {
      add("link " + l.id + " has an undeclared endpoint");
      continue;
    }
    if (l.a == l.b) add("link " + l.id + " is a self loop");
    if (!pairs.insert(std::minmax(l.a, l.b)).second) {
      add("link " + l.id + " duplicates an existing node pair");
    }
    if (!(l.capacity >= 0.0)) add("link " + l.id + " has negative capacity");
    if (!(l.unit_cost >= 0.0)) add("link " + l.id + " has negative unit cost");
  }

  for (const Tunnel& t : instance.tunnels) {
    if (!(t.demand > 0.0)) add("tunnel " + t.id + ": nonpositive demand");
    if (t.source < 0 || t.source >= n || t.destination < 0 || t.destination >= n) {
      add("tunnel " + t.id + " has an undeclared endpoint");
    } else if (t.source == t.destination) {
      add("tunnel " + t.id + ": source equals destination");
    }
  }

  const int m = static_cast<int>(instance.links.size());
  for (const Srlg& s : instance.srlgs) {
    if (s.links.empty()) add("srlg " + s.id + " is empty");
    for (LinkIndex e : s.links) {
      if (e < 0 || e >= m) {
        add("srlg " + s.id + " references unknown link " + std::to_string(e));
        break;
      }
    }
  }
  return out;
}

std::vector<Violation> validate_paths(const NetworkInstance& instance,
                                      const PathSet& paths) {
  std::vector<Violation> out;
  auto add = [&out](std::string what) { out.push_back(Violation{std::move(what)}); };
  const int m = static_cast<int>(instance.links.size());
  if (paths.tunnel_count() != static_cast<int>(instance.tunnels.size())) {
    add("path set does not cover every tunnel");
    return out;
  }
  for (int k = 0; k < paths.tunnel_count(); ++k) {
    const Tunnel& t = instance.tunnels[k];
    if (paths.by_tunnel[k].size() > static_cast<std::size_t>(kMaxPathsPerTunnel)) {
      add("tunnel " + t.id + " has more than 64 paths");
    }
    for (const Path& p : paths.by_tunnel[k]) {
      if (p.links.empty()) {
        add("path " + p.id + " is empty");
        continue;
      }
      NodeIndex at = t.source;
      std::set<LinkIndex> seen;
      std::set<NodeIndex> visited{at};
      bool ok = true;
      for (LinkIndex e : p.links) {
        if (e < 0 || e >= m) {
          add("path " + p.id + " references unknown link");
          ok = false;
          break;
        }
        const Link& l = instance.links[e];
        if (!l.touches(at)) {
          add("path " + p.id + " is not connected");
          ok = false;
          break;
        }
        if (!seen.insert(e).second) {
          add("path " + p.id + " repeats a link");
          ok = false;
          break;
        }
        at = l.other(at);
        if (!visited.insert(at).second) {
          add("path " + p.id + " revisits a node");
          ok = false;
          break;
        }
      }
      if (ok && at != t.destination) add("path " + p.id + " does not end at the destination");
      if (!(p.routing_cost >= 0.0)) add("path " + p.id + " has negative routing cost");
    }
  }
  return out;
}

std::vector<Srlg> enumerate_srlgs(const NetworkInstance& instance, int q) {
  const int m = static_cast<int>(instance.links.size());
  if (q <= 0 || q > m) {
    throw InvalidParameter("q must be in [1, |E|], got " + std::to_string(q));
  }
  std::vector<Srlg> out;
  std::vector<LinkIndex> comb(q);
  for (int i = 0; i < q; ++i) comb[i] = i;
  while (true) {
    out.push_back(Srlg{"S" + std::to_string(out.size()), comb});
    int i = q - 1;
    while (i >= 0 && comb[i] == m - q + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < q; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

namespace {

void check_tunnel(const PathSet& paths, TunnelIndex k) {
  if (k < 0 || k >= paths.tunnel_count()) {
    throw LookupError("unknown tunnel index " + std::to_string(k));
  }
}

}  // namespace

std::vector<PathIndex> paths_intersecting(const NetworkInstance& instance,
                                          const PathSet& paths, TunnelIndex k,
                                          SrlgIndex s) {
  check_tunnel(paths, k);
  if (s < 0 || s >= static_cast<int>(instance.srlgs.size())) {
    throw LookupError("unknown srlg index " + std::to_string(s));
  }
  const auto& members = instance.srlgs[s].links;
  std::vector<PathIndex> out;
  const auto& tunnel_paths = paths.by_tunnel[k];
  for (std::size_t p = 0; p < tunnel_paths.size(); ++p) {
    for (LinkIndex e : tunnel_paths[p].links) {
      if (std::find(members.begin(), members.end(), e) != members.end()) {
        out.push_back(static_cast<PathIndex>(p));
        break;
      }
    }
  }
  return out;
}

std::vector<PathIndex> paths_through_edge(const NetworkInstance& instance,
                                          const PathSet& paths, TunnelIndex k,
                                          LinkIndex e) {
  check_tunnel(paths, k);
  if (e < 0 || e >= static_cast<int>(instance.links.size())) {
    throw LookupError("unknown link index " + std::to_string(e));
  }
  std::vector<PathIndex> out;
  const auto& tunnel_paths = paths.by_tunnel[k];
  for (std::size_t p = 0; p < tunnel_paths.size(); ++p) {
    const auto& ls = tunnel_paths[p].links;
    if (std::find(ls.begin(), ls.end(), e) != ls.end()) out.push_back(static_cast<PathIndex>(p));
  }
  return out;
}

Incidence::Incidence(const NetworkInstance& instance, const PathSet& paths)
    : links_(static_cast<int>(instance.links.size())),
      srlgs_(static_cast<int>(instance.srlgs.size())),
      tunnels_(paths.tunnel_count()),
      edge_(static_cast<std::size_t>(tunnels_) * links_, 0),
      srlg_(static_cast<std::size_t>(tunnels_) * srlgs_, 0),
      on_link_(links_) {
  // link -> srlgs containing it
  std::vector<std::vector<SrlgIndex>> srlgs_of_link(links_);
  srlg_links_.resize(srlgs_);
  for (int s = 0; s < srlgs_; ++s) {
    srlg_links_[s] = instance.srlgs[s].links;
    std::sort(srlg_links_[s].begin(), srlg_links_[s].end());
    for (LinkIndex e : instance.srlgs[s].links) srlgs_of_link[e].push_back(s);
  }
  for (int k = 0; k < tunnels_; ++k) {
    const auto& tunnel_paths = paths.by_tunnel[k];
    if (tunnel_paths.size() > static_cast<std::size_t>(kMaxPathsPerTunnel)) {
      throw InvalidParameter("tunnel " + std::to_string(k) + " has more than 64 paths");
    }
    for (std::size_t p = 0; p < tunnel_paths.size(); ++p) {
      const PathMask bit = PathMask{1} << p;
      for (LinkIndex e : tunnel_paths[p].links) {
        edge_[static_cast<std::size_t>(k) * links_ + e] |= bit;
        for (SrlgIndex s : srlgs_of_link[e]) srlg_[static_cast<std::size_t>(k) * srlgs_ + s] |= bit;
      }
    }
    for (int e = 0; e < links_; ++e) {
      if (edge_[static_cast<std::size_t>(k) * links_ + e] != 0) on_link_[e].push_back(k);
    }
  }
}

bool Incidence::srlg_contains(SrlgIndex s, LinkIndex e) const {
  return std::binary_search(srlg_links_[s].begin(), srlg_links_[s].end(), e);
}

double mask_sum(PathMask mask, const std::vector<double>& ratios) {
  double sum = 0.0;
  while (mask != 0) {
    const int p = std::countr_zero(mask);
    sum += ratios[p];
    mask &= mask - 1;
  }
  return sum;
}

}  // namespace plb
