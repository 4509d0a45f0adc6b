#ifndef PLB_INSTANCE_H
#define PLB_INSTANCE_H

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace plb {

// Indices into the vectors of a NetworkInstance / PathSet.
using NodeIndex = int;
using LinkIndex = int;
using TunnelIndex = int;
using SrlgIndex = int;
using PathIndex = int;

// Paths of one tunnel as a bit set; a tunnel holds at most 64 paths.
using PathMask = std::uint64_t;
inline constexpr int kMaxPathsPerTunnel = 64;

inline constexpr double kInfiniteCapacity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultEpsilon = 0.01;

// Undirected physical link.
struct Link {
  std::string id;
  NodeIndex a = 0;
  NodeIndex b = 0;
  double capacity = kInfiniteCapacity;
  double unit_cost = 1.0;

  bool touches(NodeIndex n) const { return a == n || b == n; }
  NodeIndex other(NodeIndex n) const { return n == a ? b : a; }
};

struct Tunnel {
  std::string id;
  NodeIndex source = 0;
  NodeIndex destination = 0;
  double demand = 0.0;
  bool is_protected = false;
};

// A set of links that fail together.
struct Srlg {
  std::string id;
  std::vector<LinkIndex> links;  // sorted, unique
};

struct NetworkInstance {
  std::vector<std::string> nodes;
  std::vector<Link> links;
  std::vector<Tunnel> tunnels;
  std::vector<Srlg> srlgs;
  double epsilon = kDefaultEpsilon;

  std::optional<NodeIndex> find_node(const std::string& id) const;
  std::optional<LinkIndex> find_link(const std::string& id) const;
  // Link between two nodes, if any.
  std::optional<LinkIndex> link_between(NodeIndex u, NodeIndex v) const;
  NodeIndex add_node(const std::string& id);
  LinkIndex add_link(NodeIndex a, NodeIndex b, double capacity, double unit_cost,
                     std::string id = {});

  int protected_count() const;
};

struct Path {
  std::string id;
  TunnelIndex tunnel = 0;
  std::vector<LinkIndex> links;  // in traversal order
  double routing_cost = 0.0;

  int hops() const { return static_cast<int>(links.size()); }
};

// Candidate paths of every tunnel, indexed by tunnel.
struct PathSet {
  std::vector<std::vector<Path>> by_tunnel;

  int tunnel_count() const { return static_cast<int>(by_tunnel.size()); }
  const std::vector<Path>& paths(TunnelIndex k) const;
  int total_paths() const;
};

struct Violation {
  std::string what;
};

std::vector<Violation> validate(const NetworkInstance& instance);

// Structural checks of paths against the instance: connectivity, endpoints,
// loop-freeness and the per-tunnel path limit.
std::vector<Violation> validate_paths(const NetworkInstance& instance,
                                      const PathSet& paths);

// All C(|E|, q) link subsets of size q, in lexicographic order of link index.
std::vector<Srlg> enumerate_srlgs(const NetworkInstance& instance, int q);

// P^k_S: indices of the paths of tunnel k that contain a link of SRLG s.
std::vector<PathIndex> paths_intersecting(const NetworkInstance& instance,
                                          const PathSet& paths, TunnelIndex k,
                                          SrlgIndex s);
// P^k_e: indices of the paths of tunnel k that traverse link e.
std::vector<PathIndex> paths_through_edge(const NetworkInstance& instance,
                                          const PathSet& paths, TunnelIndex k,
                                          LinkIndex e);

// Precomputed path masks used by the evaluator and the solver.
class Incidence {
 public:
  Incidence(const NetworkInstance& instance, const PathSet& paths);

  PathMask edge_mask(TunnelIndex k, LinkIndex e) const {
    return edge_[static_cast<std::size_t>(k) * links_ + e];
  }
  PathMask srlg_mask(TunnelIndex k, SrlgIndex s) const {
    return srlg_[static_cast<std::size_t>(k) * srlgs_ + s];
  }
  // Tunnels having at least one path through e.
  const std::vector<TunnelIndex>& tunnels_on(LinkIndex e) const { return on_link_[e]; }
  bool srlg_contains(SrlgIndex s, LinkIndex e) const;

  int link_count() const { return links_; }
  int srlg_count() const { return srlgs_; }
  int tunnel_count() const { return tunnels_; }

 private:
  int links_;
  int srlgs_;
  int tunnels_;
  std::vector<PathMask> edge_;
  std::vector<PathMask> srlg_;
  std::vector<std::vector<TunnelIndex>> on_link_;
  std::vector<std::vector<LinkIndex>> srlg_links_;
};

// Sum of ratios[p] over the bits of mask.
double mask_sum(PathMask mask, const std::vector<double>& ratios);

}  // namespace plb

#endif  // PLB_INSTANCE_H
