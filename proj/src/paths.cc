#include "plb/paths.h"

#include <algorithm>
#include <exception>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

#include "plb/error.h"

namespace plb {

namespace {

struct Adjacency {
  // per node, (link, neighbor) sorted by link index
  std::vector<std::vector<std::pair<LinkIndex, NodeIndex>>> out;

  explicit Adjacency(const NetworkInstance& g) : out(g.nodes.size()) {
    for (std::size_t e = 0; e < g.links.size(); ++e) {
      const Link& l = g.links[e];
      out[l.a].emplace_back(static_cast<LinkIndex>(e), l.b);
      out[l.b].emplace_back(static_cast<LinkIndex>(e), l.a);
    }
  }
};

constexpr int kUnreached = std::numeric_limits<int>::max();

// Fewest-hop path from `from` to `to` avoiding blocked nodes and links; among
// those, the one with the smallest link sequence.
bool lex_shortest(const Adjacency& adj, NodeIndex from, NodeIndex to,
                  const std::vector<char>& blocked_node, const std::vector<char>& blocked_link,
                  std::vector<LinkIndex>& out) {
  std::vector<int> dist(adj.out.size(), kUnreached);
  std::queue<NodeIndex> q;
  dist[to] = 0;
  q.push(to);
  while (!q.empty()) {
    const NodeIndex u = q.front();
    q.pop();
    if (u == from) break;
    for (const auto& [e, v] : adj.out[u]) {
      if (blocked_link[e] || blocked_node[v] || dist[v] != kUnreached) continue;
      dist[v] = dist[u] + 1;
      q.push(v);
    }
  }
  if (dist[from] == kUnreached) return false;
  out.clear();
  NodeIndex u = from;
  while (u != to) {
    for (const auto& [e, v] : adj.out[u]) {
      if (blocked_link[e] || blocked_node[v] || dist[v] != dist[u] - 1) continue;
      out.push_back(e);
      u = v;
      break;
    }
  }
  return true;
}

std::vector<NodeIndex> node_sequence(const NetworkInstance& g, NodeIndex s,
                                     const std::vector<LinkIndex>& links) {
  std::vector<NodeIndex> nodes{s};
  for (LinkIndex e : links) nodes.push_back(g.links[e].other(nodes.back()));
  return nodes;
}

struct ByHopsThenLinks {
  bool operator()(const std::vector<LinkIndex>& a, const std::vector<LinkIndex>& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

}  // namespace

std::vector<Path> yen_ksp(const NetworkInstance& instance, NodeIndex source,
                          NodeIndex destination, int k) {
  if (source == destination) throw InvalidParameter("source equals destination");
  if (k < 1) throw InvalidParameter("k must be at least 1");
  const Adjacency adj(instance);
  std::vector<char> blocked_node(instance.nodes.size(), 0);
  std::vector<char> blocked_link(instance.links.size(), 0);

  std::vector<std::vector<LinkIndex>> found;
  std::vector<LinkIndex> first;
  if (!lex_shortest(adj, source, destination, blocked_node, blocked_link, first)) return {};
  found.push_back(first);
  std::set<std::vector<LinkIndex>, ByHopsThenLinks> candidates;
  std::set<std::vector<LinkIndex>> seen{first};

  std::vector<LinkIndex> spur;
  while (static_cast<int>(found.size()) < k) {
    const std::vector<LinkIndex> prev = found.back();
    const auto nodes = node_sequence(instance, source, prev);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      std::fill(blocked_node.begin(), blocked_node.end(), 0);
      std::fill(blocked_link.begin(), blocked_link.end(), 0);
      for (std::size_t r = 0; r < i; ++r) blocked_node[nodes[r]] = 1;
      for (const auto& p : found) {
        if (p.size() > i && std::equal(prev.begin(), prev.begin() + i, p.begin())) {
          blocked_link[p[i]] = 1;
        }
      }
      if (!lex_shortest(adj, nodes[i], destination, blocked_node, blocked_link, spur)) continue;
      std::vector<LinkIndex> total(prev.begin(), prev.begin() + i);
      total.insert(total.end(), spur.begin(), spur.end());
      if (seen.insert(total).second) candidates.insert(std::move(total));
    }
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }

  std::vector<Path> out;
  out.reserve(found.size());
  for (auto& links : found) {
    Path p;
    p.routing_cost = static_cast<double>(links.size());
    p.links = std::move(links);
    out.push_back(std::move(p));
  }
  return out;
}

int sharing_objective(const std::vector<const Path*>& chosen, const std::vector<Srlg>& srlgs) {
  int worst = 0;
  for (const Srlg& s : srlgs) {
    int hits = 0;
    for (const Path* p : chosen) {
      const bool hit = std::any_of(p->links.begin(), p->links.end(), [&](LinkIndex e) {
        return std::binary_search(s.links.begin(), s.links.end(), e);
      });
      hits += hit ? 1 : 0;
    }
    worst = std::max(worst, hits);
  }
  return worst;
}

namespace {

// SRLGs reduced to their distinct hit patterns over the candidates.
class SharingCounter {
 public:
  SharingCounter(const std::vector<Path>& candidates, const std::vector<Srlg>& srlgs)
      : by_candidate_(candidates.size()) {
    const std::size_t m = candidates.size();
    LinkIndex max_link = -1;
    for (const Path& p : candidates) {
      for (LinkIndex e : p.links) max_link = std::max(max_link, e);
    }
    std::vector<std::vector<int>> on_link(max_link + 1);
    for (std::size_t c = 0; c < m; ++c) {
      for (LinkIndex e : candidates[c].links) {
        if (on_link[e].empty() || on_link[e].back() != static_cast<int>(c)) {
          on_link[e].push_back(static_cast<int>(c));
        }
      }
    }
    std::set<std::vector<int>> patterns;
    std::vector<char> mark(m);
    for (const Srlg& s : srlgs) {
      std::fill(mark.begin(), mark.end(), 0);
      for (LinkIndex e : s.links) {
        if (e > max_link) continue;
        for (int c : on_link[e]) mark[c] = 1;
      }
      std::vector<int> pattern;
      for (std::size_t c = 0; c < m; ++c) {
        if (mark[c]) pattern.push_back(static_cast<int>(c));
      }
      if (!pattern.empty()) patterns.insert(std::move(pattern));
    }
    int id = 0;
    for (const auto& pattern : patterns) {
      for (int c : pattern) by_candidate_[c].push_back(id);
      ++id;
    }
    counts_.assign(patterns.size(), 0);
  }

  void add(int c) {
    for (int p : by_candidate_[c]) ++counts_[p];
  }
  void remove(int c) {
    for (int p : by_candidate_[c]) --counts_[p];
  }
  int max() const {
    int m = 0;
    for (int v : counts_) m = std::max(m, v);
    return m;
  }
  // max() after add(c), given current max
  int max_if_added(int c, int current) const {
    int m = current;
    for (int p : by_candidate_[c]) m = std::max(m, counts_[p] + 1);
    return m;
  }
  void reset() { std::fill(counts_.begin(), counts_.end(), 0); }

 private:
  std::vector<std::vector<int>> by_candidate_;
  std::vector<int> counts_;
};

using Key = std::tuple<int, int, std::vector<int>>;

Key key_of(const Selection& s) { return {s.objective, s.total_hops, s.indices}; }

Selection evaluate(SharingCounter& counter, const std::vector<Path>& candidates,
                   std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  counter.reset();
  Selection s;
  for (int c : indices) {
    counter.add(c);
    s.total_hops += candidates[c].hops();
  }
  s.objective = counter.max();
  s.indices = std::move(indices);
  counter.reset();
  return s;
}

long long binomial_capped(long long m, long long n, long long cap) {
  long long r = 1;
  for (long long i = 1; i <= n; ++i) {
    r = r * (m - n + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

Selection exhaustive(SharingCounter& counter, const std::vector<Path>& candidates, int n) {
  const int m = static_cast<int>(candidates.size());
  Selection best;
  bool have = false;
  std::vector<int> pick;
  std::vector<int> running_max{0};
  int hops = 0;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(pick.size()) == n) {
      Selection s{pick, running_max.back(), hops};
      if (!have || key_of(s) < key_of(best)) {
        best = s;
        have = true;
      }
      return;
    }
    const int need = n - static_cast<int>(pick.size());
    for (int c = start; c <= m - need; ++c) {
      const int next = counter.max_if_added(c, running_max.back());
      counter.add(c);
      pick.push_back(c);
      running_max.push_back(next);
      hops += candidates[c].hops();
      self(self, c + 1);
      hops -= candidates[c].hops();
      running_max.pop_back();
      pick.pop_back();
      counter.remove(c);
    }
  };
  rec(rec, 0);
  return best;
}

Selection greedy_with_swaps(SharingCounter& counter, const std::vector<Path>& candidates,
                            int n) {
  const int m = static_cast<int>(candidates.size());
  std::vector<char> in(m, 0);
  std::vector<int> chosen;
  int current = 0;
  counter.reset();
  for (int step = 0; step < n; ++step) {
    int best = -1;
    std::pair<int, int> best_key{0, 0};
    for (int c = 0; c < m; ++c) {
      if (in[c]) continue;
      const std::pair<int, int> k{counter.max_if_added(c, current), candidates[c].hops()};
      if (best < 0 || k < best_key) {
        best = c;
        best_key = k;
      }
    }
    in[best] = 1;
    chosen.push_back(best);
    counter.add(best);
    current = best_key.first;
  }
  counter.reset();

  Selection sel = evaluate(counter, candidates, chosen);
  bool improved = true;
  while (improved) {
    improved = false;
    Selection best = sel;
    for (std::size_t i = 0; i < sel.indices.size(); ++i) {
      for (int c = 0; c < m; ++c) {
        if (std::binary_search(sel.indices.begin(), sel.indices.end(), c)) continue;
        std::vector<int> trial = sel.indices;
        trial[i] = c;
        Selection t = evaluate(counter, candidates, std::move(trial));
        if (key_of(t) < key_of(best)) best = std::move(t);
      }
    }
    if (key_of(best) < key_of(sel)) {
      sel = std::move(best);
      improved = true;
    }
  }
  return sel;
}

}  // namespace

Selection select_disjoint(const std::vector<Path>& candidates, const std::vector<Srlg>& srlgs,
                          int n, const std::string& tunnel, long long exhaustive_limit) {
  if (n < 1) throw InvalidParameter("path count must be at least 1");
  const int m = static_cast<int>(candidates.size());
  if (m < n) {
    throw InsufficientPaths("tunnel " + tunnel + " has " + std::to_string(m) +
                            " candidate paths, " + std::to_string(n) + " needed");
  }
  SharingCounter counter(candidates, srlgs);
  if (binomial_capped(m, n, exhaustive_limit) <= exhaustive_limit) {
    return exhaustive(counter, candidates, n);
  }
  std::vector<int> first(n);
  for (int i = 0; i < n; ++i) first[i] = i;
  Selection trivial = evaluate(counter, candidates, first);
  Selection searched = greedy_with_swaps(counter, candidates, n);
  return key_of(searched) < key_of(trivial) ? searched : trivial;
}

PathSet build_pathsets(const NetworkInstance& instance, const PathGenConfig& config) {
  if (config.paths_per_tunnel < 1 || config.paths_per_tunnel > kMaxPathsPerTunnel) {
    throw InvalidParameter("paths per tunnel must lie in [1, 64]");
  }
  if (config.expansion < 1) throw InvalidParameter("expansion must be at least 1");
  const int count = static_cast<int>(instance.tunnels.size());
  PathSet out;
  out.by_tunnel.resize(count);
  std::vector<std::exception_ptr> errors(count);

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    try {
      const Tunnel& t = instance.tunnels[k];
      auto candidates = yen_ksp(instance, t.source, t.destination,
                                config.expansion * config.paths_per_tunnel);
      int n = config.paths_per_tunnel;
      if (config.allow_fewer_paths) n = std::min<int>(n, static_cast<int>(candidates.size()));
      if (n == 0) {
        throw InsufficientPaths("tunnel " + t.id + " has no path");
      }
      const Selection sel = select_disjoint(candidates, instance.srlgs, n, t.id);
      for (std::size_t j = 0; j < sel.indices.size(); ++j) {
        Path p = candidates[sel.indices[j]];
        p.id = t.id + "/p" + std::to_string(j);
        p.tunnel = k;
        if (config.metric == PathMetric::kLinkCost) {
          p.routing_cost = 0.0;
          for (LinkIndex e : p.links) p.routing_cost += instance.links[e].unit_cost;
        }
        out.by_tunnel[k].push_back(std::move(p));
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace plb
