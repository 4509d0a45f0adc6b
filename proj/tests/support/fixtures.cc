#include "support/fixtures.h"

#include <random>

namespace plb::testing {

Fixture three_disjoint_paths() {
  Fixture f;
  NetworkInstance& g = f.instance;
  const NodeIndex s = g.add_node("s");
  const NodeIndex t = g.add_node("t");
  f.paths.by_tunnel.resize(1);
  for (int p = 0; p < 3; ++p) {
    const std::string tag(1, static_cast<char>('a' + p));
    const NodeIndex u = g.add_node(tag + "1");
    const NodeIndex v = g.add_node(tag + "2");
    Path path{"p" + std::to_string(p), 0, {}, 0.0};
    path.links.push_back(g.add_link(s, u, kInfiniteCapacity, 1.0));
    path.links.push_back(g.add_link(u, v, kInfiniteCapacity, 1.0));
    path.links.push_back(g.add_link(v, t, kInfiniteCapacity, 1.0));
    f.paths.by_tunnel[0].push_back(path);
  }
  g.tunnels.push_back(Tunnel{"k0", s, t, 100.0, true});
  g.srlgs = enumerate_srlgs(g, 1);
  return f;
}

Fixture parallel_links(int count, double demand) {
  Fixture f;
  NetworkInstance& g = f.instance;
  const NodeIndex s = g.add_node("s");
  const NodeIndex t = g.add_node("t");
  f.paths.by_tunnel.resize(1);
  for (int p = 0; p < count; ++p) {
    // parallel links need distinct node pairs, so each goes through its own hop
    const NodeIndex m = g.add_node("m" + std::to_string(p));
    Path path{"p" + std::to_string(p), 0, {}, 0.0};
    path.links.push_back(g.add_link(s, m, kInfiniteCapacity, 1.0));
    path.links.push_back(g.add_link(m, t, kInfiniteCapacity, 0.0));
    f.paths.by_tunnel[0].push_back(path);
  }
  g.tunnels.push_back(Tunnel{"k0", s, t, demand, true});
  for (int p = 0; p < count; ++p) {
    g.srlgs.push_back(Srlg{"S" + std::to_string(p), {f.paths.by_tunnel[0][p].links[0]}});
  }
  return f;
}

NetworkInstance ring_with_chords(int n, int chords, std::uint64_t seed) {
  NetworkInstance g;
  for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(i));
  for (int i = 0; i < n; ++i) g.add_link(i, (i + 1) % n, kInfiniteCapacity, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  int added = 0;
  while (added < chords) {
    const int a = pick(rng);
    const int b = pick(rng);
    if (a == b || g.link_between(a, b)) continue;
    g.add_link(a, b, kInfiniteCapacity, 1.0);
    ++added;
  }
  return g;
}

std::string data_path(const std::string& name) { return std::string(PLB_TEST_DATA) + "/" + name; }

}  // namespace plb::testing
