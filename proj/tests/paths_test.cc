#include "plb/paths.h"

#include <gtest/gtest.h>

#include <random>

#include "plb/error.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace plb {
namespace {

NetworkInstance diamond() {
  // s-a-t and s-b-t
  NetworkInstance g;
  for (const char* n : {"s", "a", "b", "t"}) g.add_node(n);
  g.add_link(0, 1, kInfiniteCapacity, 1);
  g.add_link(1, 3, kInfiniteCapacity, 1);
  g.add_link(0, 2, kInfiniteCapacity, 1);
  g.add_link(2, 3, kInfiniteCapacity, 1);
  return g;
}

NetworkInstance complete(int n) {
  NetworkInstance g;
  for (int i = 0; i < n; ++i) g.add_node("v" + std::to_string(i));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) g.add_link(i, j, kInfiniteCapacity, 1);
  }
  return g;
}

std::vector<std::vector<LinkIndex>> link_lists(const std::vector<Path>& paths) {
  std::vector<std::vector<LinkIndex>> out;
  for (const Path& p : paths) out.push_back(p.links);
  return out;
}

TEST(YenKsp, DiamondHasTwoPaths) {
  const NetworkInstance g = diamond();
  EXPECT_EQ(yen_ksp(g, 0, 3, 2).size(), 2u);
  const auto all = yen_ksp(g, 0, 3, 5);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].hops(), 2);
  EXPECT_EQ(all[1].hops(), 2);
  EXPECT_EQ(all[0].links, (std::vector<LinkIndex>{0, 1}));
}

TEST(YenKsp, CompleteGraphHopCounts) {
  const auto paths = yen_ksp(complete(4), 0, 3, 5);
  ASSERT_EQ(paths.size(), 5u);
  std::vector<int> hops;
  for (const Path& p : paths) hops.push_back(p.hops());
  EXPECT_EQ(hops, (std::vector<int>{1, 2, 2, 3, 3}));
}

TEST(YenKsp, DisconnectedPairGivesNothing) {
  NetworkInstance g = diamond();
  g.add_node("island");
  EXPECT_TRUE(yen_ksp(g, 0, 4, 3).empty());
  EXPECT_THROW(yen_ksp(g, 0, 0, 3), InvalidParameter);
}

TEST(YenKsp, MatchesBruteForceEnumeration) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const NetworkInstance g = testing::ring_with_chords(7, 5, seed);
    std::mt19937_64 rng(seed);
    const int s = static_cast<int>(rng() % 7);
    const int t = (s + 1 + static_cast<int>(rng() % 6)) % 7;
    const auto all = testing::all_simple_paths(g, s, t);
    for (int k : {1, 4, 15, 1000}) {
      const auto got = link_lists(yen_ksp(g, s, t, k));
      const std::size_t expect = std::min<std::size_t>(k, all.size());
      ASSERT_EQ(got.size(), expect) << "seed " << seed << " k " << k;
      for (std::size_t i = 0; i < expect; ++i) {
        EXPECT_EQ(got[i], all[i]) << "seed " << seed << " k " << k << " rank " << i;
      }
    }
  }
}

TEST(YenKsp, PathsAreValid) {
  NetworkInstance g = testing::ring_with_chords(12, 8, 3);
  g.tunnels.push_back(Tunnel{"k", 0, 6, 1.0, true});
  PathSet ps;
  ps.by_tunnel.push_back(yen_ksp(g, 0, 6, 40));
  for (std::size_t i = 0; i < ps.by_tunnel[0].size(); ++i) {
    ps.by_tunnel[0][i].id = "p" + std::to_string(i);
  }
  EXPECT_TRUE(validate_paths(g, ps).empty());
}

std::vector<Path> as_paths(const std::vector<std::vector<LinkIndex>>& lists) {
  std::vector<Path> out;
  for (const auto& l : lists) out.push_back(Path{"", 0, l, static_cast<double>(l.size())});
  return out;
}

std::vector<Srlg> singletons(int links) {
  std::vector<Srlg> out;
  for (int e = 0; e < links; ++e) out.push_back(Srlg{"S" + std::to_string(e), {e}});
  return out;
}

TEST(SelectDisjoint, DisjointCandidates) {
  const auto c = as_paths({{0, 1}, {2, 3}, {4, 5}});
  const Selection s = select_disjoint(c, singletons(6), 3);
  EXPECT_EQ(s.indices, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(s.objective, 1);
}

TEST(SelectDisjoint, AvoidsTheSharedPair) {
  // candidates 0 and 1 share link 1
  const auto c = as_paths({{0, 1}, {1, 2}, {3, 4}, {5, 6, 7}});
  const Selection s = select_disjoint(c, singletons(8), 2);
  EXPECT_EQ(s.objective, 1);
  EXPECT_EQ(s.indices, (std::vector<int>{0, 2}));
}

TEST(SelectDisjoint, ForcedSharing) {
  const auto c = as_paths({{0, 1}, {0, 2}, {0, 3}});
  const Selection s = select_disjoint(c, singletons(4), 2);
  EXPECT_EQ(s.objective, 2);
  EXPECT_EQ(s.indices.size(), 2u);
}

TEST(SelectDisjoint, TooFewCandidatesNamesTunnel) {
  const auto c = as_paths({{0}});
  try {
    select_disjoint(c, singletons(1), 2, "k7");
    FAIL();
  } catch (const InsufficientPaths& e) {
    EXPECT_NE(std::string(e.what()).find("k7"), std::string::npos);
  }
}

int brute_best_objective(const std::vector<Path>& c, const std::vector<Srlg>& srlgs, int n) {
  int best = 1 << 20;
  const int m = static_cast<int>(c.size());
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != n) continue;
    std::vector<const Path*> chosen;
    for (int i = 0; i < m; ++i) {
      if (mask >> i & 1u) chosen.push_back(&c[i]);
    }
    best = std::min(best, sharing_objective(chosen, srlgs));
  }
  return best;
}

TEST(SelectDisjoint, ExhaustiveMatchesSubsetOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    NetworkInstance g = testing::ring_with_chords(8, 6, seed);
    const auto c = yen_ksp(g, 0, 4, 10);
    const int n = 2 + static_cast<int>(seed % 3);
    if (static_cast<int>(c.size()) < n) continue;
    for (int q : {1, 2}) {
      const auto srlgs = enumerate_srlgs(g, q);
      const Selection s = select_disjoint(c, srlgs, n);
      EXPECT_EQ(s.objective, brute_best_objective(c, srlgs, n)) << "seed " << seed;
      std::vector<const Path*> chosen;
      for (int i : s.indices) chosen.push_back(&c[i]);
      EXPECT_EQ(s.objective, sharing_objective(chosen, srlgs));
    }
  }
}

TEST(SelectDisjoint, HeuristicNeverWorseThanFirstN) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    NetworkInstance g = testing::ring_with_chords(16, 14, seed);
    const auto c = yen_ksp(g, 0, 8, 90);
    const auto srlgs = enumerate_srlgs(g, 1);
    const int n = 3;
    // a limit of 0 forces the greedy + swap search
    const Selection s = select_disjoint(c, srlgs, n, "k", 0);
    std::vector<const Path*> first{&c[0], &c[1], &c[2]};
    EXPECT_LE(s.objective, sharing_objective(first, srlgs));
    std::vector<const Path*> chosen;
    for (int i : s.indices) chosen.push_back(&c[i]);
    EXPECT_EQ(s.objective, sharing_objective(chosen, srlgs));
    // with 10 candidates the exhaustive answer is the reference
    std::vector<Path> few(c.begin(), c.begin() + 10);
    EXPECT_EQ(select_disjoint(few, srlgs, n, "k", 0).objective,
              brute_best_objective(few, srlgs, n));
  }
}

TEST(BuildPathsets, TriangleGivesTwoDisjointPaths) {
  NetworkInstance g = complete(3);
  g.tunnels.push_back(Tunnel{"k0", 0, 1, 5.0, true});
  g.srlgs = enumerate_srlgs(g, 1);
  PathGenConfig cfg;
  cfg.paths_per_tunnel = 2;
  const PathSet ps = build_pathsets(g, cfg);
  ASSERT_EQ(ps.paths(0).size(), 2u);
  EXPECT_EQ(ps.paths(0)[0].links, (std::vector<LinkIndex>{0}));
  EXPECT_EQ(ps.paths(0)[1].hops(), 2);
  EXPECT_EQ(ps.paths(0)[0].id, "k0/p0");
  EXPECT_TRUE(validate_paths(g, ps).empty());
}

TEST(BuildPathsets, BridgeStillReturnsPaths) {
  // s - a is a bridge; a reaches t two ways
  NetworkInstance g;
  for (const char* n : {"s", "a", "b", "c", "t"}) g.add_node(n);
  g.add_link(0, 1, kInfiniteCapacity, 1);
  g.add_link(1, 2, kInfiniteCapacity, 1);
  g.add_link(2, 4, kInfiniteCapacity, 1);
  g.add_link(1, 3, kInfiniteCapacity, 1);
  g.add_link(3, 4, kInfiniteCapacity, 1);
  g.tunnels.push_back(Tunnel{"k0", 0, 4, 5.0, true});
  g.srlgs = enumerate_srlgs(g, 1);
  PathGenConfig cfg;
  cfg.paths_per_tunnel = 2;
  const PathSet ps = build_pathsets(g, cfg);
  EXPECT_EQ(ps.paths(0).size(), 2u);
  std::vector<const Path*> chosen{&ps.paths(0)[0], &ps.paths(0)[1]};
  EXPECT_EQ(sharing_objective(chosen, g.srlgs), 2);
}

TEST(BuildPathsets, ParallelTopologyGivesThreeDisjointPaths) {
  auto f = testing::three_disjoint_paths();
  PathGenConfig cfg;
  cfg.paths_per_tunnel = 3;
  const PathSet ps = build_pathsets(f.instance, cfg);
  ASSERT_EQ(ps.paths(0).size(), 3u);
  std::vector<const Path*> chosen;
  for (const Path& p : ps.paths(0)) chosen.push_back(&p);
  EXPECT_EQ(sharing_objective(chosen, f.instance.srlgs), 1);
}

TEST(BuildPathsets, InsufficientPathsPropagates) {
  NetworkInstance g = diamond();
  g.tunnels.push_back(Tunnel{"k9", 0, 3, 1.0, true});
  g.srlgs = enumerate_srlgs(g, 1);
  PathGenConfig cfg;
  cfg.paths_per_tunnel = 3;
  EXPECT_THROW(build_pathsets(g, cfg), InsufficientPaths);
  cfg.allow_fewer_paths = true;
  EXPECT_EQ(build_pathsets(g, cfg).paths(0).size(), 2u);
}

TEST(BuildPathsets, LinkCostMetric) {
  NetworkInstance g = diamond();
  g.links[0].unit_cost = 4.0;
  g.tunnels.push_back(Tunnel{"k0", 0, 3, 1.0, true});
  PathGenConfig cfg;
  cfg.paths_per_tunnel = 2;
  cfg.metric = PathMetric::kLinkCost;
  const PathSet ps = build_pathsets(g, cfg);
  EXPECT_DOUBLE_EQ(ps.paths(0)[0].routing_cost, 5.0);
  EXPECT_DOUBLE_EQ(ps.paths(0)[1].routing_cost, 2.0);
}

}  // namespace
}  // namespace plb
