#include <gtest/gtest.h>

#include <random>

#include "plb/error.h"
#include "plb/evaluator.h"
#include "plb/paths.h"
#include "plb/reference.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace plb {
namespace {

const SplitAssignment kFigure{{{0.2, 0.4, 0.4}}};
const SplitAssignment kEqual{{{1.0 / 3, 1.0 / 3, 1.0 / 3}}};

TEST(TransferRatios, FirstPathFails) {
  const auto r = transfer_ratios({0.2, 0.4, 0.4}, 0b001);
  EXPECT_EQ(r, (std::vector<double>{0.0, 0.5, 0.5}));
}

TEST(TransferRatios, UntouchedAndHalves) {
  EXPECT_EQ(transfer_ratios({0.2, 0.4, 0.4}, 0), (std::vector<double>{0.2, 0.4, 0.4}));
  EXPECT_EQ(transfer_ratios({0.5, 0.5}, 0b10), (std::vector<double>{1.0, 0.0}));
  EXPECT_THROW(transfer_ratios({0.5, 0.5}, 0b11), TotalFailure);
  EXPECT_THROW(transfer_ratios({1.0, 0.0}, 0b01), TotalFailure);
}

TEST(CheckSplits, RejectsBadRatios) {
  const testing::Fixture f = testing::three_disjoint_paths();
  EXPECT_NO_THROW(check_splits(f.paths, kFigure));
  EXPECT_THROW(check_splits(f.paths, SplitAssignment{{{0.5, 0.4, 0.4}}}), InvalidParameter);
  EXPECT_THROW(check_splits(f.paths, SplitAssignment{{{1.2, -0.2, 0.0}}}), InvalidParameter);
  EXPECT_THROW(check_splits(f.paths, SplitAssignment{{{0.5, 0.5}}}), InvalidParameter);
}

class Figure : public ::testing::Test {
 protected:
  testing::Fixture f = testing::three_disjoint_paths();
  Incidence inc{f.instance, f.paths};
  const Path& path(int p) const { return f.paths.by_tunnel[0][p]; }
  SrlgIndex srlg_of(LinkIndex e) const {
    for (SrlgIndex s = 0; s < static_cast<int>(f.instance.srlgs.size()); ++s) {
      if (f.instance.srlgs[s].links == std::vector<LinkIndex>{e}) return s;
    }
    return -1;
  }
};

TEST_F(Figure, ReroutedLoad) {
  const LinkIndex on_p2 = path(1).links[0];
  EXPECT_NEAR(rerouted_load(f.instance, inc, kFigure, on_p2, srlg_of(path(2).links[1])),
              100.0 * 0.4 / 0.6, 1e-12);
  // failure on the same path removes the traffic
  EXPECT_DOUBLE_EQ(rerouted_load(f.instance, inc, kFigure, on_p2, srlg_of(on_p2)), 0.0);
}

TEST_F(Figure, ReroutedLoadOffPathAndDisjointSrlg) {
  NetworkInstance& g = f.instance;
  const LinkIndex spare = g.add_link(0, g.add_node("x"), kInfiniteCapacity, 1.0);
  const LinkIndex other = g.add_link(1, g.add_node("y"), kInfiniteCapacity, 1.0);
  g.srlgs = enumerate_srlgs(g, 1);
  const Incidence wider(g, f.paths);
  EXPECT_DOUBLE_EQ(rerouted_load(g, wider, kFigure, spare, 0), 0.0);
  EXPECT_DOUBLE_EQ(rerouted_load(g, wider, kFigure, path(1).links[2], other), 40.0);
}

TEST_F(Figure, Reservations) {
  const auto res = exact_reservations(f.instance, inc, kFigure);
  for (LinkIndex e : path(0).links) EXPECT_NEAR(res[e].value, 33.3333, 1e-3);
  for (int p : {1, 2}) {
    for (LinkIndex e : path(p).links) EXPECT_NEAR(res[e].value, 66.6667, 1e-3);
  }
  // the worst failure for a p1 link is on p2 or p3
  const LinkIndex witness = f.instance.srlgs[res[path(0).links[0]].argmax_srlg].links[0];
  EXPECT_TRUE(std::count(path(0).links.begin(), path(0).links.end(), witness) == 0);
}

TEST_F(Figure, TotalCosts) {
  EXPECT_NEAR(total_cost(f.instance, f.paths, inc, kFigure).total(), 499.95, 0.5);
  EXPECT_NEAR(total_cost(f.instance, f.paths, inc, kFigure).reservation_cost, 500.0, 1e-9);
  EXPECT_NEAR(total_cost(f.instance, f.paths, inc, kEqual).total(), 450.0, 1e-9);
}

TEST_F(Figure, OnePlusOne) {
  EXPECT_DOUBLE_EQ(one_plus_one_cost(f.instance, 100.0, path(0), path(1)), 600.0);
  EXPECT_DOUBLE_EQ(one_plus_one_cost(f.instance, 0.0, path(0), path(1)), 0.0);
  EXPECT_THROW(one_plus_one_cost(f.instance, 100.0, path(0), path(0)), InvalidBaseline);
}

TEST(OnePlusOne, UnitCostPerPath) {
  // each parallel path has one unit-cost link and one free link
  const testing::Fixture f = testing::parallel_links(2, 7.0);
  EXPECT_DOUBLE_EQ(
      one_plus_one_cost(f.instance, 7.0, f.paths.by_tunnel[0][0], f.paths.by_tunnel[0][1]), 14.0);
}

TEST_F(Figure, CapacityVerdict) {
  EXPECT_TRUE(check_capacity(f.instance, inc, kFigure).empty());
  f.instance.links[path(1).links[0]].capacity = 60.0;
  const auto v = check_capacity(f.instance, inc, kFigure);
  ASSERT_FALSE(v.empty());
  for (const auto& x : v) {
    EXPECT_EQ(x.link, path(1).links[0]);
    EXPECT_NEAR(x.load, 66.6667, 1e-3);
    EXPECT_DOUBLE_EQ(x.capacity, 60.0);
  }
}

TEST(CapacityVerdict, UnprotectedTrafficAlone) {
  NetworkInstance g;
  const NodeIndex s = g.add_node("s");
  const NodeIndex t = g.add_node("t");
  const NodeIndex m = g.add_node("m");
  const LinkIndex direct = g.add_link(s, t, 5.0, 1.0);
  const LinkIndex a = g.add_link(s, m, 100.0, 1.0);
  const LinkIndex b = g.add_link(m, t, 100.0, 1.0);
  g.tunnels.push_back(Tunnel{"k0", s, t, 8.0, false});
  g.srlgs = enumerate_srlgs(g, 1);
  PathSet ps;
  ps.by_tunnel = {{Path{"p0", 0, {direct}, 0.0}, Path{"p1", 0, {a, b}, 0.0}}};
  const Incidence inc(g, ps);
  const auto v = check_capacity(g, inc, SplitAssignment{{{1.0, 0.0}}});
  // overloaded under every failure that leaves the direct link up
  EXPECT_EQ(v.size(), 2u);
  for (const auto& x : v) EXPECT_DOUBLE_EQ(x.load, 8.0);
  EXPECT_TRUE(check_capacity(g, inc, SplitAssignment{{{0.5, 0.5}}}).empty());
  EXPECT_DOUBLE_EQ(total_cost(g, ps, inc, SplitAssignment{{{1.0, 0.0}}}).reservation_cost, 0.0);
}

TEST(Reservation, SinglePathUntouchedBySrlgs) {
  testing::Fixture f = testing::parallel_links(1, 30.0);
  NetworkInstance& g = f.instance;
  const LinkIndex far = g.add_link(1, g.add_node("z"), kInfiniteCapacity, 1.0);
  g.srlgs = {Srlg{"far", {far}}};
  const Incidence inc(g, f.paths);
  const auto res = exact_reservations(g, inc, SplitAssignment{{{1.0}}});
  EXPECT_DOUBLE_EQ(res[f.paths.by_tunnel[0][0].links[0]].value, 30.0);
  EXPECT_DOUBLE_EQ(res[far].value, 0.0);
}

// Random multi-tunnel instances with Yen paths and random splits.
struct RandomCase {
  NetworkInstance instance;
  PathSet paths;
  SplitAssignment splits;
};

RandomCase random_case(std::uint64_t seed, int q) {
  std::mt19937_64 rng(seed);
  RandomCase c;
  c.instance = testing::ring_with_chords(8, 5, seed);
  std::uniform_int_distribution<int> node(0, 7);
  std::uniform_real_distribution<double> demand(1.0, 50.0);
  while (c.instance.tunnels.size() < 5) {
    const int s = node(rng);
    const int t = node(rng);
    if (s == t) continue;
    const int k = static_cast<int>(c.instance.tunnels.size());
    c.instance.tunnels.push_back(Tunnel{"k" + std::to_string(k), s, t, demand(rng), k % 3 != 2});
  }
  c.instance.srlgs = enumerate_srlgs(c.instance, q);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  for (int k = 0; k < 5; ++k) {
    const Tunnel& t = c.instance.tunnels[k];
    auto paths = yen_ksp(c.instance, t.source, t.destination, 4);
    for (Path& p : paths) p.tunnel = k;
    std::vector<double> r;
    double sum = 0.0;
    for (std::size_t p = 0; p < paths.size(); ++p) sum += r.emplace_back(weight(rng));
    for (double& v : r) v /= sum;
    c.paths.by_tunnel.push_back(std::move(paths));
    c.splits.ratios.push_back(std::move(r));
  }
  return c;
}

TEST(Reservation, MatchesBruteForceSimulation) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RandomCase c = random_case(seed, 1 + static_cast<int>(seed % 2));
    const Incidence inc(c.instance, c.paths);
    std::vector<LinkReservation> res;
    try {
      res = exact_reservations(c.instance, inc, c.splits);
    } catch (const TotalFailure&) {
      continue;  // some SRLG cuts every path of a protected tunnel
    }
    for (LinkIndex e = 0; e < static_cast<int>(c.instance.links.size()); ++e) {
      EXPECT_NEAR(res[e].value, testing::brute_force_reservation(c.instance, c.paths, c.splits, e),
                  1e-9)
          << "seed " << seed << " link " << e;
    }
    EXPECT_NEAR(total_cost(c.instance, c.paths, res, c.splits).total(),
                testing::brute_force_cost(c.instance, c.paths, c.splits), 1e-7);
  }
}

TEST(Reservation, ParallelMatchesReference) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RandomCase c = random_case(seed, 1);
    const Incidence inc(c.instance, c.paths);
    std::vector<LinkReservation> a, b;
    try {
      a = exact_reservations(c.instance, inc, c.splits);
    } catch (const TotalFailure&) {
      EXPECT_THROW(reference::exact_reservations(c.instance, inc, c.splits), TotalFailure);
      continue;
    }
    b = reference::exact_reservations(c.instance, inc, c.splits);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t e = 0; e < a.size(); ++e) {
      EXPECT_EQ(a[e].value, b[e].value);
      EXPECT_EQ(a[e].argmax_srlg, b[e].argmax_srlg);
    }
  }
}

TEST(Reservation, ScalesWithDemand) {
  for (std::uint64_t seed = 30; seed < 36; ++seed) {
    RandomCase c = random_case(seed, 1);
    const Incidence inc(c.instance, c.paths);
    std::vector<LinkReservation> base;
    try {
      base = exact_reservations(c.instance, inc, c.splits);
    } catch (const TotalFailure&) {
      continue;
    }
    for (Tunnel& t : c.instance.tunnels) t.demand *= 2.5;
    const auto scaled = exact_reservations(c.instance, inc, c.splits);
    for (std::size_t e = 0; e < base.size(); ++e) {
      EXPECT_NEAR(scaled[e].value, 2.5 * base[e].value, 1e-9 * std::max(1.0, base[e].value));
    }
  }
}

TEST(Reservation, ZeroProtectedTunnelsCostNothing) {
  testing::Fixture f = testing::three_disjoint_paths();
  f.instance.tunnels[0].is_protected = false;
  const Incidence inc(f.instance, f.paths);
  EXPECT_DOUBLE_EQ(total_cost(f.instance, f.paths, inc, kFigure).reservation_cost, 0.0);
}

TEST(GridOracle, SharedProtectionBeatsOnePlusOne) {
  const testing::Fixture f = testing::three_disjoint_paths();
  const testing::GridOptimum best = testing::three_path_grid_optimum(f.instance, f.paths, 0.01);
  const double duplicate = one_plus_one_cost(f.instance, 100.0, f.paths.by_tunnel[0][0],
                                             f.paths.by_tunnel[0][1]);
  EXPECT_LT(best.cost, duplicate);
  EXPECT_NEAR(best.cost, 450.0, 2.5);
  const Incidence inc(f.instance, f.paths);
  EXPECT_NEAR(total_cost(f.instance, f.paths, inc, SplitAssignment{{best.ratios}}).total(),
              best.cost, 1e-9);
}

}  // namespace
}  // namespace plb
