#include "plb/instance_io.h"

#include <gtest/gtest.h>

#include <cmath>

#include "plb/error.h"
#include "support/fixtures.h"

namespace plb {
namespace {

using testing::data_path;

TEST(ParseSndlib, SmallFixture) {
  const NetworkInstance g = parse_sndlib(read_file(data_path("small.sndlib")));
  EXPECT_EQ(g.nodes.size(), 3u);
  ASSERT_EQ(g.links.size(), 3u);
  ASSERT_EQ(g.tunnels.size(), 1u);
  EXPECT_DOUBLE_EQ(g.tunnels[0].demand, 10.0);
  EXPECT_EQ(g.nodes[g.tunnels[0].source], "A");
  EXPECT_EQ(g.nodes[g.tunnels[0].destination], "C");
  for (const Link& l : g.links) {
    EXPECT_DOUBLE_EQ(l.capacity, 100.0);
    EXPECT_DOUBLE_EQ(l.unit_cost, 1.0);
  }
  EXPECT_TRUE(validate(g).empty());
}

TEST(ParseSndlib, MissingLinksSectionIsNamed) {
  try {
    parse_sndlib(read_file(data_path("missing_links.sndlib")));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("LINKS"), std::string::npos);
  }
}

TEST(ParseSndlib, BadNumberReportsLine) {
  try {
    parse_sndlib(read_file(data_path("bad_number.sndlib")));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6);
  }
}

TEST(ParseSndlib, MalformedHeader) {
  EXPECT_THROW(parse_sndlib("NODES\n"), ParseError);
  EXPECT_THROW(parse_sndlib("NODES (\n  A ( 0 0 )\n"), ParseError);
}

TEST(ParseSndlib, ModuleCapacityAndCostFallbacks) {
  const NetworkInstance g = parse_sndlib(read_file(data_path("net12.sndlib")));
  EXPECT_EQ(g.nodes.size(), 12u);
  EXPECT_EQ(g.links.size(), 15u);
  // no pre-installed capacity: the first module capacity is used
  EXPECT_DOUBLE_EQ(g.links[0].capacity, 2500.0);
  // zero routing cost falls back to 1
  EXPECT_DOUBLE_EQ(g.links[0].unit_cost, 1.0);
  EXPECT_GE(g.tunnels.size(), 10u);
  EXPECT_LE(g.tunnels.size(), 462u);
  EXPECT_TRUE(validate(g).empty());
}

TEST(ParseGraphml, Ring) {
  const NetworkInstance g = parse_graphml(read_file(data_path("ring4.graphml")));
  EXPECT_EQ(g.nodes.size(), 4u);
  ASSERT_EQ(g.links.size(), 4u);
  EXPECT_DOUBLE_EQ(g.links[0].capacity, 40.0);
  EXPECT_TRUE(std::isinf(g.links[1].capacity));
  EXPECT_DOUBLE_EQ(g.links[1].unit_cost, 1.0);
}

TEST(ParseGraphml, DanglingEndpoint) {
  EXPECT_THROW(parse_graphml(read_file(data_path("dangling.graphml"))), ParseError);
}

TEST(ParseGraphml, MalformedXml) {
  EXPECT_THROW(parse_graphml(read_file(data_path("malformed.graphml"))), ParseError);
}

TEST(ParseGraphml, ZooScaleDropsRepeatedEdges) {
  const NetworkInstance g = parse_graphml(read_file(data_path("zoo20.graphml")));
  EXPECT_EQ(g.nodes.size(), 20u);
  EXPECT_EQ(g.links.size(), 32u);
  EXPECT_LE(g.links.size(), 45u);
  EXPECT_TRUE(validate(g).empty());
}

TEST(GenerateDemands, CountsAndDeterminism) {
  const NetworkInstance ring = testing::ring_with_chords(5, 0, 1);
  DemandGenSpec spec;
  spec.tunnel_count = 10;
  spec.protected_fraction = 0.4;
  spec.seed = 42;
  const NetworkInstance a = generate_demands(ring, spec);
  const NetworkInstance b = generate_demands(ring, spec);
  ASSERT_EQ(a.tunnels.size(), 10u);
  EXPECT_EQ(a.protected_count(), 4);
  EXPECT_EQ(write_instance(a), write_instance(b));
  std::set<std::pair<int, int>> pairs;
  for (const Tunnel& t : a.tunnels) {
    EXPECT_NE(t.source, t.destination);
    EXPECT_GE(t.demand, spec.lo);
    EXPECT_LE(t.demand, spec.hi);
    pairs.insert({t.source, t.destination});
  }
  EXPECT_EQ(pairs.size(), 10u);
  spec.seed = 43;
  EXPECT_NE(write_instance(generate_demands(ring, spec)), write_instance(a));
}

TEST(GenerateDemands, ProtectedFractions) {
  const NetworkInstance zoo = parse_graphml(read_file(data_path("zoo20.graphml")));
  DemandGenSpec spec;
  spec.tunnel_count = 10;
  spec.protected_fraction = 0.8;
  EXPECT_EQ(generate_demands(zoo, spec).protected_count(), 8);
  spec.tunnel_count = 40;
  spec.protected_fraction = 0.4;
  const NetworkInstance g = generate_demands(zoo, spec);
  EXPECT_EQ(g.tunnels.size(), 40u);
  EXPECT_EQ(g.protected_count(), 16);
  spec.protected_fraction = 0.0;
  EXPECT_EQ(generate_demands(zoo, spec).protected_count(), 0);
  spec.protected_fraction = 1.0;
  EXPECT_EQ(generate_demands(zoo, spec).protected_count(), 40);
}

TEST(GenerateDemands, TooManyPairs) {
  DemandGenSpec spec;
  spec.tunnel_count = 7;  // 3 nodes have 6 ordered pairs
  EXPECT_THROW(generate_demands(testing::ring_with_chords(3, 0, 1), spec), InvalidParameter);
  spec.tunnel_count = 6;
  EXPECT_EQ(generate_demands(testing::ring_with_chords(3, 0, 1), spec).tunnels.size(), 6u);
}

TEST(InstanceJson, RoundTrip) {
  NetworkInstance g = parse_sndlib(read_file(data_path("net12.sndlib")));
  g.links[3].capacity = kInfiniteCapacity;
  g.links[4].unit_cost = 2.5;
  g.tunnels[1].is_protected = true;
  g.srlgs = enumerate_srlgs(g, 2);
  g.epsilon = 0.02;
  const std::string text = write_instance(g);
  const NetworkInstance back = read_instance(text);
  EXPECT_EQ(write_instance(back), text);
  ASSERT_EQ(back.links.size(), g.links.size());
  EXPECT_TRUE(std::isinf(back.links[3].capacity));
  EXPECT_DOUBLE_EQ(back.links[4].unit_cost, 2.5);
  EXPECT_EQ(back.srlgs.size(), g.srlgs.size());
  EXPECT_EQ(back.srlgs[5].links, g.srlgs[5].links);
  EXPECT_DOUBLE_EQ(back.epsilon, 0.02);
}

TEST(InstanceJson, UnknownNodeIsRejected) {
  EXPECT_THROW(read_instance(R"({"nodes":["a"],"links":[{"id":"e","a":"a","b":"z","capacity":null,"cost":1}],"tunnels":[]})"),
               ParseError);
  EXPECT_THROW(read_instance("{not json"), ParseError);
  EXPECT_THROW(read_instance(R"({"nodes":[]})"), ParseError);
}

TEST(PathsJson, RoundTripAndSplits) {
  const auto f = testing::three_disjoint_paths();
  const PathSet back = read_paths(f.instance, write_paths(f.instance, f.paths));
  ASSERT_EQ(back.by_tunnel.size(), 1u);
  ASSERT_EQ(back.by_tunnel[0].size(), 3u);
  EXPECT_EQ(back.by_tunnel[0][2].links, f.paths.by_tunnel[0][2].links);
  EXPECT_EQ(back.by_tunnel[0][1].id, "p1");

  const SplitAssignment s{{{0.2, 0.4, 0.4}}};
  const SplitAssignment s2 =
      read_splits(f.instance, f.paths, write_splits(f.instance, f.paths, s));
  EXPECT_EQ(s2.ratios, s.ratios);
  EXPECT_THROW(read_splits(f.instance, f.paths, R"({"k0":{"nope":1}})"), ParseError);
}

TEST(SolutionJson, EmptyReportIsValid) {
  NetworkInstance g;
  const std::string text = write_solution(g, PathSet{}, SolutionRecord{});
  EXPECT_NE(text.find("\"splits\": {}"), std::string::npos);
  EXPECT_NE(text.find("\"reservations\": {}"), std::string::npos);
  EXPECT_NE(text.find("\"feasible\": false"), std::string::npos);
}

TEST(SolutionJson, CarriesReservationsAndStats) {
  const auto f = testing::three_disjoint_paths();
  SolutionRecord r;
  r.splits = SplitAssignment{{{0.2, 0.4, 0.4}}};
  r.reservations.assign(9, 0.0);
  r.reservations[0] = 100.0 / 3.0;
  r.reservation_cost = 500.0;
  r.iterations = 7;
  r.cuts = 12;
  r.feasible = true;
  const std::string text = write_solution(f.instance, f.paths, r);
  EXPECT_NE(text.find("\"e0\": 33.33333333333"), std::string::npos);
  EXPECT_NE(text.find("\"iterations\": 7"), std::string::npos);
  EXPECT_NE(text.find("\"cuts\": 12"), std::string::npos);
  EXPECT_NE(text.find("\"p0\": 0.2"), std::string::npos);
}

TEST(SurrogateJson, RoundTripIsExact) {
  ConvexSurrogate s;
  s.neurons.push_back(Neuron{Activation::power(4), 0.1234567890123, -2.5, 1e-17, 0.75});
  s.neurons.push_back(Neuron{Activation::relu(), 1.0, 1.0, -0.5, 0.0});
  s.neurons.push_back(Neuron{Activation::exp(), 0.3, 0.9, 0.01, 2.0});
  s.bias = -0.123;
  EXPECT_EQ(read_surrogate(write_surrogate(s)), s);
}

TEST(Files, MissingFileNamesPath) {
  try {
    read_file("/nonexistent/dir/x.json");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/x.json"), std::string::npos);
  }
}

}  // namespace
}  // namespace plb
