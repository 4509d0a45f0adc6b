#ifndef PLB_TESTS_FIXTURES_H
#define PLB_TESTS_FIXTURES_H

#include <cstdint>

#include "plb/instance.h"

namespace plb::testing {

struct Fixture {
  NetworkInstance instance;
  PathSet paths;
};

// One protected tunnel s -> t of demand 100 over three link-disjoint paths of
// three links each. Unit link costs, zero routing costs, infinite capacity,
// every single link is an SRLG.
Fixture three_disjoint_paths();

// One protected tunnel over `count` parallel single-link paths, each link in
// its own SRLG. Costs and capacities as in three_disjoint_paths.
Fixture parallel_links(int count, double demand = 100.0);

// Ring of n nodes plus `chords` random chords, no self loops or duplicate pairs.
NetworkInstance ring_with_chords(int n, int chords, std::uint64_t seed);

// Absolute path of a file under tests/data.
std::string data_path(const std::string& name);

}  // namespace plb::testing

#endif  // PLB_TESTS_FIXTURES_H
