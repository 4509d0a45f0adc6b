#ifndef PLB_INSTANCE_IO_H
#define PLB_INSTANCE_IO_H

#include <cstdint>
#include <string>
#include <vector>

#include "plb/evaluator.h"
#include "plb/instance.h"
#include "plb/surrogate.h"

namespace plb {

// SNDlib native format, sections NODES, LINKS and DEMANDS. Other sections are
// skipped. Capacity is the pre-installed capacity when positive, else the
// first module capacity, else infinite. Cost is the routing cost when
// positive, else 1. Zero demands, self loops and repeated node pairs are
// dropped (repeated links add their capacity to the first one).
NetworkInstance parse_sndlib(const std::string& text);

struct GraphmlOptions {
  double default_capacity = kInfiniteCapacity;
  double default_cost = 1.0;
  // Edge data keys (by attr.name) read when present.
  std::string capacity_key = "capacity";
  std::string cost_key = "cost";
};

// Undirected links of a GraphML graph. Self loops and repeated node pairs
// are dropped.
NetworkInstance parse_graphml(const std::string& text, const GraphmlOptions& options = {});

struct DemandGenSpec {
  int tunnel_count = 10;
  double lo = 1.0;
  double hi = 100.0;
  double protected_fraction = 0.4;
  std::uint64_t seed = 1;
};

// Replaces the tunnels of instance with tunnel_count random ones: distinct
// ordered node pairs drawn uniformly, demands uniform in [lo, hi], the first
// ceil(fraction * count) tunnels protected.
NetworkInstance generate_demands(NetworkInstance instance, const DemandGenSpec& spec);

// Instance JSON:
// {nodes:[], links:[{id,a,b,capacity,cost}], tunnels:[{id,src,dst,demand,protected}],
//  srlgs:[[linkId,...]], epsilon}. Infinite capacity is written as null.
std::string write_instance(const NetworkInstance& instance);
NetworkInstance read_instance(const std::string& text);

// Paths JSON: [{tunnel, paths:[{id, links:[linkId,...], cost}]}], one entry per
// tunnel in instance order.
std::string write_paths(const NetworkInstance& instance, const PathSet& paths);
PathSet read_paths(const NetworkInstance& instance, const std::string& text);

// Splits JSON: {tunnelId:{pathId:ratio}}. Paths missing from the object get 0.
std::string write_splits(const NetworkInstance& instance, const PathSet& paths,
                         const SplitAssignment& splits);
SplitAssignment read_splits(const NetworkInstance& instance, const PathSet& paths,
                            const std::string& text);

struct SolutionRecord {
  SplitAssignment splits;
  std::vector<double> reservations;  // per link
  double reservation_cost = 0.0;
  double routing_cost = 0.0;
  int iterations = 0;
  int cuts = 0;
  double wall_ms = 0.0;
  bool feasible = false;
};

// Solution JSON: {splits:{tunnelId:{pathId:ratio}}, reservations:{linkId:value},
// objective:{reservation_cost, routing_cost}, stats:{iterations, cuts, wall_ms},
// feasible}.
std::string write_solution(const NetworkInstance& instance, const PathSet& paths,
                           const SolutionRecord& record);

// Surrogate JSON: {neurons:[{kind, ax, ay, bi, ai}], bias}.
std::string write_surrogate(const ConvexSurrogate& surrogate);
ConvexSurrogate read_surrogate(const std::string& text);

// Whole-file helpers; failures raise IoError naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace plb

#endif  // PLB_INSTANCE_IO_H
