#ifndef PLB_PATHS_H
#define PLB_PATHS_H

#include <string>
#include <vector>

#include "plb/instance.h"

namespace plb {

// Up to k loop-free s-t paths by Yen's algorithm on hop count, ordered by
// hops and then by the sequence of link indices. Fewer are returned when
// fewer exist; a disconnected pair gives an empty list. routing_cost is the
// hop count.
std::vector<Path> yen_ksp(const NetworkInstance& instance, NodeIndex source,
                          NodeIndex destination, int k);

struct Selection {
  std::vector<int> indices;  // into the candidate list, ascending
  int objective = 0;         // max over SRLGs of selected paths it hits
  int total_hops = 0;
};

// Max over srlgs of the number of given paths that an SRLG intersects.
int sharing_objective(const std::vector<const Path*>& chosen, const std::vector<Srlg>& srlgs);

// Picks n candidates minimizing sharing_objective, then total hops, then the
// index sequence. Exhaustive when C(|candidates|, n) <= exhaustive_limit,
// otherwise greedy construction followed by 2-swap descent; the result is
// never worse than the first n candidates. Throws InsufficientPaths naming
// `tunnel` when there are fewer than n candidates.
Selection select_disjoint(const std::vector<Path>& candidates, const std::vector<Srlg>& srlgs,
                          int n, const std::string& tunnel = {},
                          long long exhaustive_limit = 100000);

enum class PathMetric { kHops, kLinkCost };

struct PathGenConfig {
  int paths_per_tunnel = 3;
  int expansion = 30;
  PathMetric metric = PathMetric::kHops;  // how routing_cost is charged
  bool allow_fewer_paths = false;
};

// Yen with k = expansion * n, then select_disjoint against instance.srlgs,
// for every tunnel. Path ids are "<tunnel id>/p<j>". Parallel over tunnels.
PathSet build_pathsets(const NetworkInstance& instance, const PathGenConfig& config);

}  // namespace plb

#endif  // PLB_PATHS_H
