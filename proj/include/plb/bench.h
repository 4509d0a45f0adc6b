#ifndef PLB_BENCH_H
#define PLB_BENCH_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plb/instance.h"
#include "plb/nkcp.h"
#include "plb/surrogate.h"

namespace plb {

// One experiment matrix. Instance files may be instance JSON, GraphML or
// SNDlib native text (chosen by extension: .json, .graphml, anything else).
struct ExperimentSpec {
  std::vector<std::string> instances;
  std::vector<int> q_values{1};
  std::vector<int> paths_per_tunnel{3};
  std::vector<double> protected_fractions{0.4};
  std::vector<std::uint64_t> seeds{1};
  double time_limit_s = 600.0;
  double tolerance = 1e-6;
  int expansion = 30;
  // Demands generated for instances that carry no tunnels.
  int tunnel_count = 10;
  double demand_lo = 1.0;
  double demand_hi = 100.0;
  // Surrogate JSON for NKCP; empty trains one with the default configuration.
  std::string surrogate;
  // Plane used by NKCP-R.
  Plane baseline = kReportedPlane;
};

// Throws ParseError on malformed JSON or InvalidParameter on empty lists or a
// nonpositive time limit. Relative instance paths resolve against base_dir.
ExperimentSpec read_experiment_spec(const std::string& text, const std::string& base_dir = {});

enum class Method { kNkcp, kNkcpR };
const char* to_string(Method m);

struct ResultRow {
  std::string instance;
  int q = 0;
  int n = 0;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  Method method = Method::kNkcp;
  bool ok = false;  // false when the cell raised an error
  std::string error;
  std::string termination;
  double exact_objective = 0.0;
  double reservation_cost = 0.0;
  double routing_cost = 0.0;
  double surrogate_objective = 0.0;
  int iterations = 0;
  int reservation_cuts = 0;
  int capacity_cuts = 0;
  double wall_ms = 0.0;
  bool feasible = false;
  double final_max_violation = 0.0;
  bool objective_monotone = true;
  int links = 0;
  int srlgs = 0;
  int tunnels = 0;
  // (obj_NKCP - obj_NKCP-R) / obj_NKCP-R, on both rows of a cell pair
  std::optional<double> gap;
};

// Builds the instance of one matrix cell: loads the file, generates or
// re-flags demands, enumerates q-SRLGs.
NetworkInstance prepare_instance(const std::string& file, const ExperimentSpec& spec, int q,
                                 double fraction, std::uint64_t seed);

// Rows in spec order: instance, q, n, fraction, seed, then NKCP before
// NKCP-R. Cells run on `workers` threads (PLB_WORKERS when 0, else 1). A
// failing cell yields rows with ok = false.
std::vector<ResultRow> run_matrix(const ExperimentSpec& spec, int workers = 0);

// Whether the sequence never decreases by more than a relative 1e-9.
bool is_nondecreasing(const std::vector<double>& values);

std::string results_csv(const std::vector<ResultRow>& rows, bool include_wall_clock = true);

// Writes cpu_ranked.csv (solved rows per method, wall time sorted ascending
// with rank) and gap_scatter.csv (one line per cell with the gap and an
// unsolved flag) into dir.
void emit_plots(const std::vector<ResultRow>& rows, const std::string& dir);

}  // namespace plb

#endif  // PLB_BENCH_H
