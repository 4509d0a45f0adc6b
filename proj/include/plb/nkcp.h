#ifndef PLB_NKCP_H
#define PLB_NKCP_H

#include <optional>
#include <string>
#include <vector>

#include "plb/evaluator.h"
#include "plb/instance.h"
#include "plb/lp.h"
#include "plb/surrogate.h"

namespace plb {

// How the shares w^k_S (traffic of k crossing S) and w^{ek}_S (traffic of k
// on e avoiding S) enter the master. kEquality substitutes their defining sums
// of split ratios, so the LP columns are the ratios and the link reservations
// only. kInequality keeps them as columns bounded below by those sums.
enum class Encoding { kEquality, kInequality };

// One protected tunnel's contribution to the constraint of a (link, SRLG)
// pair: demand * P(X, Y), X = share on the link avoiding the SRLG, Y = share
// crossing the SRLG.
struct SurrogateTerm {
  TunnelIndex tunnel = 0;
  double demand = 0.0;
  PathMask x_mask = 0;  // paths through e avoiding S
  PathMask y_mask = 0;  // paths crossing S
  int x_column = -1;    // explicit columns (kInequality); -1 means use the mask sum
  int y_column = -1;
};

// Unprotected traffic that survives S and stays on e.
struct LinearShare {
  TunnelIndex tunnel = 0;
  double demand = 0.0;
  PathMask mask = 0;
};

struct PairSpec {
  LinkIndex link = 0;
  SrlgIndex srlg = 0;
  std::vector<SurrogateTerm> terms;  // nonempty
  std::vector<LinearShare> linear;
  double capacity = kInfiniteCapacity;
};

enum class CutKind { kReservation, kCapacity };

struct Cut {
  CutKind kind = CutKind::kReservation;
  LinkIndex link = 0;
  SrlgIndex srlg = 0;
  int pair = 0;  // index into MasterProgram::pairs()
  // (X*, Y*) per surrogate term of the pair
  std::vector<std::pair<double, double>> point;
  Row row;  // terms . columns <= rhs
  double violation = 0.0;  // constraint value at the point, unscaled
};

class MasterProgram {
 public:
  // Throws BuildError if a tunnel has no path.
  MasterProgram(const NetworkInstance& instance, const PathSet& paths,
                Encoding encoding = Encoding::kEquality);

  const LinearProgram& lp() const { return lp_; }
  LinearProgram& lp() { return lp_; }
  const std::vector<PairSpec>& pairs() const { return pairs_; }
  const Incidence& incidence() const { return incidence_; }
  const NetworkInstance& instance() const { return *instance_; }
  const PathSet& paths() const { return *paths_; }
  Encoding encoding() const { return encoding_; }

  int split_column(TunnelIndex k, PathIndex p) const { return split_offset_[k] + p; }
  int reservation_column(LinkIndex e) const { return reservation_offset_ + e; }
  int share_column_count() const { return share_columns_; }

  double term_x(const SurrogateTerm& t, const std::vector<double>& values) const;
  double term_y(const SurrogateTerm& t, const std::vector<double>& values) const;

  // Constraint values at LP point `values`:
  //   reservation: sum_k d_k P(X, Y) - w_e
  //   capacity:    sum_{K-} d_k share + sum_k d_k P(X, Y) - b_e
  double reservation_value(int pair, const std::vector<double>& values,
                           const ConvexSurrogate& surrogate) const;
  double capacity_value(int pair, const std::vector<double>& values,
                        const ConvexSurrogate& surrogate) const;

  // Gradient cut of one constraint of a pair at `values`.
  Cut make_cut(int pair, CutKind kind, const std::vector<double>& values,
               const ConvexSurrogate& surrogate) const;

  // Split ratios read from LP values, clamped to [0,1] and renormalized.
  SplitAssignment splits_from(const std::vector<double>& values) const;

  // Fixes the split columns to the given ratios.
  void fix_splits(const SplitAssignment& splits);

 private:
  const NetworkInstance* instance_;
  const PathSet* paths_;
  Encoding encoding_;
  Incidence incidence_;
  LinearProgram lp_;
  std::vector<int> split_offset_;
  int reservation_offset_ = 0;
  int share_columns_ = 0;
  std::vector<PairSpec> pairs_;
};

// Value of the cut's affine function (row activity minus rhs) at `values`.
double cut_value(const Cut& cut, const std::vector<double>& values);

struct SeparationOptions {
  double tolerance = 1e-6;     // relative
  bool deepest_only = false;   // one cut per round instead of every violated pair
};

// Relative violation threshold of a constraint.
double reservation_scale(double surrogate_sum);
double capacity_scale(double capacity);

// Cut for constraint `kind` of pair `pair` if it is violated beyond tolerance.
std::optional<Cut> separate_pair(const MasterProgram& master, int pair, CutKind kind,
                                 const std::vector<double>& values,
                                 const ConvexSurrogate& surrogate, double tolerance);

// Every violated cut at `values`, in (pair, kind) order. Parallel over pairs.
std::vector<Cut> separate(const MasterProgram& master, const std::vector<double>& values,
                          const ConvexSurrogate& surrogate, const SeparationOptions& options = {});

// Largest relative violation over all pairs and both constraint kinds.
double max_relative_violation(const MasterProgram& master, const std::vector<double>& values,
                              const ConvexSurrogate& surrogate);

enum class Termination { kConverged, kIterationLimit, kTimeLimit, kInfeasible, kLpFailure };

const char* to_string(Termination t);

struct NkcpOptions {
  Encoding encoding = Encoding::kEquality;
  SeparationOptions separation;
  int max_iterations = 10000;
  double time_limit_s = 600.0;
  std::optional<SplitAssignment> fixed_splits;
  SimplexOptions lp;
  bool keep_cuts = true;
};

struct SolveReport {
  Termination termination = Termination::kLpFailure;
  std::string message;
  SplitAssignment splits;
  std::vector<LinkReservation> reservations;  // exact
  CostBreakdown cost;                         // exact
  double surrogate_objective = 0.0;           // last LP objective
  std::vector<double> objective_history;      // LP objective per round
  int iterations = 0;
  int reservation_cuts = 0;
  int capacity_cuts = 0;
  int infeasible_iteration = -1;
  double final_max_violation = 0.0;
  std::vector<CapacityViolation> capacity_violations;
  bool feasible = false;  // exact capacity check passed
  double wall_ms = 0.0;
  std::vector<Cut> cuts;

  int total_cuts() const { return reservation_cuts + capacity_cuts; }
  bool has_solution() const { return !splits.ratios.empty(); }
};

SolveReport solve_nkcp(const NetworkInstance& instance, const PathSet& paths,
                       const ConvexSurrogate& surrogate, const NkcpOptions& options = {});

struct ExactResult {
  std::vector<LinkReservation> reservations;
  CostBreakdown cost;
  std::vector<CapacityViolation> violations;
};

// Exact reservations, cost and capacity verdict of fixed splits.
ExactResult exact_postprocess(const NetworkInstance& instance, const PathSet& paths,
                              const SplitAssignment& splits);

}  // namespace plb

#endif  // PLB_NKCP_H
