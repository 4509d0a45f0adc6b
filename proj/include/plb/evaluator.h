#ifndef PLB_EVALUATOR_H
#define PLB_EVALUATOR_H

#include <vector>

#include "plb/instance.h"

namespace plb {

// Per tunnel, the ratio of its demand sent on each of its paths.
struct SplitAssignment {
  std::vector<std::vector<double>> ratios;

  const std::vector<double>& of(TunnelIndex k) const { return ratios[k]; }
};

// Throws InvalidParameter unless every tunnel's ratios lie in [0,1] and sum
// to 1 within tol, with one ratio per path.
void check_splits(const PathSet& paths, const SplitAssignment& splits, double tol = 1e-8);

// Ratios after the paths in failed_mask go down. Surviving paths scale by
// 1/(1 - w) where w is the failed share; throws TotalFailure when w >= 1.
std::vector<double> transfer_ratios(const std::vector<double>& ratios, PathMask failed_mask);

// Protected traffic carried by link e once SRLG s has failed.
double rerouted_load(const NetworkInstance& instance, const Incidence& incidence,
                     const SplitAssignment& splits, LinkIndex e, SrlgIndex s);

struct LinkReservation {
  double value = 0.0;
  SrlgIndex argmax_srlg = -1;  // -1 when there is no SRLG
};

// Worst rerouted load on e over all SRLGs.
LinkReservation exact_reservation(const NetworkInstance& instance, const Incidence& incidence,
                                  const SplitAssignment& splits, LinkIndex e);

// exact_reservation for every link. Parallel over links.
std::vector<LinkReservation> exact_reservations(const NetworkInstance& instance,
                                                const Incidence& incidence,
                                                const SplitAssignment& splits);

struct CostBreakdown {
  double reservation_cost = 0.0;
  double routing_cost = 0.0;

  double total() const { return reservation_cost + routing_cost; }
};

CostBreakdown total_cost(const NetworkInstance& instance, const PathSet& paths,
                         const Incidence& incidence, const SplitAssignment& splits);
CostBreakdown total_cost(const NetworkInstance& instance, const PathSet& paths,
                         const std::vector<LinkReservation>& reservations,
                         const SplitAssignment& splits);

struct CapacityViolation {
  LinkIndex link = 0;
  SrlgIndex srlg = 0;
  double load = 0.0;
  double capacity = 0.0;
};

// Every (e, S) where unprotected surviving traffic plus rerouted protected
// traffic exceeds the link capacity by more than tol.
std::vector<CapacityViolation> check_capacity(const NetworkInstance& instance,
                                              const Incidence& incidence,
                                              const SplitAssignment& splits,
                                              double tol = 1e-6);

// Bandwidth cost of duplicating the demand on both paths. The paths must not
// share an SRLG (nor a link when the instance has no SRLG).
double one_plus_one_cost(const NetworkInstance& instance, double demand, const Path& primary,
                         const Path& backup);

}  // namespace plb

#endif  // PLB_EVALUATOR_H
