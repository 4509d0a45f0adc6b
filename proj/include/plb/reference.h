#ifndef PLB_REFERENCE_H
#define PLB_REFERENCE_H

// Serial versions of the parallel kernels, kept as the reference the
// parallel code is tested and benchmarked against.

#include <vector>

#include "plb/evaluator.h"
#include "plb/nkcp.h"

namespace plb::reference {

std::vector<LinkReservation> exact_reservations(const NetworkInstance& instance,
                                                const Incidence& incidence,
                                                const SplitAssignment& splits);

std::vector<Cut> separate(const MasterProgram& master, const std::vector<double>& values,
                          const ConvexSurrogate& surrogate, const SeparationOptions& options = {});

}  // namespace plb::reference

#endif  // PLB_REFERENCE_H
