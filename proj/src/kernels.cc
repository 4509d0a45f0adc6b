#include <exception>
#include <optional>

#include "plb/evaluator.h"
#include "plb/nkcp.h"

namespace plb {

std::vector<LinkReservation> exact_reservations(const NetworkInstance& instance,
                                                const Incidence& incidence,
                                                const SplitAssignment& splits) {
  const int links = incidence.link_count();
  std::vector<LinkReservation> out(links);
  std::vector<std::exception_ptr> errors(links);
#pragma omp parallel for schedule(dynamic, 4)
  for (LinkIndex e = 0; e < links; ++e) {
    try {
      out[e] = exact_reservation(instance, incidence, splits, e);
    } catch (...) {
      errors[e] = std::current_exception();
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

std::vector<Cut> separate(const MasterProgram& master, const std::vector<double>& values,
                          const ConvexSurrogate& surrogate, const SeparationOptions& options) {
  const int pairs = static_cast<int>(master.pairs().size());
  // slot 2i holds the reservation cut of pair i, 2i+1 its capacity cut
  std::vector<std::optional<Cut>> slots(2 * static_cast<std::size_t>(pairs));
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < pairs; ++i) {
    slots[2 * i] = separate_pair(master, i, CutKind::kReservation, values, surrogate,
                                 options.tolerance);
    slots[2 * i + 1] = separate_pair(master, i, CutKind::kCapacity, values, surrogate,
                                     options.tolerance);
  }
  std::vector<Cut> out;
  double depth = -1.0;
  for (auto& slot : slots) {
    if (!slot) continue;
    if (!options.deepest_only) {
      out.push_back(std::move(*slot));
      continue;
    }
    const PairSpec& p = master.pairs()[slot->pair];
    const double scale =
        slot->kind == CutKind::kReservation
            ? reservation_scale(slot->violation + values[master.reservation_column(p.link)])
            : capacity_scale(p.capacity);
    if (slot->violation / scale > depth) {
      depth = slot->violation / scale;
      out.clear();
      out.push_back(std::move(*slot));
    }
  }
  return out;
}

}  // namespace plb
