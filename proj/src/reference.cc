#include "plb/reference.h"

namespace plb::reference {

std::vector<LinkReservation> exact_reservations(const NetworkInstance& instance,
                                                const Incidence& incidence,
                                                const SplitAssignment& splits) {
  std::vector<LinkReservation> out(incidence.link_count());
  for (LinkIndex e = 0; e < incidence.link_count(); ++e) {
    out[e] = exact_reservation(instance, incidence, splits, e);
  }
  return out;
}

std::vector<Cut> separate(const MasterProgram& master, const std::vector<double>& values,
                          const ConvexSurrogate& surrogate, const SeparationOptions& options) {
  std::vector<Cut> out;
  for (int i = 0; i < static_cast<int>(master.pairs().size()); ++i) {
    for (CutKind kind : {CutKind::kReservation, CutKind::kCapacity}) {
      auto cut = separate_pair(master, i, kind, values, surrogate, options.tolerance);
      if (cut) out.push_back(std::move(*cut));
    }
  }
  if (options.deepest_only && out.size() > 1) {
    std::size_t best = 0;
    double depth = -1.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const PairSpec& p = master.pairs()[out[i].pair];
      const double scale = out[i].kind == CutKind::kReservation
                               ? reservation_scale(out[i].violation +
                                                   values[master.reservation_column(p.link)])
                               : capacity_scale(p.capacity);
      if (out[i].violation / scale > depth) {
        depth = out[i].violation / scale;
        best = i;
      }
    }
    Cut keep = std::move(out[best]);
    out.clear();
    out.push_back(std::move(keep));
  }
  return out;
}

}  // namespace plb::reference
