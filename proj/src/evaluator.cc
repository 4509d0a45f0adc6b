#include "plb/evaluator.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "plb/error.h"

namespace plb {

namespace {

constexpr double kDivisionGuard = 1e-12;

}  // namespace

void check_splits(const PathSet& paths, const SplitAssignment& splits, double tol) {
  if (splits.ratios.size() != paths.by_tunnel.size()) {
    throw InvalidParameter("split assignment does not cover every tunnel");
  }
  for (std::size_t k = 0; k < splits.ratios.size(); ++k) {
    const auto& r = splits.ratios[k];
    if (r.size() != paths.by_tunnel[k].size()) {
      throw InvalidParameter("tunnel " + std::to_string(k) + ": one ratio per path expected");
    }
    double sum = 0.0;
    for (double v : r) {
      if (!(v >= -tol && v <= 1.0 + tol)) {
        throw InvalidParameter("tunnel " + std::to_string(k) + ": ratio outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw InvalidParameter("tunnel " + std::to_string(k) + ": ratios sum to " +
                             std::to_string(sum));
    }
  }
}

std::vector<double> transfer_ratios(const std::vector<double>& ratios, PathMask failed_mask) {
  const double failed = mask_sum(failed_mask, ratios);
  if (failed >= 1.0 - kDivisionGuard) {
    throw TotalFailure("every path carrying traffic has failed");
  }
  std::vector<double> out(ratios.size(), 0.0);
  for (std::size_t p = 0; p < ratios.size(); ++p) {
    if ((failed_mask >> p) & 1U) continue;
    out[p] = ratios[p] / (1.0 - failed);
  }
  return out;
}

double rerouted_load(const NetworkInstance& instance, const Incidence& incidence,
                     const SplitAssignment& splits, LinkIndex e, SrlgIndex s) {
  double load = 0.0;
  for (TunnelIndex k : incidence.tunnels_on(e)) {
    const Tunnel& t = instance.tunnels[k];
    if (!t.is_protected) continue;
    const PathMask crossing = incidence.srlg_mask(k, s);
    const double w_s = mask_sum(crossing, splits.of(k));
    if (w_s >= 1.0 - kDivisionGuard) {
      throw TotalFailure("tunnel " + t.id + " sends all traffic through srlg " +
                         instance.srlgs[s].id);
    }
    const double w_es = mask_sum(incidence.edge_mask(k, e) & ~crossing, splits.of(k));
    load += t.demand * w_es / (1.0 - w_s);
  }
  return load;
}

LinkReservation exact_reservation(const NetworkInstance& instance, const Incidence& incidence,
                                  const SplitAssignment& splits, LinkIndex e) {
  LinkReservation best;
  for (SrlgIndex s = 0; s < incidence.srlg_count(); ++s) {
    const double load = rerouted_load(instance, incidence, splits, e, s);
    if (best.argmax_srlg < 0 || load > best.value) {
      best.value = load;
      best.argmax_srlg = s;
    }
  }
  return best;
}

CostBreakdown total_cost(const NetworkInstance& instance, const PathSet& paths,
                         const std::vector<LinkReservation>& reservations,
                         const SplitAssignment& splits) {
  CostBreakdown cost;
  for (std::size_t e = 0; e < instance.links.size(); ++e) {
    cost.reservation_cost += instance.links[e].unit_cost * reservations[e].value;
  }
  for (std::size_t k = 0; k < instance.tunnels.size(); ++k) {
    double per_unit = 0.0;
    const auto& tunnel_paths = paths.by_tunnel[k];
    for (std::size_t p = 0; p < tunnel_paths.size(); ++p) {
      per_unit += tunnel_paths[p].routing_cost * splits.ratios[k][p];
    }
    cost.routing_cost += instance.tunnels[k].demand * per_unit;
  }
  return cost;
}

CostBreakdown total_cost(const NetworkInstance& instance, const PathSet& paths,
                         const Incidence& incidence, const SplitAssignment& splits) {
  return total_cost(instance, paths, exact_reservations(instance, incidence, splits), splits);
}

std::vector<CapacityViolation> check_capacity(const NetworkInstance& instance,
                                              const Incidence& incidence,
                                              const SplitAssignment& splits, double tol) {
  std::vector<CapacityViolation> out;
  for (LinkIndex e = 0; e < incidence.link_count(); ++e) {
    const double cap = instance.links[e].capacity;
    if (std::isinf(cap)) continue;
    for (SrlgIndex s = 0; s < incidence.srlg_count(); ++s) {
      double load = rerouted_load(instance, incidence, splits, e, s);
      for (TunnelIndex k : incidence.tunnels_on(e)) {
        const Tunnel& t = instance.tunnels[k];
        if (t.is_protected) continue;
        const PathMask surviving = incidence.edge_mask(k, e) & ~incidence.srlg_mask(k, s);
        load += t.demand * mask_sum(surviving, splits.of(k));
      }
      if (load > cap + tol) out.push_back(CapacityViolation{e, s, load, cap});
    }
  }
  return out;
}

double one_plus_one_cost(const NetworkInstance& instance, double demand, const Path& primary,
                         const Path& backup) {
  auto touches = [](const Path& p, const std::vector<LinkIndex>& links) {
    for (LinkIndex e : p.links) {
      if (std::find(links.begin(), links.end(), e) != links.end()) return true;
    }
    return false;
  };
  if (instance.srlgs.empty()) {
    if (touches(primary, backup.links)) {
      throw InvalidBaseline("1+1 paths share a link");
    }
  }
  for (const Srlg& s : instance.srlgs) {
    if (touches(primary, s.links) && touches(backup, s.links)) {
      throw InvalidBaseline("1+1 paths share srlg " + s.id);
    }
  }
  double cost = 0.0;
  for (LinkIndex e : primary.links) cost += instance.links[e].unit_cost;
  for (LinkIndex e : backup.links) cost += instance.links[e].unit_cost;
  return demand * cost;
}

}  // namespace plb
