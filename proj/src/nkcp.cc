#include "plb/nkcp.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "plb/error.h"

namespace plb {

MasterProgram::MasterProgram(const NetworkInstance& instance, const PathSet& paths,
                             Encoding encoding)
    : instance_(&instance), paths_(&paths), encoding_(encoding), incidence_(instance, paths) {
  const int tunnels = static_cast<int>(instance.tunnels.size());
  if (paths.tunnel_count() != tunnels) throw BuildError("path set does not match the tunnels");
  for (int k = 0; k < tunnels; ++k) {
    if (paths.by_tunnel[k].empty()) {
      throw BuildError("tunnel " + instance.tunnels[k].id + " has no path");
    }
  }

  // split ratios, then one reservation per link
  for (int k = 0; k < tunnels; ++k) {
    split_offset_.push_back(lp_.num_variables());
    const Tunnel& t = instance.tunnels[k];
    for (const Path& p : paths.by_tunnel[k]) {
      lp_.add_variable(0.0, 1.0, t.demand * p.routing_cost, "x_" + p.id);
    }
  }
  reservation_offset_ = lp_.num_variables();
  for (const Link& l : instance.links) {
    lp_.add_variable(0.0, kInfiniteCapacity, l.unit_cost, "w_" + l.id);
  }

  for (int k = 0; k < tunnels; ++k) {
    Row r;
    r.name = "split_" + instance.tunnels[k].id;
    r.sense = RowSense::kEqual;
    r.rhs = 1.0;
    for (std::size_t p = 0; p < paths.by_tunnel[k].size(); ++p) {
      r.terms.push_back({split_column(k, static_cast<PathIndex>(p)), 1.0});
    }
    lp_.add_row(std::move(r));
  }

  auto mask_terms = [this](TunnelIndex k, PathMask mask, double coef, std::vector<LinearTerm>& out) {
    for (PathMask m = mask; m != 0; m &= m - 1) {
      out.push_back({split_column(k, std::countr_zero(m)), coef});
    }
  };

  const int srlgs = incidence_.srlg_count();
  const double cap_share = 1.0 - instance.epsilon;
  // Y columns of the inequality encoding, per (tunnel, srlg)
  std::map<std::pair<int, int>, int> y_columns;
  for (int k = 0; k < tunnels; ++k) {
    const Tunnel& t = instance.tunnels[k];
    if (!t.is_protected) continue;
    std::set<PathMask> seen;
    for (int s = 0; s < srlgs; ++s) {
      const PathMask mask = incidence_.srlg_mask(k, s);
      if (mask == 0) continue;
      if (encoding_ == Encoding::kEquality) {
        // share of k crossing S stays below 1 - eps
        if (!seen.insert(mask).second) continue;
        Row r;
        r.name = "cross_" + t.id + "_" + instance.srlgs[s].id;
        r.rhs = cap_share;
        mask_terms(k, mask, 1.0, r.terms);
        lp_.add_row(std::move(r));
      } else {
        const int col = lp_.add_variable(0.0, cap_share, 0.0,
                                         "wk_" + t.id + "_" + instance.srlgs[s].id);
        ++share_columns_;
        y_columns[{k, s}] = col;
        Row r;
        r.name = "def_wk_" + t.id + "_" + instance.srlgs[s].id;
        mask_terms(k, mask, 1.0, r.terms);
        r.terms.push_back({col, -1.0});
        lp_.add_row(std::move(r));
      }
    }
  }

  std::set<std::pair<LinkIndex, std::vector<std::pair<int, PathMask>>>> linear_rows;
  for (LinkIndex e = 0; e < incidence_.link_count(); ++e) {
    const double capacity = instance.links[e].capacity;
    for (SrlgIndex s = 0; s < srlgs; ++s) {
      PairSpec pair;
      pair.link = e;
      pair.srlg = s;
      pair.capacity = capacity;
      for (TunnelIndex k : incidence_.tunnels_on(e)) {
        const Tunnel& t = instance.tunnels[k];
        const PathMask crossing = incidence_.srlg_mask(k, s);
        const PathMask avoiding = incidence_.edge_mask(k, e) & ~crossing;
        if (avoiding == 0) continue;  // nothing of k left on e
        if (t.is_protected) {
          pair.terms.push_back(SurrogateTerm{k, t.demand, avoiding, crossing, -1, -1});
        } else {
          pair.linear.push_back(LinearShare{k, t.demand, avoiding});
        }
      }
      if (pair.terms.empty()) {
        if (std::isinf(capacity) || pair.linear.empty()) continue;
        std::vector<std::pair<int, PathMask>> key;
        for (const LinearShare& l : pair.linear) key.emplace_back(l.tunnel, l.mask);
        if (!linear_rows.insert({e, key}).second) continue;
        Row r;
        r.name = "cap_" + instance.links[e].id + "_" + instance.srlgs[s].id;
        r.rhs = capacity;
        for (const LinearShare& l : pair.linear) mask_terms(l.tunnel, l.mask, l.demand, r.terms);
        lp_.add_row(std::move(r));
        continue;
      }
      if (encoding_ == Encoding::kInequality) {
        for (SurrogateTerm& term : pair.terms) {
          const std::string tag = instance.links[e].id + "_" +
                                  instance.tunnels[term.tunnel].id + "_" + instance.srlgs[s].id;
          term.x_column = lp_.add_variable(0.0, 1.0, 0.0, "wek_" + tag);
          ++share_columns_;
          Row def;
          def.name = "def_wek_" + tag;
          mask_terms(term.tunnel, term.x_mask, 1.0, def.terms);
          def.terms.push_back({term.x_column, -1.0});
          lp_.add_row(std::move(def));
          if (term.y_mask != 0) {
            term.y_column = y_columns.at({term.tunnel, s});
            // the two shares are disjoint parts of the tunnel's traffic
            Row valid;
            valid.name = "disjoint_" + tag;
            valid.rhs = 1.0;
            valid.terms = {{term.x_column, 1.0}, {term.y_column, 1.0}};
            lp_.add_row(std::move(valid));
          }
        }
      }
      pairs_.push_back(std::move(pair));
    }
  }
}

double MasterProgram::term_x(const SurrogateTerm& t, const std::vector<double>& values) const {
  if (t.x_column >= 0) return values[t.x_column];
  double sum = 0.0;
  for (PathMask m = t.x_mask; m != 0; m &= m - 1) {
    sum += values[split_column(t.tunnel, std::countr_zero(m))];
  }
  return sum;
}

double MasterProgram::term_y(const SurrogateTerm& t, const std::vector<double>& values) const {
  if (t.y_column >= 0) return values[t.y_column];
  double sum = 0.0;
  for (PathMask m = t.y_mask; m != 0; m &= m - 1) {
    sum += values[split_column(t.tunnel, std::countr_zero(m))];
  }
  return sum;
}

namespace {

double surrogate_sum(const MasterProgram& master, const PairSpec& pair,
                     const std::vector<double>& values, const ConvexSurrogate& surrogate) {
  double sum = 0.0;
  for (const SurrogateTerm& t : pair.terms) {
    sum += t.demand * surrogate.evaluate(master.term_x(t, values), master.term_y(t, values));
  }
  return sum;
}

double linear_sum(const MasterProgram& master, const PairSpec& pair,
                  const std::vector<double>& values) {
  double sum = 0.0;
  for (const LinearShare& l : pair.linear) {
    for (PathMask m = l.mask; m != 0; m &= m - 1) {
      sum += l.demand * values[master.split_column(l.tunnel, std::countr_zero(m))];
    }
  }
  return sum;
}

}  // namespace

double MasterProgram::reservation_value(int pair, const std::vector<double>& values,
                                        const ConvexSurrogate& surrogate) const {
  const PairSpec& p = pairs_[pair];
  return surrogate_sum(*this, p, values, surrogate) - values[reservation_column(p.link)];
}

double MasterProgram::capacity_value(int pair, const std::vector<double>& values,
                                     const ConvexSurrogate& surrogate) const {
  const PairSpec& p = pairs_[pair];
  return linear_sum(*this, p, values) + surrogate_sum(*this, p, values, surrogate) - p.capacity;
}

Cut MasterProgram::make_cut(int pair, CutKind kind, const std::vector<double>& values,
                            const ConvexSurrogate& surrogate) const {
  const PairSpec& p = pairs_[pair];
  Cut cut;
  cut.kind = kind;
  cut.link = p.link;
  cut.srlg = p.srlg;
  cut.pair = pair;
  const std::string tag = instance_->links[p.link].id + "_" + instance_->srlgs[p.srlg].id;
  cut.row.name = (kind == CutKind::kReservation ? "res_" : "capcut_") + tag;
  cut.row.sense = RowSense::kLessEqual;
  double shift = 0.0;  // sum of d (grad . point - P(point))
  double value = 0.0;
  auto add_share = [&](const SurrogateTerm& t, PathMask mask, int column, double coef) {
    if (coef == 0.0) return;
    if (column >= 0) {
      cut.row.terms.push_back({column, coef});
      return;
    }
    for (PathMask m = mask; m != 0; m &= m - 1) {
      cut.row.terms.push_back({split_column(t.tunnel, std::countr_zero(m)), coef});
    }
  };
  for (const SurrogateTerm& t : p.terms) {
    const double x = term_x(t, values);
    const double y = term_y(t, values);
    const double f = surrogate.evaluate(x, y);
    const Gradient2 g = surrogate.gradient(x, y);
    cut.point.emplace_back(x, y);
    add_share(t, t.x_mask, t.x_column, t.demand * g.dx);
    if (t.y_mask != 0) add_share(t, t.y_mask, t.y_column, t.demand * g.dy);
    shift += t.demand * (g.dx * x + g.dy * y - f);
    value += t.demand * f;
  }
  if (kind == CutKind::kReservation) {
    cut.row.terms.push_back({reservation_column(p.link), -1.0});
    cut.row.rhs = shift;
    cut.violation = value - values[reservation_column(p.link)];
  } else {
    for (const LinearShare& l : p.linear) {
      for (PathMask m = l.mask; m != 0; m &= m - 1) {
        cut.row.terms.push_back({split_column(l.tunnel, std::countr_zero(m)), l.demand});
      }
    }
    cut.row.rhs = p.capacity + shift;
    cut.violation = linear_sum(*this, p, values) + value - p.capacity;
  }
  return cut;
}

SplitAssignment MasterProgram::splits_from(const std::vector<double>& values) const {
  SplitAssignment s;
  s.ratios.resize(paths_->by_tunnel.size());
  for (std::size_t k = 0; k < paths_->by_tunnel.size(); ++k) {
    const std::size_t n = paths_->by_tunnel[k].size();
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double v = std::clamp(values[split_column(static_cast<int>(k), static_cast<int>(p))],
                                  0.0, 1.0);
      s.ratios[k].push_back(v);
      sum += v;
    }
    for (double& v : s.ratios[k]) v /= sum;
  }
  return s;
}

void MasterProgram::fix_splits(const SplitAssignment& splits) {
  check_splits(*paths_, splits);
  for (std::size_t k = 0; k < splits.ratios.size(); ++k) {
    for (std::size_t p = 0; p < splits.ratios[k].size(); ++p) {
      Variable& v = lp_.variable(split_column(static_cast<int>(k), static_cast<int>(p)));
      v.lower = v.upper = splits.ratios[k][p];
    }
  }
}

double cut_value(const Cut& cut, const std::vector<double>& values) {
  double v = -cut.row.rhs;
  for (const LinearTerm& t : cut.row.terms) v += t.coef * values[t.var];
  return v;
}

double reservation_scale(double surrogate_sum) { return std::max(1.0, std::abs(surrogate_sum)); }
double capacity_scale(double capacity) { return std::max(1.0, std::abs(capacity)); }

std::optional<Cut> separate_pair(const MasterProgram& master, int pair, CutKind kind,
                                 const std::vector<double>& values,
                                 const ConvexSurrogate& surrogate, double tolerance) {
  const PairSpec& p = master.pairs()[pair];
  double value = 0.0;
  double scale = 1.0;
  if (kind == CutKind::kReservation) {
    const double sum = surrogate_sum(master, p, values, surrogate);
    value = sum - values[master.reservation_column(p.link)];
    scale = reservation_scale(sum);
  } else {
    if (std::isinf(p.capacity)) return std::nullopt;
    value = master.capacity_value(pair, values, surrogate);
    scale = capacity_scale(p.capacity);
  }
  if (!(value > tolerance * scale)) return std::nullopt;
  return master.make_cut(pair, kind, values, surrogate);
}

double max_relative_violation(const MasterProgram& master, const std::vector<double>& values,
                              const ConvexSurrogate& surrogate) {
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(master.pairs().size()); ++i) {
    const PairSpec& p = master.pairs()[i];
    const double sum = surrogate_sum(master, p, values, surrogate);
    const double res = sum - values[master.reservation_column(p.link)];
    worst = std::max(worst, res / reservation_scale(sum));
    if (!std::isinf(p.capacity)) {
      worst = std::max(worst, master.capacity_value(i, values, surrogate) /
                                  capacity_scale(p.capacity));
    }
  }
  return worst;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return "converged";
    case Termination::kIterationLimit:
      return "iteration-limit";
    case Termination::kTimeLimit:
      return "time-limit";
    case Termination::kInfeasible:
      return "infeasible";
    case Termination::kLpFailure:
      return "lp-failure";
  }
  return "?";
}

ExactResult exact_postprocess(const NetworkInstance& instance, const PathSet& paths,
                              const SplitAssignment& splits) {
  check_splits(paths, splits);
  const Incidence incidence(instance, paths);
  ExactResult r;
  r.reservations = exact_reservations(instance, incidence, splits);
  r.cost = total_cost(instance, paths, r.reservations, splits);
  r.violations = check_capacity(instance, incidence, splits);
  return r;
}

SolveReport solve_nkcp(const NetworkInstance& instance, const PathSet& paths,
                       const ConvexSurrogate& surrogate, const NkcpOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_s = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  SolveReport report;
  MasterProgram master(instance, paths, options.encoding);
  if (options.fixed_splits) master.fix_splits(*options.fixed_splits);
  IncrementalLp lp(master.lp(), options.lp);

  std::vector<double> values;
  report.termination = Termination::kIterationLimit;
  for (int round = 1;; ++round) {
    if (round > options.max_iterations) {
      report.termination = Termination::kIterationLimit;
      break;
    }
    if (elapsed_s() > options.time_limit_s) {
      report.termination = Termination::kTimeLimit;
      break;
    }
    const LpSolution sol = lp.solve();
    report.iterations = round;
    if (sol.status == LpStatus::kInfeasible) {
      report.termination = Termination::kInfeasible;
      report.infeasible_iteration = round;
      report.message = "master infeasible at iteration " + std::to_string(round);
      break;
    }
    if (sol.status != LpStatus::kOptimal) {
      report.termination = Termination::kLpFailure;
      report.message = std::string("lp ") + to_string(sol.status) + " at iteration " +
                       std::to_string(round) +
                       (sol.diagnostics.empty() ? "" : ": " + sol.diagnostics);
      break;
    }
    values = sol.values;
    report.objective_history.push_back(sol.objective);
    report.surrogate_objective = sol.objective;

    std::vector<Cut> cuts = separate(master, values, surrogate, options.separation);
    if (cuts.empty()) {
      report.termination = Termination::kConverged;
      break;
    }
    for (Cut& cut : cuts) {
      lp.add_row(cut.row);
      if (cut.kind == CutKind::kReservation) {
        ++report.reservation_cuts;
      } else {
        ++report.capacity_cuts;
      }
      if (options.keep_cuts) report.cuts.push_back(std::move(cut));
    }
  }

  if (!values.empty()) {
    report.final_max_violation = max_relative_violation(master, values, surrogate);
    report.splits = master.splits_from(values);
    try {
      ExactResult exact = exact_postprocess(instance, paths, report.splits);
      report.reservations = std::move(exact.reservations);
      report.cost = exact.cost;
      report.capacity_violations = std::move(exact.violations);
      report.feasible = report.capacity_violations.empty() &&
                        report.termination != Termination::kInfeasible;
    } catch (const TotalFailure& e) {
      report.message = e.what();
      report.feasible = false;
    }
  }
  report.wall_ms = elapsed_s() * 1000.0;
  return report;
}

}  // namespace plb
