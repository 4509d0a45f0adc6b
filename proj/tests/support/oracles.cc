#include "support/oracles.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace plb::testing {

namespace {

struct Constraint {
  std::vector<double> a;
  RowSense sense;
  double b;
};

bool satisfied(const Constraint& c, const Eigen::VectorXd& x) {
  double act = 0.0;
  for (std::size_t j = 0; j < c.a.size(); ++j) act += c.a[j] * x(j);
  const double tol = 1e-9 * (1.0 + std::abs(c.b));
  switch (c.sense) {
    case RowSense::kLessEqual:
      return act <= c.b + tol;
    case RowSense::kGreaterEqual:
      return act >= c.b - tol;
    case RowSense::kEqual:
      return std::abs(act - c.b) <= tol;
  }
  return false;
}

}  // namespace

std::optional<double> vertex_enumeration_optimum(const LinearProgram& lp) {
  const int n = lp.num_variables();
  std::vector<Constraint> cons;
  for (const Row& r : lp.rows()) {
    Constraint c{std::vector<double>(n, 0.0), r.sense, r.rhs};
    for (const LinearTerm& t : r.terms) c.a[t.var] += t.coef;
    cons.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    const Variable& v = lp.variables()[j];
    Constraint lo{std::vector<double>(n, 0.0), RowSense::kGreaterEqual, v.lower};
    lo.a[j] = 1.0;
    Constraint hi{std::vector<double>(n, 0.0), RowSense::kLessEqual, v.upper};
    hi.a[j] = 1.0;
    cons.push_back(lo);
    cons.push_back(hi);
  }
  const int total = static_cast<int>(cons.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (int r = 0; r < n; ++r) {
        for (int j = 0; j < n; ++j) a(r, j) = cons[pick[r]].a[j];
        b(r) = cons[pick[r]].b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(b);
      for (const Constraint& c : cons) {
        if (!satisfied(c, x)) return;
      }
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += lp.variables()[j].cost * x(j);
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

std::vector<std::vector<LinkIndex>> all_simple_paths(const NetworkInstance& instance,
                                                     NodeIndex s, NodeIndex t) {
  std::vector<std::vector<LinkIndex>> out;
  std::vector<LinkIndex> current;
  std::vector<bool> visited(instance.nodes.size(), false);
  std::function<void(NodeIndex)> dfs = [&](NodeIndex at) {
    if (at == t) {
      out.push_back(current);
      return;
    }
    visited[at] = true;
    for (std::size_t e = 0; e < instance.links.size(); ++e) {
      const Link& l = instance.links[e];
      if (!l.touches(at)) continue;
      const NodeIndex next = l.other(at);
      if (visited[next]) continue;
      current.push_back(static_cast<LinkIndex>(e));
      dfs(next);
      current.pop_back();
    }
    visited[at] = false;
  };
  dfs(s);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

double brute_force_reservation(const NetworkInstance& instance, const PathSet& paths,
                               const SplitAssignment& splits, LinkIndex e) {
  double worst = 0.0;
  for (const Srlg& srlg : instance.srlgs) {
    double load = 0.0;
    for (std::size_t k = 0; k < instance.tunnels.size(); ++k) {
      if (!instance.tunnels[k].is_protected) continue;
      const auto& tunnel_paths = paths.by_tunnel[k];
      std::vector<bool> failed(tunnel_paths.size(), false);
      double lost = 0.0;
      for (std::size_t p = 0; p < tunnel_paths.size(); ++p) {
        for (LinkIndex l : tunnel_paths[p].links) {
          if (std::count(srlg.links.begin(), srlg.links.end(), l) > 0) failed[p] = true;
        }
        if (failed[p]) lost += splits.ratios[k][p];
      }
      const double surviving = 1.0 - lost;
      for (std::size_t p = 0; p < tunnel_paths.size(); ++p) {
        if (failed[p]) continue;
        const auto& ls = tunnel_paths[p].links;
        if (std::count(ls.begin(), ls.end(), e) == 0) continue;
        // own share plus its proportional part of the lost share
        const double share = splits.ratios[k][p] + lost * splits.ratios[k][p] / surviving;
        load += instance.tunnels[k].demand * share;
      }
    }
    worst = std::max(worst, load);
  }
  return worst;
}

double brute_force_cost(const NetworkInstance& instance, const PathSet& paths,
                        const SplitAssignment& splits) {
  double cost = 0.0;
  for (std::size_t e = 0; e < instance.links.size(); ++e) {
    cost += instance.links[e].unit_cost *
            brute_force_reservation(instance, paths, splits, static_cast<LinkIndex>(e));
  }
  for (std::size_t k = 0; k < instance.tunnels.size(); ++k) {
    for (std::size_t p = 0; p < paths.by_tunnel[k].size(); ++p) {
      cost += instance.tunnels[k].demand * paths.by_tunnel[k][p].routing_cost *
              splits.ratios[k][p];
    }
  }
  return cost;
}

GridOptimum three_path_grid_optimum(const NetworkInstance& instance, const PathSet& paths,
                                    double step) {
  GridOptimum best{std::numeric_limits<double>::infinity(), {}};
  const int steps = static_cast<int>(std::lround(1.0 / step));
  const double cap = 1.0 - instance.epsilon;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; i + j <= steps; ++j) {
      const std::vector<double> r{i * step, j * step, (steps - i - j) * step};
      if (r[0] > cap || r[1] > cap || r[2] > cap) continue;
      SplitAssignment s{{r}};
      const double c = brute_force_cost(instance, paths, s);
      if (c < best.cost) best = GridOptimum{c, r};
    }
  }
  return best;
}

LinearProgram random_bounded_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> bound(0, 6);
  std::uniform_int_distribution<int> sense(0, 5);
  LinearProgram lp;
  const int n = size(rng);
  const int m = size(rng);
  for (int j = 0; j < n; ++j) {
    const double lo = -bound(rng);
    const double hi = lo + bound(rng);
    lp.add_variable(lo, hi, coef(rng));
  }
  for (int i = 0; i < m; ++i) {
    Row r;
    for (int j = 0; j < n; ++j) {
      const int c = coef(rng);
      if (c != 0) r.terms.push_back({j, static_cast<double>(c)});
    }
    const int s = sense(rng);
    // equality rows are rarer so that most programs stay feasible
    r.sense = s == 0 ? RowSense::kEqual : (s < 3 ? RowSense::kLessEqual : RowSense::kGreaterEqual);
    r.rhs = coef(rng) * 2;
    lp.add_row(r);
  }
  return lp;
}

}  // namespace plb::testing
