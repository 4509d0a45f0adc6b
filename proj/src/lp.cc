#include "plb/lp.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "plb/error.h"
#include "plb/simplex.h"

namespace plb {

int LinearProgram::add_variable(double lower, double upper, double cost, std::string name) {
  if (std::isnan(lower) || std::isnan(upper) || !std::isfinite(cost) || lower > upper) {
    throw InvalidParameter("invalid variable bounds or cost");
  }
  if (name.empty()) name = "x" + std::to_string(variables_.size());
  variables_.push_back(Variable{lower, upper, cost, std::move(name)});
  return num_variables() - 1;
}

int LinearProgram::add_row(Row row) {
  for (const LinearTerm& t : row.terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw InvalidParameter("row references unknown variable " + std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) throw InvalidParameter("non-finite row coefficient");
  }
  if (!std::isfinite(row.rhs)) throw InvalidParameter("non-finite right-hand side");
  if (row.name.empty()) row.name = "r" + std::to_string(rows_.size());
  rows_.push_back(std::move(row));
  return num_rows() - 1;
}

double LinearProgram::objective_value(const std::vector<double>& x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < variables_.size(); ++j) v += variables_[j].cost * x[j];
  return v;
}

std::string LinearProgram::to_lp_format() const {
  std::ostringstream out;
  out.precision(17);
  auto term = [&out](double coef, const std::string& name) {
    out << (coef < 0 ? " - " : " + ") << std::abs(coef) << ' ' << name;
  };
  out << "Minimize\n obj:";
  bool any = false;
  for (const Variable& v : variables_) {
    if (v.cost != 0.0) {
      term(v.cost, v.name);
      any = true;
    }
  }
  if (!any && !variables_.empty()) out << " 0 " << variables_.front().name;
  out << "\nSubject To\n";
  for (const Row& r : rows_) {
    out << ' ' << r.name << ':';
    if (r.terms.empty() && !variables_.empty()) out << " 0 " << variables_.front().name;
    for (const LinearTerm& t : r.terms) term(t.coef, variables_[t.var].name);
    switch (r.sense) {
      case RowSense::kLessEqual:
        out << " <= ";
        break;
      case RowSense::kEqual:
        out << " = ";
        break;
      case RowSense::kGreaterEqual:
        out << " >= ";
        break;
    }
    out << r.rhs << '\n';
  }
  out << "Bounds\n";
  for (const Variable& v : variables_) {
    const bool lo = std::isfinite(v.lower);
    const bool hi = std::isfinite(v.upper);
    if (!lo && !hi) {
      out << ' ' << v.name << " free\n";
    } else if (lo && hi) {
      out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
    } else if (lo) {
      out << ' ' << v.name << " >= " << v.lower << '\n';
    } else {
      out << " -inf <= " << v.name << " <= " << v.upper << '\n';
    }
  }
  out << "End\n";
  return out.str();
}

LinearProgram with_row(LinearProgram lp, Row row) {
  lp.add_row(std::move(row));
  return lp;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "?";
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_variables(); ++j) {
    const Variable& v = lp.variables()[j];
    if (x[j] < v.lower) worst = std::max(worst, (v.lower - x[j]) / (1.0 + std::abs(v.lower)));
    if (x[j] > v.upper) worst = std::max(worst, (x[j] - v.upper) / (1.0 + std::abs(v.upper)));
  }
  for (const Row& r : lp.rows()) {
    double act = 0.0;
    for (const LinearTerm& t : r.terms) act += t.coef * x[t.var];
    double excess = 0.0;
    if (r.sense != RowSense::kGreaterEqual) excess = std::max(excess, act - r.rhs);
    if (r.sense != RowSense::kLessEqual) excess = std::max(excess, r.rhs - act);
    worst = std::max(worst, excess / (1.0 + std::abs(r.rhs)));
  }
  return worst;
}

namespace {

constexpr double kInf = BoundedSimplex::kInf;

std::pair<double, double> row_bounds(const Row& r) {
  switch (r.sense) {
    case RowSense::kLessEqual:
      return {-kInf, r.rhs};
    case RowSense::kEqual:
      return {r.rhs, r.rhs};
    case RowSense::kGreaterEqual:
      return {r.rhs, kInf};
  }
  return {-kInf, kInf};
}

// Bounds of the dual multiplier of a row in a minimization.
std::pair<double, double> multiplier_bounds(RowSense sense) {
  switch (sense) {
    case RowSense::kLessEqual:
      return {-kInf, 0.0};
    case RowSense::kEqual:
      return {-kInf, kInf};
    case RowSense::kGreaterEqual:
      return {0.0, kInf};
  }
  return {-kInf, kInf};
}

BoundedSimplex::Options to_options(const SimplexOptions& o, int rows, int cols) {
  BoundedSimplex::Options opts;
  opts.feasibility_tol = o.feasibility_tol;
  opts.optimality_tol = o.optimality_tol;
  opts.refactor_interval = o.refactor_interval;
  opts.max_iterations = o.max_iterations > 0 ? o.max_iterations : 10000 + 20 * (rows + cols);
  return opts;
}

// Row coefficients merged per variable, as (var, coef) sorted by var.
std::vector<std::pair<int, double>> merged_terms(const Row& r) {
  std::map<int, double> acc;
  for (const LinearTerm& t : r.terms) acc[t.var] += t.coef;
  std::vector<std::pair<int, double>> out;
  for (const auto& [var, coef] : acc) {
    if (coef != 0.0) out.emplace_back(var, coef);
  }
  return out;
}

// Snap values that sit within tolerance outside their bounds.
void snap_to_bounds(const LinearProgram& lp, std::vector<double>& x) {
  for (int j = 0; j < lp.num_variables(); ++j) {
    const Variable& v = lp.variables()[j];
    x[j] = std::clamp(x[j], v.lower, v.upper);
  }
}

LpSolution finish(const LinearProgram& lp, LpSolution sol) {
  if (sol.status == LpStatus::kOptimal) {
    snap_to_bounds(lp, sol.values);
    sol.objective = lp.objective_value(sol.values);
    sol.max_violation = max_violation(lp, sol.values);
  }
  return sol;
}

LpSolution solve_primal(const LinearProgram& lp, const SimplexOptions& options) {
  std::vector<std::pair<double, double>> bounds;
  bounds.reserve(lp.rows().size());
  for (const Row& r : lp.rows()) bounds.push_back(row_bounds(r));
  BoundedSimplex simplex(lp.num_rows(), std::move(bounds),
                         to_options(options, lp.num_rows(), lp.num_variables()));

  std::vector<std::vector<std::pair<int, double>>> columns(lp.num_variables());
  for (int i = 0; i < lp.num_rows(); ++i) {
    for (const auto& [var, coef] : merged_terms(lp.rows()[i])) columns[var].emplace_back(i, coef);
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    const Variable& v = lp.variables()[j];
    simplex.add_column(columns[j], v.lower, v.upper, v.cost);
  }

  LpSolution sol;
  const auto result = simplex.solve();
  sol.iterations = simplex.iterations();
  switch (result) {
    case BoundedSimplex::Result::kOptimal:
      sol.status = LpStatus::kOptimal;
      break;
    case BoundedSimplex::Result::kInfeasible:
      sol.status = LpStatus::kInfeasible;
      break;
    case BoundedSimplex::Result::kUnbounded:
      sol.status = LpStatus::kUnbounded;
      break;
    case BoundedSimplex::Result::kIterationLimit:
      sol.status = LpStatus::kIterationLimit;
      sol.diagnostics = "primal simplex hit the iteration limit";
      break;
  }
  sol.values.resize(lp.num_variables());
  for (int j = 0; j < lp.num_variables(); ++j) sol.values[j] = simplex.value(j);
  const auto& pi = simplex.multipliers();
  sol.row_duals.assign(pi.data(), pi.data() + pi.size());
  return finish(lp, std::move(sol));
}

}  // namespace

// The dual of  min c'x, rows a_i'x {<=,=,>=} b_i, l <= x <= u  is kept in
// minimization form
//   min -b'y - l'z+ + u'z-   s.t.  A'y + z+ - z- = c,
// with y_i sign-restricted by the row sense and z+/z- present only for finite
// bounds. Its simplex multipliers are -x.
class DualProgram {
 public:
  DualProgram(const LinearProgram& lp, const SimplexOptions& options)
      : simplex_(lp.num_variables(), cost_bounds(lp),
                 to_options(options, lp.num_variables(), lp.num_rows())) {
    for (int i = 0; i < lp.num_rows(); ++i) add_row_column(lp.rows()[i]);
    for (int j = 0; j < lp.num_variables(); ++j) {
      const Variable& v = lp.variables()[j];
      if (std::isfinite(v.lower)) simplex_.add_column({{j, 1.0}}, 0.0, kInf, -v.lower);
      if (std::isfinite(v.upper)) simplex_.add_column({{j, -1.0}}, 0.0, kInf, v.upper);
    }
  }

  void add_row_column(const Row& r) {
    const auto [lo, hi] = multiplier_bounds(r.sense);
    row_columns_.push_back(simplex_.add_column(merged_terms(r), lo, hi, -r.rhs));
  }

  // Primal solution; status kInfeasible of the dual is reported as
  // kIterationLimit here and resolved by the caller.
  LpSolution solve(const LinearProgram& lp) {
    LpSolution sol;
    const auto result = simplex_.solve();
    sol.iterations = simplex_.iterations();
    switch (result) {
      case BoundedSimplex::Result::kOptimal: {
        sol.status = LpStatus::kOptimal;
        const auto& pi = simplex_.multipliers();
        sol.values.resize(lp.num_variables());
        for (int j = 0; j < lp.num_variables(); ++j) sol.values[j] = -pi(j);
        sol.row_duals.resize(row_columns_.size());
        for (std::size_t i = 0; i < row_columns_.size(); ++i) {
          sol.row_duals[i] = simplex_.value(row_columns_[i]);
        }
        break;
      }
      case BoundedSimplex::Result::kUnbounded:
        sol.status = LpStatus::kInfeasible;
        break;
      case BoundedSimplex::Result::kInfeasible:
        sol.status = LpStatus::kIterationLimit;
        sol.diagnostics = "dual infeasible";
        break;
      case BoundedSimplex::Result::kIterationLimit:
        sol.status = LpStatus::kIterationLimit;
        sol.diagnostics = "dual simplex hit the iteration limit";
        break;
    }
    return finish(lp, std::move(sol));
  }

 private:
  static std::vector<std::pair<double, double>> cost_bounds(const LinearProgram& lp) {
    std::vector<std::pair<double, double>> b;
    b.reserve(lp.variables().size());
    for (const Variable& v : lp.variables()) b.emplace_back(v.cost, v.cost);
    return b;
  }

  BoundedSimplex simplex_;
  std::vector<int> row_columns_;

};

namespace {

bool needs_primal_fallback(const LpSolution& sol) {
  if (sol.status == LpStatus::kOptimal) return sol.max_violation > kLpFeasibilityTol;
  return sol.diagnostics == "dual infeasible";
}

LpSolution solve_dualized(const LinearProgram& lp, const SimplexOptions& options) {
  DualProgram dual(lp, options);
  LpSolution sol = dual.solve(lp);
  if (needs_primal_fallback(sol)) {
    LpSolution primal = solve_primal(lp, options);
    primal.iterations += sol.iterations;
    primal.diagnostics = "dualized route fell back to primal";
    return primal;
  }
  return sol;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  LpMethod method = options.method;
  if (method == LpMethod::kAuto) {
    method = lp.num_rows() > 2 * lp.num_variables() ? LpMethod::kDualized : LpMethod::kPrimal;
  }
  if (lp.num_rows() == 0 || lp.num_variables() == 0) method = LpMethod::kPrimal;
  return method == LpMethod::kDualized ? solve_dualized(lp, options) : solve_primal(lp, options);
}

IncrementalLp::IncrementalLp(LinearProgram lp, SimplexOptions options)
    : lp_(std::move(lp)), options_(options),
      dual_(std::make_unique<DualProgram>(lp_, options_)) {}

IncrementalLp::~IncrementalLp() = default;
IncrementalLp::IncrementalLp(IncrementalLp&&) noexcept = default;
IncrementalLp& IncrementalLp::operator=(IncrementalLp&&) noexcept = default;

int IncrementalLp::add_row(Row row) {
  const int index = lp_.add_row(std::move(row));
  dual_->add_row_column(lp_.rows()[index]);
  return index;
}

LpSolution IncrementalLp::solve() {
  LpSolution sol = dual_->solve(lp_);
  if (needs_primal_fallback(sol)) {
    LpSolution primal = solve_primal(lp_, options_);
    primal.iterations += sol.iterations;
    primal.diagnostics = "incremental route fell back to primal";
    return primal;
  }
  return sol;
}

}  // namespace plb
