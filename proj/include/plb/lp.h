#ifndef PLB_LP_H
#define PLB_LP_H

#include <memory>
#include <string>
#include <vector>

namespace plb {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<LinearTerm> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

struct Variable {
  double lower = 0.0;
  double upper = 0.0;
  double cost = 0.0;
  std::string name;
};

// Minimization LP with bounded variables and sparse rows.
class LinearProgram {
 public:
  int add_variable(double lower, double upper, double cost, std::string name = {});
  // Throws InvalidParameter on an unknown variable index or non-finite data.
  int add_row(Row row);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Row>& rows() const { return rows_; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  Variable& variable(int j) { return variables_[j]; }
  double objective_value(const std::vector<double>& x) const;

  // CPLEX LP-format text, for cross-checking with external tools.
  std::string to_lp_format() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Row> rows_;
};

// Copy of lp with one more row.
LinearProgram with_row(LinearProgram lp, Row row);

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  std::vector<double> values;
  std::vector<double> row_duals;
  double objective = 0.0;
  int iterations = 0;
  // Largest scaled row or bound violation found by the post-solve row scan.
  double max_violation = 0.0;
  std::string diagnostics;
};

enum class LpMethod {
  kAuto,      // dualized when rows outnumber columns by 2x, primal otherwise
  kPrimal,    // bounded primal simplex on the program as given
  kDualized,  // bounded primal simplex on the dual program
};

struct SimplexOptions {
  LpMethod method = LpMethod::kAuto;
  int max_iterations = 0;  // 0 picks a size-based default
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  int refactor_interval = 64;
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

// Largest violation of rows (scaled by 1 + |rhs|) and bounds (scaled by
// 1 + |bound|) at x. Independent of the solver.
double max_violation(const LinearProgram& lp, const std::vector<double>& x);
inline constexpr double kLpFeasibilityTol = 1e-8;

// Interface for substituting another LP engine behind the same contract.
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual LpSolution solve(const LinearProgram& lp) = 0;
};

class SimplexBackend : public LpBackend {
 public:
  explicit SimplexBackend(SimplexOptions options = {}) : options_(options) {}
  LpSolution solve(const LinearProgram& lp) override { return solve_lp(lp, options_); }

 private:
  SimplexOptions options_;
};

class DualProgram;

// Row-generation LP: the variable set is fixed at construction and rows are
// only appended. Keeps the basis of the dual program between solves, so a
// re-solve after adding cuts starts from the previous optimum.
class IncrementalLp {
 public:
  explicit IncrementalLp(LinearProgram lp, SimplexOptions options = {});
  ~IncrementalLp();
  IncrementalLp(IncrementalLp&&) noexcept;
  IncrementalLp& operator=(IncrementalLp&&) noexcept;

  int add_row(Row row);
  LpSolution solve();
  const LinearProgram& program() const { return lp_; }

 private:
  LinearProgram lp_;
  SimplexOptions options_;
  std::unique_ptr<DualProgram> dual_;
};

}  // namespace plb

#endif  // PLB_LP_H
