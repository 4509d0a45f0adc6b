#ifndef PLB_SIMPLEX_H
#define PLB_SIMPLEX_H

#include <Eigen/Dense>
#include <limits>
#include <utility>
#include <vector>

namespace plb {

// Bounded-variable revised primal simplex over
//   min c'x  s.t.  A x - r = 0,  lo <= (x, r) <= hi
// where r holds one logical variable per row. The basis inverse is dense and
// refactorized periodically. Phase 1 minimizes the sum of bound
// infeasibilities of basic variables. Pricing is Dantzig, switching to
// bound perturbation, then Bland's rule, while the method stalls on
// degenerate pivots.
class BoundedSimplex {
 public:
  enum class Result { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

  struct Options {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    int refactor_interval = 64;
    int max_iterations = 100000;
    int degenerate_switch = 50;
  };

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // row_bounds: lower/upper bound of each row activity.
  BoundedSimplex(int num_rows, std::vector<std::pair<double, double>> row_bounds,
                 Options options);

  // Adds a structural column; entries are (row, value). Nonbasic at the
  // finite bound closest to zero (or zero when free). Allowed between
  // solves: the current basis stays valid.
  int add_column(const std::vector<std::pair<int, double>>& entries, double lower, double upper,
                 double cost);

  Result solve();

  int num_rows() const { return m_; }
  int num_structural() const { return static_cast<int>(cols_.size()); }
  double value(int structural) const { return x_[structural]; }
  double row_activity(int row) const { return x_[logical(row)]; }
  // Simplex multipliers of the rows at the last solve.
  const Eigen::VectorXd& multipliers() const { return pi_; }
  double objective() const;
  int iterations() const { return iterations_; }

 private:
  enum class State : unsigned char { kBasic, kAtLower, kAtUpper, kFreeZero };

  int logical(int row) const { return static_cast<int>(cols_.size()) + row; }
  int total() const { return static_cast<int>(cols_.size()) + m_; }
  double lower(int j) const;
  double upper(int j) const;
  double cost(int j) const;
  // Column j of [A -I] times a dense vector.
  double column_dot(int j, const Eigen::VectorXd& v) const;
  void column_into(int j, Eigen::VectorXd& out) const;

  void refactor();
  void recompute_basic();
  double tol_for(double bound) const { return opts_.feasibility_tol * (1.0 + std::abs(bound)); }
  // -1 below lower, +1 above upper, 0 feasible
  int infeasibility_sign(int j) const;
  // Moves nonbasic variables onto their current bounds and recomputes the basics.
  void snap_nonbasic();
  void set_perturbation(bool on, double magnitude = 0.0);
  // Sum of basic bound violations in phase 1, the objective otherwise.
  double phase_objective(bool phase1) const;
  // Maps structural column indices when columns are appended after rows.
  void ensure_layout();

  int m_;
  Options opts_;
  std::vector<std::pair<double, double>> row_bounds_;

  struct Column {
    std::vector<std::pair<int, double>> entries;
    double lower, upper, cost;
  };
  std::vector<Column> cols_;

  // Per variable (structural 0..n-1 then logical n..n+m-1).
  std::vector<State> state_;
  std::vector<double> x_;
  std::vector<int> head_;  // basic variable per basis position
  std::vector<int> pos_;   // basis position per variable or -1
  Eigen::MatrixXd binv_;
  Eigen::VectorXd pi_;
  bool initialized_ = false;
  int layout_cols_ = 0;  // structural count the state vectors were laid out for
  int iterations_ = 0;
  int since_refactor_ = 0;
  bool perturbed_ = false;
  std::vector<double> shift_;  // bound widening per variable while perturbed_
};

}  // namespace plb

#endif  // PLB_SIMPLEX_H
