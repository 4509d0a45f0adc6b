#include "plb/simplex.h"

#include <algorithm>
#include <cstdint>
#include <cmath>

namespace plb {

BoundedSimplex::BoundedSimplex(int num_rows, std::vector<std::pair<double, double>> row_bounds,
                               Options options)
    : m_(num_rows), opts_(options), row_bounds_(std::move(row_bounds)) {}

int BoundedSimplex::add_column(const std::vector<std::pair<int, double>>& entries, double lower,
                               double upper, double cost) {
  cols_.push_back(Column{entries, lower, upper, cost});
  return static_cast<int>(cols_.size()) - 1;
}

double BoundedSimplex::lower(int j) const {
  const int n = static_cast<int>(cols_.size());
  const double lo = j < n ? cols_[j].lower : row_bounds_[j - n].first;
  return perturbed_ && std::isfinite(lo) ? lo - shift_[j] : lo;
}

double BoundedSimplex::upper(int j) const {
  const int n = static_cast<int>(cols_.size());
  const double hi = j < n ? cols_[j].upper : row_bounds_[j - n].second;
  return perturbed_ && std::isfinite(hi) ? hi + shift_[j] : hi;
}

void BoundedSimplex::snap_nonbasic() {
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == State::kAtLower) x_[j] = lower(j);
    else if (state_[j] == State::kAtUpper) x_[j] = upper(j);
  }
  recompute_basic();
}

void BoundedSimplex::set_perturbation(bool on, double magnitude) {
  if (on) {
    // widen every finite bound by a distinct small amount so that ties in
    // the ratio test disappear
    std::uint64_t state = 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(magnitude * 1e9);
    shift_.resize(total());
    for (int j = 0; j < total(); ++j) {
      state ^= state >> 30;
      state *= 0xbf58476d1ce4e5b9ULL;
      state ^= state >> 27;
      const double u = 0.5 + 0.5 * static_cast<double>(state >> 11) * 0x1.0p-53;
      const int n = static_cast<int>(cols_.size());
      const double lo = j < n ? cols_[j].lower : row_bounds_[j - n].first;
      const double hi = j < n ? cols_[j].upper : row_bounds_[j - n].second;
      const double scale = std::max(std::isfinite(lo) ? std::abs(lo) : 0.0,
                                    std::isfinite(hi) ? std::abs(hi) : 0.0);
      shift_[j] = magnitude * u * (1.0 + scale);
    }
  }
  perturbed_ = on;
  snap_nonbasic();
}

double BoundedSimplex::cost(int j) const {
  return j < static_cast<int>(cols_.size()) ? cols_[j].cost : 0.0;
}

double BoundedSimplex::column_dot(int j, const Eigen::VectorXd& v) const {
  const int n = static_cast<int>(cols_.size());
  if (j >= n) return -v(j - n);
  double s = 0.0;
  for (const auto& [row, val] : cols_[j].entries) s += val * v(row);
  return s;
}

void BoundedSimplex::column_into(int j, Eigen::VectorXd& out) const {
  // out = Binv * a_j
  const int n = static_cast<int>(cols_.size());
  if (j >= n) {
    out = -binv_.col(j - n);
    return;
  }
  out.setZero(m_);
  for (const auto& [row, val] : cols_[j].entries) out.noalias() += val * binv_.col(row);
}

double BoundedSimplex::objective() const {
  double v = 0.0;
  for (std::size_t j = 0; j < cols_.size(); ++j) v += cols_[j].cost * x_[j];
  return v;
}

double BoundedSimplex::phase_objective(bool phase1) const {
  if (!phase1) return objective();
  double v = 0.0;
  for (int i = 0; i < m_; ++i) {
    const int j = head_[i];
    v += std::max(0.0, lower(j) - x_[j]) + std::max(0.0, x_[j] - upper(j));
  }
  return v;
}

int BoundedSimplex::infeasibility_sign(int j) const {
  const double lo = lower(j);
  const double hi = upper(j);
  if (x_[j] < lo - tol_for(lo)) return -1;
  if (x_[j] > hi + tol_for(hi)) return 1;
  return 0;
}

void BoundedSimplex::ensure_layout() {
  const int n = static_cast<int>(cols_.size());
  if (!initialized_) {
    state_.assign(n + m_, State::kAtLower);
    x_.assign(n + m_, 0.0);
    head_.resize(m_);
    pos_.assign(n + m_, -1);
    for (int j = 0; j < n; ++j) {
      const double lo = cols_[j].lower;
      const double hi = cols_[j].upper;
      if (std::isfinite(lo) && (!std::isfinite(hi) || std::abs(lo) <= std::abs(hi))) {
        state_[j] = State::kAtLower;
        x_[j] = lo;
      } else if (std::isfinite(hi)) {
        state_[j] = State::kAtUpper;
        x_[j] = hi;
      } else {
        state_[j] = State::kFreeZero;
        x_[j] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      head_[i] = n + i;
      pos_[n + i] = i;
      state_[n + i] = State::kBasic;
    }
    binv_ = -Eigen::MatrixXd::Identity(m_, m_);
    initialized_ = true;
    layout_cols_ = n;
    recompute_basic();
    return;
  }
  if (layout_cols_ == n) return;
  // Columns appended since the last solve: insert them before the logicals.
  const int added = n - layout_cols_;
  std::vector<State> state(n + m_);
  std::vector<double> x(n + m_);
  std::vector<int> pos(n + m_, -1);
  for (int j = 0; j < layout_cols_; ++j) {
    state[j] = state_[j];
    x[j] = x_[j];
    pos[j] = pos_[j];
  }
  for (int i = 0; i < m_; ++i) {
    state[n + i] = state_[layout_cols_ + i];
    x[n + i] = x_[layout_cols_ + i];
    pos[n + i] = pos_[layout_cols_ + i];
  }
  for (int j = layout_cols_; j < n; ++j) {
    const double lo = cols_[j].lower;
    const double hi = cols_[j].upper;
    if (std::isfinite(lo) && (!std::isfinite(hi) || std::abs(lo) <= std::abs(hi))) {
      state[j] = State::kAtLower;
      x[j] = lo;
    } else if (std::isfinite(hi)) {
      state[j] = State::kAtUpper;
      x[j] = hi;
    } else {
      state[j] = State::kFreeZero;
      x[j] = 0.0;
    }
  }
  for (int& h : head_) {
    if (h >= layout_cols_) h += added;
  }
  state_ = std::move(state);
  x_ = std::move(x);
  pos_ = std::move(pos);
  layout_cols_ = n;
  recompute_basic();
}

void BoundedSimplex::refactor() {
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m_, m_);
  const int n = static_cast<int>(cols_.size());
  for (int i = 0; i < m_; ++i) {
    const int j = head_[i];
    if (j >= n) {
      basis(j - n, i) = -1.0;
    } else {
      for (const auto& [row, val] : cols_[j].entries) basis(row, i) += val;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
  binv_ = lu.inverse();
  since_refactor_ = 0;
}

void BoundedSimplex::recompute_basic() {
  // B x_B = -N x_N
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  const int n = static_cast<int>(cols_.size());
  for (int j = 0; j < n + m_; ++j) {
    if (state_[j] == State::kBasic || x_[j] == 0.0) continue;
    if (j >= n) {
      rhs(j - n) += x_[j];
    } else {
      for (const auto& [row, val] : cols_[j].entries) rhs(row) -= val * x_[j];
    }
  }
  const Eigen::VectorXd xb = binv_ * rhs;
  for (int i = 0; i < m_; ++i) x_[head_[i]] = xb(i);
}

BoundedSimplex::Result BoundedSimplex::solve() {
  ensure_layout();
  refactor();
  recompute_basic();
  iterations_ = 0;

  const int n = static_cast<int>(cols_.size());
  const int total_vars = n + m_;
  Eigen::VectorXd cb(m_);
  Eigen::VectorXd alpha(m_);
  int degenerate_run = 0;
  bool bland = false;
  constexpr int kMaxPerturbations = 5;
  int perturbations = 0;
  bool perturb_pending = false;
  bool verified_once = false;
  auto finish = [this](Result r) {
    if (perturbed_) set_perturbation(false);
    return r;
  };

  while (true) {
    if (iterations_ >= opts_.max_iterations) return finish(Result::kIterationLimit);
    if (perturb_pending) {
      perturb_pending = false;
      // each new stall widens the bounds further
      set_perturbation(true, std::pow(10.0, perturbations - 7));
    }
    if (since_refactor_ >= opts_.refactor_interval) {
      refactor();
      recompute_basic();
    }

    bool phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const int s = infeasibility_sign(head_[i]);
      cb(i) = static_cast<double>(s);
      if (s != 0) phase1 = true;
    }
    if (!phase1) {
      for (int i = 0; i < m_; ++i) cb(i) = cost(head_[i]);
    }
    pi_ = binv_.transpose() * cb;

    // pricing
    int entering = -1;
    int direction = 0;
    double best = 0.0;
    for (int j = 0; j < total_vars; ++j) {
      const State st = state_[j];
      if (st == State::kBasic) continue;
      const double lo = lower(j);
      const double hi = upper(j);
      if (lo == hi) continue;
      const double d = (phase1 ? 0.0 : cost(j)) - column_dot(j, pi_);
      int dir = 0;
      if (st == State::kAtLower && d < -opts_.optimality_tol) dir = 1;
      else if (st == State::kAtUpper && d > opts_.optimality_tol) dir = -1;
      else if (st == State::kFreeZero && std::abs(d) > opts_.optimality_tol) dir = d < 0 ? 1 : -1;
      if (dir == 0) continue;
      if (bland) {
        entering = j;
        direction = dir;
        best = std::abs(d);
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = j;
        direction = dir;
      }
    }

    if (entering < 0) {
      // Confirm on a fresh factorization before declaring the outcome.
      if (!verified_once || since_refactor_ > 0) {
        refactor();
        recompute_basic();
        verified_once = true;
        continue;
      }
      if (perturbed_) {
        // finish on the true bounds from the basis found
        set_perturbation(false);
        verified_once = false;
        degenerate_run = 0;
        bland = false;
        continue;
      }
      return phase1 ? Result::kInfeasible : Result::kOptimal;
    }
    verified_once = false;

    column_into(entering, alpha);

    // Harris two-pass ratio test. Basic variable i moves at rate -direction * alpha(i).
    double theta_max = kInf;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha(i);
      if (std::abs(a) <= opts_.pivot_tol) continue;
      const int j = head_[i];
      const double rate = -direction * a;
      const double v = x_[j];
      const double lo = lower(j);
      const double hi = upper(j);
      const int inf = phase1 ? infeasibility_sign(j) : 0;
      // Bland's rule needs the exact minimum ratio to keep its guarantee
      const double slack_lo = bland ? 0.0 : tol_for(lo);
      const double slack_hi = bland ? 0.0 : tol_for(hi);
      double limit = kInf;
      if (rate > 0) {
        if (inf < 0) limit = (lo + slack_lo - v) / rate;
        else if (inf == 0 && std::isfinite(hi)) limit = (hi + slack_hi - v) / rate;
      } else {
        if (inf > 0) limit = (hi - slack_hi - v) / rate;
        else if (inf == 0 && std::isfinite(lo)) limit = (lo - slack_lo - v) / rate;
      }
      theta_max = std::min(theta_max, limit);
    }

    int leave_pos = -1;
    double step = kInf;
    bool leave_to_upper = false;
    if (std::isfinite(theta_max)) {
      double best_alpha = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha(i);
        if (std::abs(a) <= opts_.pivot_tol) continue;
        const int j = head_[i];
        const double rate = -direction * a;
        const double v = x_[j];
        const double lo = lower(j);
        const double hi = upper(j);
        const int inf = phase1 ? infeasibility_sign(j) : 0;
        double t = kInf;
        bool to_upper = false;
        if (rate > 0) {
          if (inf < 0) t = (lo - v) / rate;
          else if (inf == 0 && std::isfinite(hi)) {
            t = (hi - v) / rate;
            to_upper = true;
          }
        } else {
          if (inf > 0) {
            t = (hi - v) / rate;
            to_upper = true;
          } else if (inf == 0 && std::isfinite(lo)) {
            t = (lo - v) / rate;
          }
        }
        if (t > theta_max + (bland ? 1e-12 * (1.0 + std::abs(theta_max)) : 0.0)) continue;
        const bool better = bland ? (leave_pos < 0 || j < head_[leave_pos])
                                  : std::abs(a) > best_alpha;
        if (better) {
          best_alpha = std::abs(a);
          leave_pos = i;
          step = std::max(t, 0.0);
          leave_to_upper = to_upper;
        }
      }
    }

    const double span = upper(entering) - lower(entering);
    const bool flip = std::isfinite(span) && span <= step;
    if (leave_pos < 0 && !flip) {
      if (phase1) {
        // A phase-1 ray means the factorization has drifted.
        refactor();
        recompute_basic();
        ++iterations_;
        continue;
      }
      return finish(Result::kUnbounded);
    }
    if (flip) step = span;

    // move
    for (int i = 0; i < m_; ++i) x_[head_[i]] -= direction * alpha(i) * step;
    x_[entering] += direction * step;
    ++iterations_;
    ++since_refactor_;

    // progress of the phase objective, relative to its size
    if (best * step <= 1e-11 * (1.0 + std::abs(phase_objective(phase1)))) {
      if (++degenerate_run > opts_.degenerate_switch) {
        if (perturbations < kMaxPerturbations) {
          ++perturbations;
          perturb_pending = true;
          degenerate_run = 0;
        } else {
          bland = true;
        }
      }
    } else {
      degenerate_run = 0;
      bland = false;
    }

    if (flip) {
      state_[entering] = direction > 0 ? State::kAtUpper : State::kAtLower;
      x_[entering] = direction > 0 ? upper(entering) : lower(entering);
      continue;
    }

    const int leaving = head_[leave_pos];
    x_[leaving] = leave_to_upper ? upper(leaving) : lower(leaving);
    state_[leaving] = leave_to_upper ? State::kAtUpper : State::kAtLower;
    pos_[leaving] = -1;
    head_[leave_pos] = entering;
    pos_[entering] = leave_pos;
    state_[entering] = State::kBasic;

    // eta update of the basis inverse
    const double pivot = alpha(leave_pos);
    binv_.row(leave_pos) /= pivot;
    for (int i = 0; i < m_; ++i) {
      if (i == leave_pos || alpha(i) == 0.0) continue;
      binv_.row(i) -= alpha(i) * binv_.row(leave_pos);
    }
  }
}

}  // namespace plb
