#include "cgpp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cgpp {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr long long kRefactorEvery = 128;
}  // namespace

RmpSolver::RmpSolver(int num_types) : num_types_(num_types), demands_(num_types, 0.0) {
  if (num_types <= 0) {
    throw std::invalid_argument("lp: number of types must be positive");
  }
}

void RmpSolver::set_demands(std::vector<double> demands) {
  if (static_cast<int>(demands.size()) != num_types_) {
    throw std::invalid_argument("lp: demand vector length mismatch");
  }
  for (double q : demands) {
    if (!std::isfinite(q)) throw std::invalid_argument("lp: demands must be finite");
  }
  demands_ = std::move(demands);
}

int RmpSolver::add_column(const Pattern& pattern) {
  if (static_cast<int>(pattern.counts.size()) != num_types_) {
    throw std::invalid_argument("lp: pattern length mismatch");
  }
  int row = static_cast<int>(pattern_rows_.size());
  pattern_rows_.push_back(pattern.counts);
  int slack = total_vars();
  extras_.push_back(ExtraVar{true, row, 0.0});
  slack_var_.push_back(slack);
  basis_row_.push_back(-1);
  rhs_.push_back(1.0);

  if (started_) {
    // Grow the basis with the new row's slack. With B' = [[B, 0], [a_B', 1]]
    // the inverse is [[Binv, 0], [-a_B' * Binv, 1]].
    int r_old = row;  // previous row count
    std::vector<double> a_basis(r_old, 0.0);
    for (int r = 0; r < r_old; ++r) {
      int var = basis_[r];
      a_basis[r] = var < num_types_ ? static_cast<double>(pattern.counts[var]) : 0.0;
    }
    std::vector<double> grown(static_cast<size_t>(row + 1) * (row + 1), 0.0);
    for (int r = 0; r < r_old; ++r) {
      for (int g = 0; g < r_old; ++g) {
        grown[static_cast<size_t>(r) * (row + 1) + g] = binv_[static_cast<size_t>(r) * r_old + g];
      }
    }
    double new_val = rhs_[row];
    for (int g = 0; g < r_old; ++g) {
      double w = 0.0;
      for (int r = 0; r < r_old; ++r) {
        w += a_basis[r] * binv_[static_cast<size_t>(r) * r_old + g];
      }
      grown[static_cast<size_t>(row) * (row + 1) + g] = -w;
    }
    grown[static_cast<size_t>(row) * (row + 1) + row] = 1.0;
    for (int r = 0; r < r_old; ++r) new_val -= a_basis[r] * basic_val_[r];
    binv_ = std::move(grown);
    basic_val_.push_back(new_val);
    basis_.push_back(slack);
    basis_row_[slack] = row;
  }
  return row;
}

void RmpSolver::add_upper_bound(int column, double bound) {
  if (column < 0 || column >= num_columns()) {
    throw std::invalid_argument("lp: upper bound on unknown column");
  }
  if (bound < 0) {
    throw std::invalid_argument("lp: negative upper bound");
  }
  extras_.push_back(ExtraVar{false, column, bound});
  basis_row_.push_back(-1);
}

double RmpSolver::var_cost(int var) const {
  if (var < num_types_) return -demands_[var];
  return extras_[var - num_types_].cost;
}

double RmpSolver::column_entry(int var, int row) const {
  if (var < num_types_) return pattern_rows_[row][var];
  const ExtraVar& e = extras_[var - num_types_];
  if (e.pattern_row != row) return 0.0;
  return e.is_slack ? 1.0 : -1.0;
}

void RmpSolver::compute_multipliers(std::vector<double>& y) const {
  int rows = num_columns();
  y.assign(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    double c = var_cost(basis_[r]);
    if (c == 0.0) continue;
    const double* binv_row = &binv_[static_cast<size_t>(r) * rows];
    for (int g = 0; g < rows; ++g) y[g] += c * binv_row[g];
  }
}

double RmpSolver::reduced_cost(int var, const std::vector<double>& y) const {
  double rc = var_cost(var);
  if (var < num_types_) {
    for (int g = 0; g < num_columns(); ++g) {
      int cnt = pattern_rows_[g][var];
      if (cnt) rc -= y[g] * cnt;
    }
  } else {
    const ExtraVar& e = extras_[var - num_types_];
    rc -= (e.is_slack ? 1.0 : -1.0) * y[e.pattern_row];
  }
  return rc;
}

void RmpSolver::apply_column(int var, std::vector<double>& out) const {
  int rows = num_columns();
  out.assign(rows, 0.0);
  if (var < num_types_) {
    for (int g = 0; g < rows; ++g) {
      int cnt = pattern_rows_[g][var];
      if (!cnt) continue;
      for (int r = 0; r < rows; ++r) {
        out[r] += cnt * binv_[static_cast<size_t>(r) * rows + g];
      }
    }
  } else {
    const ExtraVar& e = extras_[var - num_types_];
    double sign = e.is_slack ? 1.0 : -1.0;
    for (int r = 0; r < rows; ++r) {
      out[r] = sign * binv_[static_cast<size_t>(r) * rows + e.pattern_row];
    }
  }
}

void RmpSolver::pivot(int row, int var, const std::vector<double>& direction) {
  int rows = num_columns();
  double piv = direction[row];
  if (std::fabs(piv) < kPivotTol) {
    throw NumericError("lp: pivot element vanished");
  }
  double inv = 1.0 / piv;
  double* prow = &binv_[static_cast<size_t>(row) * rows];
  for (int g = 0; g < rows; ++g) prow[g] *= inv;
  basic_val_[row] *= inv;
  for (int r = 0; r < rows; ++r) {
    if (r == row) continue;
    double f = direction[r];
    if (f == 0.0) continue;
    double* rrow = &binv_[static_cast<size_t>(r) * rows];
    for (int g = 0; g < rows; ++g) rrow[g] -= f * prow[g];
    basic_val_[r] -= f * basic_val_[row];
  }
  basis_row_[basis_[row]] = -1;
  basis_[row] = var;
  basis_row_[var] = row;
  if (++pivots_since_refactor_ >= kRefactorEvery) refactorize();
}

void RmpSolver::cold_start() {
  int rows = num_columns();
  basis_ = slack_var_;
  basis_row_.assign(total_vars(), -1);
  for (int r = 0; r < rows; ++r) basis_row_[basis_[r]] = r;
  binv_.assign(static_cast<size_t>(rows) * rows, 0.0);
  for (int r = 0; r < rows; ++r) binv_[static_cast<size_t>(r) * rows + r] = 1.0;
  basic_val_ = rhs_;
  started_ = true;
  pivots_since_refactor_ = 0;
}

void RmpSolver::refactorize() {
  int rows = num_columns();
  // Gauss-Jordan inversion of the basis matrix with partial pivoting.
  std::vector<double> work(static_cast<size_t>(rows) * 2 * rows, 0.0);
  int stride = 2 * rows;
  for (int r = 0; r < rows; ++r) {
    for (int g = 0; g < rows; ++g) {
      work[static_cast<size_t>(g) * stride + r] = column_entry(basis_[r], g);
    }
    work[static_cast<size_t>(r) * stride + rows + r] = 1.0;
  }
  for (int col = 0; col < rows; ++col) {
    int best = col;
    for (int r = col + 1; r < rows; ++r) {
      if (std::fabs(work[static_cast<size_t>(r) * stride + col]) >
          std::fabs(work[static_cast<size_t>(best) * stride + col])) {
        best = r;
      }
    }
    double piv = work[static_cast<size_t>(best) * stride + col];
    if (std::fabs(piv) < 1e-12) {
      // Accumulated roundoff left the basis numerically dependent. The slack
      // basis is always feasible, so restart from it and let the caller's
      // simplex loop re-optimise instead of giving up.
      cold_start();
      return;
    }
    if (best != col) {
      for (int g = 0; g < stride; ++g) {
        std::swap(work[static_cast<size_t>(best) * stride + g],
                  work[static_cast<size_t>(col) * stride + g]);
      }
    }
    double inv = 1.0 / piv;
    for (int g = 0; g < stride; ++g) work[static_cast<size_t>(col) * stride + g] *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == col) continue;
      double f = work[static_cast<size_t>(r) * stride + col];
      if (f == 0.0) continue;
      for (int g = 0; g < stride; ++g) {
        work[static_cast<size_t>(r) * stride + g] -= f * work[static_cast<size_t>(col) * stride + g];
      }
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int g = 0; g < rows; ++g) {
      binv_[static_cast<size_t>(r) * rows + g] = work[static_cast<size_t>(r) * stride + rows + g];
    }
  }
  refresh_basic_values();
  pivots_since_refactor_ = 0;
}

void RmpSolver::refresh_basic_values() {
  int rows = num_columns();
  for (int r = 0; r < rows; ++r) {
    double v = 0.0;
    const double* row = &binv_[static_cast<size_t>(r) * rows];
    for (int g = 0; g < rows; ++g) v += row[g] * rhs_[g];
    basic_val_[r] = v;
  }
}

void RmpSolver::perturbed_restart(long long& pivots, long long pivot_cap, long long bland_after) {
  int rows = num_columns();
  for (int r = 0; r < rows; ++r) {
    rhs_[r] = 1.0 + 1e-7 * (r + 1) / rows;
  }
  try {
    cold_start();
    primal_loop(pivots, pivot_cap, bland_after);
    std::fill(rhs_.begin(), rhs_.end(), 1.0);
    refresh_basic_values();
    dual_loop(pivots, pivot_cap, bland_after);
    primal_loop(pivots, pivot_cap, bland_after);
  } catch (...) {
    std::fill(rhs_.begin(), rhs_.end(), 1.0);
    refresh_basic_values();
    throw;
  }
}

void RmpSolver::primal_loop(long long& pivots, long long pivot_cap, long long bland_after) {
  int rows = num_columns();
  double max_abs_demand = 0.0;
  for (double q : demands_) max_abs_demand = std::max(max_abs_demand, std::fabs(q));
  double rc_tol = 1e-9 * (1.0 + max_abs_demand);

  std::vector<double> y, rc(total_vars()), direction;
  while (true) {
    if (pivots > pivot_cap) throw NumericError("lp: pivot budget exceeded");
    compute_multipliers(y);
    // Reduced costs for shadow-price variables, accumulated row by row.
    for (int t = 0; t < num_types_; ++t) rc[t] = var_cost(t);
    for (int g = 0; g < rows; ++g) {
      double yg = y[g];
      if (yg == 0.0) continue;
      const std::vector<int>& counts = pattern_rows_[g];
      for (int t = 0; t < num_types_; ++t) {
        if (counts[t]) rc[t] -= yg * counts[t];
      }
    }
    for (int e = 0; e < static_cast<int>(extras_.size()); ++e) {
      const ExtraVar& ev = extras_[e];
      rc[num_types_ + e] = ev.cost - (ev.is_slack ? 1.0 : -1.0) * y[ev.pattern_row];
    }

    bool bland = pivots >= bland_after;
    int enter = -1;
    double best = -rc_tol;
    for (int v = 0; v < total_vars(); ++v) {
      if (basis_row_[v] >= 0) continue;
      if (rc[v] < best) {
        enter = v;
        if (bland) break;
        best = rc[v];
      }
    }
    if (enter < 0) return;  // optimal

    apply_column(enter, direction);
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r) {
      if (direction[r] <= kPivotTol) continue;
      double ratio = basic_val_[r] / direction[r];
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && (leave < 0 || basis_[r] < basis_[leave]))) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave < 0) {
      throw InfeasibleError("lp: demands cannot be covered within the active bounds");
    }
    pivot(leave, enter, direction);
    ++pivots;
  }
}

void RmpSolver::dual_loop(long long& pivots, long long pivot_cap, long long bland_after) {
  int rows = num_columns();
  std::vector<double> y, direction, alpha(total_vars());
  while (true) {
    int leave = -1;
    double most_negative = -kFeasTol;
    for (int r = 0; r < rows; ++r) {
      if (basic_val_[r] < most_negative) {
        most_negative = basic_val_[r];
        leave = r;
      }
    }
    if (leave < 0) return;  // primal feasible again
    if (pivots > pivot_cap) throw NumericError("lp: pivot budget exceeded");

    compute_multipliers(y);
    const double* rho = &binv_[static_cast<size_t>(leave) * rows];
    for (int t = 0; t < num_types_; ++t) alpha[t] = 0.0;
    for (int g = 0; g < rows; ++g) {
      double rg = rho[g];
      if (rg == 0.0) continue;
      const std::vector<int>& counts = pattern_rows_[g];
      for (int t = 0; t < num_types_; ++t) {
        if (counts[t]) alpha[t] += rg * counts[t];
      }
    }
    for (int e = 0; e < static_cast<int>(extras_.size()); ++e) {
      const ExtraVar& ev = extras_[e];
      alpha[num_types_ + e] = (ev.is_slack ? 1.0 : -1.0) * rho[ev.pattern_row];
    }

    (void)bland_after;  // ascending scan already breaks ties by variable index
    int enter = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int v = 0; v < total_vars(); ++v) {
      if (basis_row_[v] >= 0) continue;
      if (alpha[v] >= -kPivotTol) continue;
      double ratio = reduced_cost(v, y) / (-alpha[v]);
      if (enter < 0 || ratio < best_ratio - 1e-12) {
        best_ratio = ratio;
        enter = v;
      }
    }
    if (enter < 0) {
      throw InfeasibleError("lp: demands cannot be covered within the active bounds");
    }
    apply_column(enter, direction);
    pivot(leave, enter, direction);
    ++pivots;
  }
}

LpResult RmpSolver::solve() {
  int rows = num_columns();
  LpResult result;
  result.duals.assign(num_types_, 0.0);
  if (rows == 0) {
    for (double q : demands_) {
      if (q > 0) throw InfeasibleError("lp: positive demand with no columns");
    }
    return result;
  }
  for (int t = 0; t < num_types_; ++t) {
    if (demands_[t] <= 0) continue;
    bool covered = false;
    for (int g = 0; g < rows && !covered; ++g) covered = pattern_rows_[g][t] > 0;
    if (!covered) {
      throw InfeasibleError("lp: demanded type " + std::to_string(t + 1) +
                            " appears in no column");
    }
  }

  long long pivot_cap = 50LL * (num_types_ + rows);
  long long bland_after = 3LL * (rows + total_vars());
  long long pivots = 0;

  try {
    if (!started_) {
      cold_start();
    } else {
      bool infeasible = false;
      for (int r = 0; r < rows; ++r) infeasible |= basic_val_[r] < -kFeasTol;
      if (infeasible) {
        std::vector<double> y;
        compute_multipliers(y);
        bool dual_feasible = true;
        double max_abs_demand = 0.0;
        for (double q : demands_) max_abs_demand = std::max(max_abs_demand, std::fabs(q));
        double rc_tol = 1e-9 * (1.0 + max_abs_demand);
        for (int v = 0; v < total_vars() && dual_feasible; ++v) {
          if (basis_row_[v] >= 0) continue;
          dual_feasible = reduced_cost(v, y) >= -rc_tol;
        }
        if (dual_feasible) {
          dual_loop(pivots, pivot_cap, bland_after);
        } else {
          cold_start();  // basis salvageable by neither method
        }
      }
    }
    primal_loop(pivots, pivot_cap, bland_after);
  } catch (const NumericError&) {
    // Degenerate bases can stall either pivoting loop for thousands of
    // steps. Restart with perturbed row constants and a fresh budget.
    pivots = 0;
    perturbed_restart(pivots, pivot_cap, bland_after);
  }

  std::vector<double> y;
  compute_multipliers(y);
  result.primal.assign(rows, 0.0);
  double objective = 0.0;
  for (int g = 0; g < rows; ++g) {
    double z = -y[g];
    if (z < 0.0) z = 0.0;
    result.primal[g] = z;
    objective += z;
  }
  for (int t = 0; t < num_types_; ++t) {
    int r = basis_row_[t];
    double d = r >= 0 ? basic_val_[r] : 0.0;
    result.duals[t] = d < 0.0 ? 0.0 : d;
  }
  result.objective = objective;
  return result;
}

LpResult solve_rmp_lp(const RmpLp& problem) {
  if (problem.demands.empty()) {
    throw std::invalid_argument("lp: empty demand vector");
  }
  for (double q : problem.demands) {
    if (q < 0) throw std::invalid_argument("lp: negative demand");
  }
  RmpSolver solver(static_cast<int>(problem.demands.size()));
  solver.set_demands(problem.demands);
  for (const Pattern& p : problem.columns) solver.add_column(p);
  return solver.solve();
}

}  // namespace cgpp
