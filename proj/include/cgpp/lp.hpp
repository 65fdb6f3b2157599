#pragma once

#include <stdexcept>
#include <vector>

#include "cgpp/core.hpp"

namespace cgpp {

// Raised when a restricted master problem cannot cover its demands.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when the simplex loop exceeds its pivot budget.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Restricted master problem: min sum(z) subject to
//   sum_h pattern[h].counts[t] * z[h] >= demands[t]   for every type t
//   z >= 0
struct RmpLp {
  std::vector<Pattern> columns;
  std::vector<double> demands;
};

struct LpResult {
  std::vector<double> primal;  // z, one entry per column
  std::vector<double> duals;   // shadow price per type
  double objective = 0.0;
};

// Solves the covering LP above with a revised simplex method applied to its
// dual standard form:
//
//   max q'd  s.t.  P'd <= 1, d >= 0
//
// where P is the pattern matrix. The dual form always admits the slack basis
// as a feasible start (pattern costs are 1), so no phase-one is needed; the
// covering primal z is recovered from the simplex multipliers and the shadow
// prices d are the dual-form variables themselves.
//
// The solver is stateful so that column generation can append patterns and
// re-optimise from the previous basis: a new pattern adds one row to the dual
// form and the basis is repaired with dual simplex pivots. Branch-and-bound
// uses set_demands (objective change only) and add_upper_bound (new dual-form
// variable), both of which keep the current basis feasible and re-optimise
// with ordinary primal pivots.
//
// Pricing uses Dantzig's rule and switches to Bland's rule once the pivot
// count passes 3 * (rows + columns); a solve gives up with NumericError after
// 50 * (num_types + num_columns) pivots.
class RmpSolver {
 public:
  explicit RmpSolver(int num_types);

  void set_demands(std::vector<double> demands);
  int add_column(const Pattern& pattern);  // returns the column index
  // Adds the bound z[column] <= bound to the covering problem.
  void add_upper_bound(int column, double bound);

  int num_types() const { return num_types_; }
  int num_columns() const { return static_cast<int>(pattern_rows_.size()); }

  // Re-optimises from the current state. Throws InfeasibleError when some
  // positive demand is covered by no column or the bounds cut off all covers.
  LpResult solve();

 private:
  // Dual-form variables are indexed: [0, T) shadow prices, then one entry of
  // extras_ per slack or bound variable in creation order.
  struct ExtraVar {
    bool is_slack = true;  // otherwise an upper-bound variable
    int pattern_row = 0;   // dual-form row the +/-1 coefficient lives in
    double cost = 0.0;     // dual-form objective coefficient
  };

  int total_vars() const { return num_types_ + static_cast<int>(extras_.size()); }
  double var_cost(int var) const;
  double column_entry(int var, int row) const;  // dual-form constraint matrix
  void compute_multipliers(std::vector<double>& y) const;
  double reduced_cost(int var, const std::vector<double>& y) const;
  void apply_column(int var, std::vector<double>& out) const;  // out = Binv * a_var
  void pivot(int row, int var, const std::vector<double>& direction);
  void cold_start();
  void refactorize();
  void refresh_basic_values();  // basic_val_ = Binv * rhs
  void primal_loop(long long& pivots, long long pivot_cap, long long bland_after);
  void dual_loop(long long& pivots, long long pivot_cap, long long bland_after);
  // Anti-stalling rescue: re-solve from a cold basis with slightly perturbed
  // row constants (no ratio ties, so no degenerate stalling), then restore
  // the exact constants and repair with dual pivots.
  void perturbed_restart(long long& pivots, long long pivot_cap, long long bland_after);

  int num_types_ = 0;
  std::vector<double> demands_;
  std::vector<std::vector<int>> pattern_rows_;  // per dual-form row: type counts
  std::vector<ExtraVar> extras_;
  std::vector<int> slack_var_;  // per row, variable index of its slack
  std::vector<double> rhs_;     // dual-form row constants, 1 unless perturbed

  bool started_ = false;
  std::vector<int> basis_;        // per row, basic variable index
  std::vector<int> basis_row_;    // per variable, row it is basic in, else -1
  std::vector<double> binv_;      // row-major rows x rows
  std::vector<double> basic_val_;
  long long pivots_since_refactor_ = 0;
};

// One-shot convenience wrapper around RmpSolver.
LpResult solve_rmp_lp(const RmpLp& problem);

}  // namespace cgpp
