#pragma once

#include <span>
#include <vector>

#include "cgpp/core.hpp"
#include "cgpp/lp.hpp"

namespace cgpp {

struct PlannerConfig {
  int max_colgen_iters = 400;
  // Branch-and-bound nodes explored beyond the root; 0 keeps the
  // ceiling-rounded LP solution.
  int ip_node_limit = 64;
  double lp_tolerance = 1e-7;
  // When the complete set of maximal patterns fits this budget it is added
  // to the integer step's pool. Column generation can stop at a degenerate
  // LP optimum whose pool misses integer-critical patterns; the complete
  // pool makes the covering step exact on small problems. 0 disables it.
  int enumeration_budget = 512;
};

// Config used for offline/oracle planning, where integer optimality matters
// more than latency.
PlannerConfig offline_planner_config();

// One max-count singleton pattern per demanded type: floor(B / s_t) items.
std::vector<Pattern> initial_patterns(std::span<const double> demands,
                                      const Instance& instance);

struct PlanResult {
  Plan plan;
  std::vector<Pattern> patterns;       // full generated pool
  std::vector<double> final_duals;     // shadow prices of the last LP solve
  double lp_objective = 0.0;
  std::vector<double> lp_objective_trace;  // per column-generation iteration
  int colgen_iterations = 0;
  bool iteration_capped = false;
};

// Column generation over the covering LP followed by a depth-first
// branch-and-bound over the generated pool (price-and-branch). Branches on
// the most fractional quota, exploring the ceil child first; nodes re-use the
// parent basis. When the node limit stops the search, the incumbent seeded by
// ceiling-rounding the root LP is returned, so the plan always covers the
// demands. Entries with zero quota are dropped.
PlanResult generate_plan(std::span<const double> demands, const Instance& instance,
                         const PlannerConfig& config);

// Integer covering over a fixed pattern pool; exposed separately so the
// branch-and-bound can be exercised without column generation.
std::vector<int> solve_integer_plan(const std::vector<Pattern>& patterns,
                                    std::span<const double> demands, const Instance& instance,
                                    const PlannerConfig& config);

struct OfflineResult {
  PackingSolution solution;
  PlanResult plan;
};

// Plans against the exact demand counts of the whole sequence and then
// materialises bins greedily in arrival order: each item goes to the first
// open bin with a free slot for its type, opening the first plan entry with
// remaining quota otherwise.
OfflineResult solve_offline(const Instance& instance,
                            const PlannerConfig& config = offline_planner_config());

}  // namespace cgpp
