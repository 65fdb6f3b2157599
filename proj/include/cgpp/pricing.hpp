#pragma once

#include <span>
#include <vector>

#include "cgpp/core.hpp"

namespace cgpp {

struct PricingResult {
  Pattern pattern;           // best pattern; all-zero when no price is positive
  double value = 0.0;        // sum of duals collected by the pattern
  double reduced_cost = 1.0; // 1 - value
};

// Pricing subproblem of the covering formulation: find the pattern maximising
// the dual value of its items subject to the capacity, i.e. an unbounded
// integer knapsack over item types. dp[c] = max(dp[c-1], max_t dp[c-s_t]+d_t)
// for capacities c = 0..B. Reconstruction prefers "no item" on ties and then
// the lowest type id, so the result is deterministic; with all-zero duals the
// returned pattern is empty, which column generation treats as its stopping
// sentinel and never adds to the pattern pool.
PricingResult solve_pricing(std::span<const double> duals, const Instance& instance);

}  // namespace cgpp
