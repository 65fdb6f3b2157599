#include "cgpp/pricing.hpp"

#include <stdexcept>

namespace cgpp {

PricingResult solve_pricing(std::span<const double> duals, const Instance& instance) {
  int num_types = instance.num_types();
  if (static_cast<int>(duals.size()) != num_types) {
    throw std::invalid_argument("pricing: dual vector length mismatch");
  }
  int capacity = instance.bin_capacity();

  std::vector<double> dp(capacity + 1, 0.0);
  std::vector<int> choice(capacity + 1, -1);  // type taken at capacity c, -1 = none
  for (int c = 1; c <= capacity; ++c) {
    double best = dp[c - 1];
    int pick = -1;
    for (int t = 0; t < num_types; ++t) {
      int s = instance.size_of(t);
      if (s > c) continue;
      double cand = dp[c - s] + duals[t];
      if (cand > best) {
        best = cand;
        pick = t;
      }
    }
    dp[c] = best;
    choice[c] = pick;
  }

  PricingResult result;
  result.pattern.counts.assign(num_types, 0);
  int c = capacity;
  while (c > 0) {
    int t = choice[c];
    if (t < 0) {
      --c;
    } else {
      result.pattern.counts[t]++;
      c -= instance.size_of(t);
    }
  }
  double value = 0.0;
  for (int t = 0; t < num_types; ++t) value += duals[t] * result.pattern.counts[t];
  result.value = value;
  result.reduced_cost = 1.0 - value;
  return result;
}

}  // namespace cgpp
