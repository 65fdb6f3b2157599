#include "cgpp/bounds.hpp"

#include <algorithm>
#include <stdexcept>

namespace cgpp {

long long l1_lower_bound(const Instance& instance) {
  long long total = instance.total_size();
  long long b = instance.bin_capacity();
  return (total + b - 1) / b;
}

long long l2_lower_bound(const Instance& instance) {
  long long b = instance.bin_capacity();
  // Histogram of item sizes with suffix counts/sums for O(1) range queries.
  std::vector<long long> count(b + 1, 0), size_sum(b + 1, 0);
  for (int idx : instance.sequence()) {
    int s = instance.size_of(idx);
    count[s]++;
    size_sum[s] += s;
  }
  std::vector<long long> cnt_from(b + 2, 0), sum_from(b + 2, 0);
  for (long long s = b; s >= 0; --s) {
    cnt_from[s] = cnt_from[s + 1] + count[s];
    sum_from[s] = sum_from[s + 1] + size_sum[s];
  }
  auto cnt_range = [&](long long lo, long long hi) {  // sizes in [lo, hi]
    if (lo > hi) return 0LL;
    lo = std::max(0LL, lo);
    return cnt_from[lo] - (hi + 1 <= b ? cnt_from[hi + 1] : 0);
  };
  auto sum_range = [&](long long lo, long long hi) {
    if (lo > hi) return 0LL;
    lo = std::max(0LL, lo);
    return sum_from[lo] - (hi + 1 <= b ? sum_from[hi + 1] : 0);
  };

  long long half = b / 2;  // J2 holds sizes with 2s > b, J3 sizes with 2s <= b
  long long best = 0;
  for (long long a = 0; a <= half; ++a) {
    long long j1 = cnt_range(b - a + 1, b);
    long long j2 = cnt_range(half + 1, b - a);
    long long j2_sum = sum_range(half + 1, b - a);
    long long j3_sum = sum_range(a, half);
    long long leftover = j2 * b - j2_sum;
    long long need = j3_sum - leftover;
    long long extra = need > 0 ? (need + b - 1) / b : 0;
    best = std::max(best, j1 + j2 + extra);
  }
  return best;
}

namespace {

struct ExactState {
  int capacity;
  std::vector<int> item_types;  // items sorted by non-increasing size
  std::vector<int> item_sizes;
  std::vector<int> assignment;      // item -> bin
  std::vector<int> best_assignment;
  std::vector<int> residual;        // per open bin
  int best = 0;
  long long lower = 0;
  bool done = false;
  long long remaining_size = 0;

  void search(int item, int used_bins) {
    if (done || used_bins >= best) return;
    if (item == static_cast<int>(item_types.size())) {
      best = used_bins;
      best_assignment = assignment;
      done = best <= lower;  // matched the L2 bound, provably optimal
      return;
    }
    // Even spreading all remaining size into current leftovers needs this many bins.
    long long slack = 0;
    for (int r = 0; r < used_bins; ++r) slack += residual[r];
    long long overflow = remaining_size - slack;
    long long extra = overflow > 0 ? (overflow + capacity - 1) / capacity : 0;
    if (used_bins + extra >= best) return;

    int s = item_sizes[item];
    remaining_size -= s;
    // Bins with equal residual are interchangeable; try each residual once.
    for (int r = 0; r < used_bins; ++r) {
      if (residual[r] < s) continue;
      bool seen = false;
      for (int r2 = 0; r2 < r && !seen; ++r2) seen = residual[r2] == residual[r];
      if (seen) continue;
      residual[r] -= s;
      assignment[item] = r;
      search(item + 1, used_bins);
      residual[r] += s;
    }
    if (used_bins < best) {
      residual[used_bins] = capacity - s;
      assignment[item] = used_bins;
      search(item + 1, used_bins + 1);
    }
    remaining_size += s;
  }
};

}  // namespace

ExactSolution exact_solve(const Instance& instance, int max_items) {
  long long n = instance.num_items();
  if (n > max_items) {
    throw std::invalid_argument("exact_solve: instance exceeds the item guard of " +
                                std::to_string(max_items));
  }
  ExactSolution solution;
  if (n == 0) return solution;

  ExactState state;
  state.capacity = instance.bin_capacity();
  state.item_types.assign(instance.sequence().begin(), instance.sequence().end());
  std::sort(state.item_types.begin(), state.item_types.end(), [&](int a, int b) {
    return instance.size_of(a) > instance.size_of(b);
  });
  for (int t : state.item_types) state.item_sizes.push_back(instance.size_of(t));
  state.assignment.assign(state.item_types.size(), -1);
  state.residual.assign(state.item_types.size(), 0);
  state.remaining_size = instance.total_size();
  state.best = static_cast<int>(n) + 1;
  state.lower = l2_lower_bound(instance);
  state.search(0, 0);

  solution.bins = state.best;
  solution.contents.assign(state.best, std::vector<int>(instance.num_types(), 0));
  for (size_t i = 0; i < state.item_types.size(); ++i) {
    solution.contents[state.best_assignment[i]][state.item_types[i]]++;
  }
  return solution;
}

BoundReport bound_report(const Instance& instance, bool with_exact_when_small) {
  BoundReport report;
  report.l1 = l1_lower_bound(instance);
  report.l2 = l2_lower_bound(instance);
  if (with_exact_when_small && instance.num_items() <= 16) {
    report.exact = exact_solve(instance).bins;
  }
  return report;
}

}  // namespace cgpp
