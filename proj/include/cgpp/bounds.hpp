#pragma once

#include <optional>
#include <vector>

#include "cgpp/core.hpp"

namespace cgpp {

struct BoundReport {
  long long l1 = 0;  // size bound ceil(total size / capacity)
  long long l2 = 0;  // Martello-Toth bound, always >= l1
  std::optional<int> exact;  // optimal bin count when computed
};

long long l1_lower_bound(const Instance& instance);

// Martello-Toth L2: for every integer threshold a in [0, B/2], items larger
// than B-a each force a bin, items in (B/2, B-a] force one bin apiece with
// leftover room, and the remaining items of size in [a, B/2] need at least
// their total size minus that leftover, divided by B. The bound is the
// maximum over thresholds.
long long l2_lower_bound(const Instance& instance);

struct ExactSolution {
  int bins = 0;
  std::vector<std::vector<int>> contents;  // per bin, per-type counts
};

// Optimal packing by depth-first branch and bound over item-to-bin
// assignments with symmetry breaking (items in non-increasing size order, a
// new bin is only ever the next unused one, bins with equal residual are
// interchangeable). Guarded to instances with at most max_items items.
ExactSolution exact_solve(const Instance& instance, int max_items = 16);

BoundReport bound_report(const Instance& instance, bool with_exact_when_small = true);

}  // namespace cgpp
