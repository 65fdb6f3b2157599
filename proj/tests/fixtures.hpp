#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "cgpp/core.hpp"
#include "cgpp/generator.hpp"
#include "cgpp/policy.hpp"

namespace fixtures {

// Builds an instance from explicit item sizes in arrival order; one type per
// distinct size, ids ascending by size.
inline cgpp::Instance from_sizes(int capacity, const std::vector<int>& sizes) {
  std::set<int> distinct(sizes.begin(), sizes.end());
  std::vector<cgpp::ItemType> types;
  std::vector<int> index_of(capacity + 1, -1);
  int id = 1;
  for (int s : distinct) {
    index_of[s] = id - 1;
    types.push_back(cgpp::ItemType{id, s});
    id++;
  }
  std::vector<int> sequence;
  sequence.reserve(sizes.size());
  for (int s : sizes) sequence.push_back(index_of[s]);
  return cgpp::Instance(capacity, std::move(types), std::move(sequence));
}

// Two hand-checked cases, B=10. Best fit needs 3 and 5 bins, the optimum 2
// and 4.
inline cgpp::Instance small_case1() { return from_sizes(10, {5, 4, 4, 3, 2, 2}); }

inline cgpp::Instance small_case2() {
  return from_sizes(10, {5, 4, 4, 3, 3, 3, 3, 3, 2, 2, 2, 2, 2, 2});
}

// Random small instance for oracle comparisons. Sizes in [1, capacity-1]
// drawn over at most max_types distinct values.
inline cgpp::Instance random_small(cgpp::Rng& rng, int max_items, int max_types,
                                   int max_capacity) {
  int capacity = rng.next_int(4, max_capacity);
  int num_sizes = rng.next_int(1, std::min(max_types, capacity - 1));
  std::set<int> size_set;
  while (static_cast<int>(size_set.size()) < num_sizes) {
    size_set.insert(rng.next_int(1, capacity - 1));
  }
  std::vector<int> size_pool(size_set.begin(), size_set.end());
  int n = rng.next_int(1, max_items);
  std::vector<int> sizes;
  sizes.reserve(n);
  for (int i = 0; i < n; ++i) {
    sizes.push_back(size_pool[rng.next_int(0, static_cast<int>(size_pool.size()) - 1)]);
  }
  return from_sizes(capacity, sizes);
}

// Sizes packed into a given bin, descending, for readable assertions.
inline std::vector<int> bin_sizes(const cgpp::Bin& bin, const cgpp::Instance& instance) {
  std::vector<int> sizes;
  for (size_t t = 0; t < bin.content.size(); ++t) {
    for (int c = 0; c < bin.content[t]; ++c) sizes.push_back(instance.size_of(static_cast<int>(t)));
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

// All feasible patterns of an instance by depth-first enumeration; the
// reference answer for pricing and tiny covering problems.
inline void enumerate_patterns_rec(const cgpp::Instance& instance, int type, int space,
                                   std::vector<int>& counts,
                                   std::vector<cgpp::Pattern>& out) {
  if (type == instance.num_types()) {
    for (int c : counts) {
      if (c > 0) {
        out.push_back(cgpp::Pattern{counts});
        return;
      }
    }
    return;
  }
  int most = space / instance.size_of(type);
  for (int c = 0; c <= most; ++c) {
    counts[type] = c;
    enumerate_patterns_rec(instance, type + 1, space - c * instance.size_of(type), counts, out);
  }
  counts[type] = 0;
}

inline std::vector<cgpp::Pattern> enumerate_patterns(const cgpp::Instance& instance) {
  std::vector<cgpp::Pattern> out;
  std::vector<int> counts(instance.num_types(), 0);
  enumerate_patterns_rec(instance, 0, instance.bin_capacity(), counts, out);
  return out;
}

// Structural invariants every policy run must satisfy. Returns human-readable
// violations; an empty vector means the run is internally consistent.
inline std::vector<std::string> run_violations(const cgpp::Instance& instance,
                                               const cgpp::RunResult& result) {
  std::vector<std::string> bad;
  const cgpp::PackingSolution& sol = result.solution;

  if (static_cast<long long>(sol.log.size()) != instance.num_items()) {
    bad.push_back("log length != item count");
  }
  for (size_t i = 0; i < sol.log.size(); ++i) {
    const cgpp::Placement& p = sol.log[i];
    if (p.step != static_cast<long long>(i)) {
      bad.push_back("log steps out of order");
      break;
    }
    if (p.type != instance.sequence()[i]) {
      bad.push_back("log type differs from the arrival sequence");
      break;
    }
    if (p.bin < 0 || p.bin >= sol.bins_used()) {
      bad.push_back("log references an unknown bin");
      break;
    }
  }

  std::vector<long long> totals(instance.num_types(), 0);
  for (size_t b = 0; b < sol.bins.size(); ++b) {
    const cgpp::Bin& bin = sol.bins[b];
    if (bin.id != static_cast<int>(b)) bad.push_back("bin ids not dense");
    long long used = 0;
    for (int t = 0; t < instance.num_types(); ++t) {
      if (bin.content[t] < 0) bad.push_back("negative bin content");
      used += static_cast<long long>(bin.content[t]) * instance.size_of(t);
      totals[t] += bin.content[t];
    }
    if (used > instance.bin_capacity()) bad.push_back("bin over capacity");
    if (used == 0) bad.push_back("empty bin kept in the solution");
    if (bin.residual != instance.bin_capacity() - used) bad.push_back("residual inconsistent");
    if (bin.pattern_mode()) {
      for (int t = 0; t < instance.num_types(); ++t) {
        if (bin.wanted[t] < 0 ||
            bin.content[t] + bin.wanted[t] != bin.assigned->counts[t]) {
          bad.push_back("pattern bin accounting broken");
          break;
        }
      }
    }
  }
  if (totals != instance.type_counts()) bad.push_back("items not conserved");

  std::vector<std::vector<int>> replayed = cgpp::replay_contents(instance, sol.log);
  if (static_cast<int>(replayed.size()) != sol.bins_used()) {
    bad.push_back("replay opens a different number of bins");
  } else {
    for (size_t b = 0; b < replayed.size(); ++b) {
      if (replayed[b] != sol.bins[b].content) {
        bad.push_back("replayed log differs from bin contents");
        break;
      }
    }
  }

  // Plan-open placements within each plan's lifetime never exceed its quotas.
  const std::vector<cgpp::PlanEvent>& events = result.stats.plan_events;
  for (size_t e = 0; e < events.size(); ++e) {
    long long begin = events[e].step;
    long long end =
        e + 1 < events.size() ? events[e + 1].step : instance.num_items();
    std::vector<long long> opens(events[e].plan.entries.size(), 0);
    bool indexed = true;
    for (const cgpp::Placement& p : sol.log) {
      if (p.step < begin || p.step >= end) continue;
      if (p.cause != cgpp::PlacementCause::kPlanOpen) continue;
      if (p.plan_entry < 0 || p.plan_entry >= static_cast<int>(opens.size())) {
        bad.push_back("plan-open references a missing plan entry");
        indexed = false;
        break;
      }
      opens[static_cast<size_t>(p.plan_entry)]++;
    }
    if (!indexed) continue;
    for (size_t h = 0; h < opens.size(); ++h) {
      if (opens[h] > events[e].plan.entries[h].quota) {
        bad.push_back("plan quota exceeded");
        break;
      }
    }
  }

  long long fallbacks = 0;
  for (const cgpp::Placement& p : sol.log) {
    if (p.cause == cgpp::PlacementCause::kFallback) fallbacks++;
  }
  if (fallbacks != result.stats.fallback_items) bad.push_back("fallback count stat wrong");
  if (result.stats.bins != sol.bins_used()) bad.push_back("bin count stat wrong");
  return bad;
}

// Placement-level equality, used to assert determinism across repeated runs.
inline bool same_solution(const cgpp::PackingSolution& a, const cgpp::PackingSolution& b) {
  if (a.bins.size() != b.bins.size() || a.log.size() != b.log.size()) return false;
  for (size_t i = 0; i < a.log.size(); ++i) {
    const cgpp::Placement& x = a.log[i];
    const cgpp::Placement& y = b.log[i];
    if (x.step != y.step || x.type != y.type || x.bin != y.bin || x.cause != y.cause ||
        x.plan_entry != y.plan_entry) {
      return false;
    }
  }
  for (size_t v = 0; v < a.bins.size(); ++v) {
    if (a.bins[v].content != b.bins[v].content || a.bins[v].residual != b.bins[v].residual) {
      return false;
    }
  }
  return true;
}

}  // namespace fixtures
