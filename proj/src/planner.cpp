#include "cgpp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "cgpp/pricing.hpp"

namespace cgpp {

namespace {
constexpr double kIntTol = 1e-6;
constexpr double kEnumWalkCap = 200000.0;

long long ceil_with_tol(double v) {
  return static_cast<long long>(std::ceil(v - kIntTol));
}

bool maximal_rec(const Instance& instance, const std::vector<int>& demanded, size_t idx,
                 int space, int min_size, size_t budget, std::vector<int>& counts,
                 std::vector<Pattern>& out) {
  if (idx == demanded.size()) {
    if (space >= min_size) return true;  // something demanded still fits: not maximal
    if (out.size() == budget) return false;
    out.push_back(Pattern{counts});
    return true;
  }
  int type = demanded[idx];
  int size = instance.size_of(type);
  for (int c = 0; c * size <= space; ++c) {
    counts[type] = c;
    if (!maximal_rec(instance, demanded, idx + 1, space - c * size, min_size, budget, counts,
                     out)) {
      counts[type] = 0;
      return false;
    }
  }
  counts[type] = 0;
  return true;
}

// Every maximal pattern over the demanded types: none of them leaves room
// for another demanded item. In a covering problem any pattern is dominated
// by a maximal superset, so the complete maximal set makes the integer step
// exact. Returns false without touching `out` when the enumeration would
// overrun its budget.
bool collect_maximal_patterns(std::span<const double> demands, const Instance& instance,
                              int budget, std::vector<Pattern>& out) {
  if (budget <= 0) return false;
  std::vector<int> demanded;
  for (int t = 0; t < instance.num_types(); ++t) {
    if (demands[t] > 0) demanded.push_back(t);
  }
  if (demanded.empty()) return false;
  double leaves = 1.0;  // loose bound on the enumeration walk
  int min_size = instance.bin_capacity();
  for (int t : demanded) {
    leaves *= instance.bin_capacity() / instance.size_of(t) + 1;
    if (leaves > kEnumWalkCap) return false;
    min_size = std::min(min_size, instance.size_of(t));
  }
  std::vector<Pattern> found;
  std::vector<int> counts(instance.num_types(), 0);
  if (!maximal_rec(instance, demanded, 0, instance.bin_capacity(), min_size,
                   static_cast<size_t>(budget), counts, found)) {
    return false;
  }
  out = std::move(found);
  return true;
}
}  // namespace

PlannerConfig offline_planner_config() {
  PlannerConfig config;
  config.max_colgen_iters = 2000;
  config.ip_node_limit = 200000;
  return config;
}

std::vector<Pattern> initial_patterns(std::span<const double> demands,
                                      const Instance& instance) {
  if (static_cast<int>(demands.size()) != instance.num_types()) {
    throw std::invalid_argument("planner: demand vector length mismatch");
  }
  std::vector<Pattern> patterns;
  for (int t = 0; t < instance.num_types(); ++t) {
    if (demands[t] <= 0) continue;
    Pattern p;
    p.counts.assign(instance.num_types(), 0);
    p.counts[t] = instance.bin_capacity() / instance.size_of(t);
    patterns.push_back(std::move(p));
  }
  return patterns;
}

namespace {

struct BnbContext {
  const std::vector<Pattern>* patterns;
  std::span<const double> demands;
  int node_limit = 0;
  int nodes_used = 0;
  long long best_cost = 0;
  std::vector<long long> best_quotas;

  // Demands left after fixing the lower bounds.
  std::vector<double> shifted_demands(const std::vector<long long>& lower) const {
    std::vector<double> q(demands.begin(), demands.end());
    for (size_t h = 0; h < lower.size(); ++h) {
      if (!lower[h]) continue;
      const std::vector<int>& counts = (*patterns)[h].counts;
      for (size_t t = 0; t < q.size(); ++t) q[t] -= static_cast<double>(lower[h]) * counts[t];
    }
    return q;
  }

  void consider(const std::vector<long long>& quotas) {
    long long cost = 0;
    for (long long z : quotas) cost += z;
    if (cost < best_cost) {
      best_cost = cost;
      best_quotas = quotas;
    }
  }

  void explore(RmpSolver solver, std::vector<long long> lower, long long lower_total) {
    LpResult lp;
    try {
      lp = solver.solve();
    } catch (const InfeasibleError&) {
      return;  // bounds cut off every cover
    } catch (const NumericError&) {
      return;  // conservatively abandon the node, the incumbent stays valid
    }
    double bound = static_cast<double>(lower_total) + lp.objective;
    if (ceil_with_tol(bound) >= best_cost) return;

    int branch = -1;
    double branch_frac = kIntTol;
    for (size_t h = 0; h < lp.primal.size(); ++h) {
      double v = lp.primal[h];
      double frac = std::fabs(v - std::round(v));
      if (frac > branch_frac) {
        branch_frac = frac;
        branch = static_cast<int>(h);
      }
    }
    if (branch < 0) {
      std::vector<long long> quotas(lower.begin(), lower.end());
      for (size_t h = 0; h < lp.primal.size(); ++h) {
        quotas[h] += std::llround(lp.primal[h]);
      }
      consider(quotas);
      return;
    }

    double value = static_cast<double>(lower[branch]) + lp.primal[branch];

    // Ceil child first: raise the lower bound, shift the demands. The branch
    // value is strictly fractional here, so ceil is floor + 1.
    if (nodes_used < node_limit) {
      ++nodes_used;
      RmpSolver child = solver;
      std::vector<long long> child_lower = lower;
      long long up = static_cast<long long>(std::floor(value)) + 1;
      child_lower[branch] = up;
      child.set_demands(shifted_demands(child_lower));
      explore(std::move(child), std::move(child_lower),
              lower_total + (up - lower[branch]));
    }
    // Floor child: cap the quota below its fractional value.
    if (nodes_used < node_limit) {
      ++nodes_used;
      RmpSolver child = std::move(solver);
      double cap = std::floor(value) - static_cast<double>(lower[branch]);
      child.add_upper_bound(branch, cap);
      explore(std::move(child), std::move(lower), lower_total);
    }
  }
};

}  // namespace

std::vector<int> solve_integer_plan(const std::vector<Pattern>& patterns,
                                    std::span<const double> demands, const Instance& instance,
                                    const PlannerConfig& config) {
  if (static_cast<int>(demands.size()) != instance.num_types()) {
    throw std::invalid_argument("planner: demand vector length mismatch");
  }
  if (config.ip_node_limit < 0) {
    throw std::invalid_argument("planner: negative node limit");
  }
  bool any_demand = false;
  for (double q : demands) any_demand |= q > 0;
  if (!any_demand) return std::vector<int>(patterns.size(), 0);

  RmpSolver root(instance.num_types());
  root.set_demands(std::vector<double>(demands.begin(), demands.end()));
  for (const Pattern& p : patterns) root.add_column(p);
  LpResult lp = root.solve();  // InfeasibleError propagates: pool cannot cover

  BnbContext ctx;
  ctx.patterns = &patterns;
  ctx.demands = demands;
  ctx.node_limit = config.ip_node_limit;

  // Ceiling-rounded LP solution: feasible for a covering problem, and the
  // fallback answer when the node limit cuts the search short.
  ctx.best_quotas.assign(patterns.size(), 0);
  ctx.best_cost = 0;
  for (size_t h = 0; h < lp.primal.size(); ++h) {
    ctx.best_quotas[h] = ceil_with_tol(lp.primal[h]);
    ctx.best_cost += ctx.best_quotas[h];
  }

  ctx.explore(std::move(root), std::vector<long long>(patterns.size(), 0), 0);

  std::vector<int> quotas(patterns.size(), 0);
  for (size_t h = 0; h < quotas.size(); ++h) {
    quotas[h] = static_cast<int>(ctx.best_quotas[h]);
  }
  return quotas;
}

PlanResult generate_plan(std::span<const double> demands, const Instance& instance,
                         const PlannerConfig& config) {
  if (static_cast<int>(demands.size()) != instance.num_types()) {
    throw std::invalid_argument("planner: demand vector length mismatch");
  }
  for (double q : demands) {
    if (q < 0 || !std::isfinite(q)) {
      throw std::invalid_argument("planner: demands must be finite and non-negative");
    }
  }
  if (config.max_colgen_iters <= 0 || config.lp_tolerance <= 0 ||
      config.enumeration_budget < 0) {
    throw std::invalid_argument("planner: config limits must be positive");
  }

  PlanResult result;
  result.final_duals.assign(instance.num_types(), 0.0);
  result.patterns = initial_patterns(demands, instance);
  if (result.patterns.empty()) return result;  // nothing demanded, empty plan

  RmpSolver solver(instance.num_types());
  solver.set_demands(std::vector<double>(demands.begin(), demands.end()));
  std::set<std::vector<int>> pool;
  for (const Pattern& p : result.patterns) {
    solver.add_column(p);
    pool.insert(p.counts);
  }

  LpResult lp;
  result.iteration_capped = true;
  for (int iter = 0; iter < config.max_colgen_iters; ++iter) {
    lp = solver.solve();
    result.lp_objective_trace.push_back(lp.objective);
    result.colgen_iterations = iter + 1;
    PricingResult priced = solve_pricing(lp.duals, instance);
    if (priced.reduced_cost >= -config.lp_tolerance) {
      result.iteration_capped = false;  // certified: no improving column left
      break;
    }
    if (!pool.insert(priced.pattern.counts).second) {
      result.iteration_capped = false;  // duplicate column, stalled on degeneracy
      break;
    }
    result.patterns.push_back(priced.pattern);
    solver.add_column(priced.pattern);
  }
  result.final_duals = lp.duals;
  result.lp_objective = lp.objective;

  // The LP above is done; widening the pool only strengthens the integer
  // step, so the duals and objective stay those of the column generation.
  std::vector<Pattern> maximal;
  if (collect_maximal_patterns(demands, instance, config.enumeration_budget, maximal)) {
    for (Pattern& p : maximal) {
      if (pool.insert(p.counts).second) result.patterns.push_back(std::move(p));
    }
  }

  std::vector<int> quotas = solve_integer_plan(result.patterns, demands, instance, config);

  // Top off every selected pattern with further demanded items, largest size
  // first: the extension keeps the pattern's cost while covering at least as
  // much, so the plan only gets tighter.
  std::vector<int> order;
  for (int t = 0; t < instance.num_types(); ++t) {
    if (demands[t] > 0) order.push_back(t);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    int sa = instance.size_of(a), sb = instance.size_of(b);
    return sa != sb ? sa > sb : a < b;
  });
  std::vector<Pattern> chosen = result.patterns;
  for (size_t h = 0; h < quotas.size(); ++h) {
    if (quotas[h] <= 0) continue;
    Pattern& p = chosen[h];
    int space = instance.bin_capacity() - static_cast<int>(p.packed_size(instance));
    for (int t : order) {
      for (int size = instance.size_of(t); size <= space; space -= size) p.counts[t]++;
    }
  }

  // Assemble the plan, merging any duplicate patterns defensively.
  std::map<std::vector<int>, int> merged;
  for (size_t h = 0; h < quotas.size(); ++h) {
    if (quotas[h] > 0) merged[chosen[h].counts] += quotas[h];
  }
  for (size_t h = 0; h < quotas.size(); ++h) {
    auto it = merged.find(chosen[h].counts);
    if (it == merged.end()) continue;
    PlanEntry entry;
    entry.pattern = chosen[h];
    entry.quota = it->second;
    entry.remaining = it->second;
    result.plan.entries.push_back(std::move(entry));
    merged.erase(it);
  }
  return result;
}

OfflineResult solve_offline(const Instance& instance, const PlannerConfig& config) {
  std::vector<long long> counts = instance.type_counts();
  std::vector<double> demands(counts.begin(), counts.end());

  OfflineResult result;
  result.plan = generate_plan(demands, instance, config);

  Plan& plan = result.plan.plan;
  PackingSolution& solution = result.solution;
  // open_slots[b][t] > 0 means bin b still expects an item of type t.
  for (long long step = 0; step < instance.num_items(); ++step) {
    int t = instance.sequence()[static_cast<size_t>(step)];
    int chosen = -1;
    for (const Bin& bin : solution.bins) {
      if (bin.wanted[t] > 0) {
        chosen = bin.id;
        break;
      }
    }
    Placement placement;
    placement.step = step;
    placement.type = t;
    if (chosen >= 0) {
      placement.cause = PlacementCause::kPlanMatch;
    } else {
      int entry_idx = -1;
      for (size_t e = 0; e < plan.entries.size(); ++e) {
        if (plan.entries[e].remaining > 0 && plan.entries[e].pattern.counts[t] > 0) {
          entry_idx = static_cast<int>(e);
          break;
        }
      }
      if (entry_idx < 0) {
        // The plan covers every demand, so a slot must exist.
        throw std::logic_error("offline: no planned slot for an arriving item");
      }
      PlanEntry& entry = plan.entries[entry_idx];
      entry.remaining--;
      Bin bin;
      bin.id = static_cast<int>(solution.bins.size());
      bin.open_step = step;
      bin.content.assign(instance.num_types(), 0);
      bin.residual = instance.bin_capacity();
      bin.assigned = entry.pattern;
      bin.wanted = entry.pattern.counts;
      solution.bins.push_back(std::move(bin));
      chosen = solution.bins.back().id;
      placement.cause = PlacementCause::kPlanOpen;
      placement.plan_entry = entry_idx;
    }
    Bin& bin = solution.bins[chosen];
    bin.content[t]++;
    bin.wanted[t]--;
    bin.residual -= instance.size_of(t);
    placement.bin = chosen;
    solution.log.push_back(placement);
  }
  return result;
}

}  // namespace cgpp
