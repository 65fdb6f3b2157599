#pragma once

#include <optional>
#include <set>
#include <vector>

#include "cgpp/core.hpp"
#include "cgpp/estimator.hpp"
#include "cgpp/planner.hpp"

namespace cgpp {

enum class PolicyKind { kBestFit, kCgpp, kCgppL };

PolicyKind policy_kind_from_name(const std::string& name);
const char* to_string(PolicyKind kind);

struct PolicyParams {
  int section_length = 1000;   // L: items per planning section
  int memory_length = 250;     // k: sliding window size, <= section_length
  double theta_kl = 0.1;       // distribution drift threshold
  long long theta_u = 5;       // unplanned-item tolerance per type
  double theta_o = 0.8;        // open-space risk threshold
  double kl_epsilon = 1e-6;
  std::optional<TypeDistribution> prior;  // required by the prior-seeded policy
  PlannerConfig planner;
};

// Parameter profile for long sections / large item volumes.
PolicyParams large_scale_params();

enum class ReplanTrigger { kInitial, kKlDrift, kTolerance, kSection };

const char* to_string(ReplanTrigger trigger);

struct PlanEvent {
  long long step = 0;
  ReplanTrigger trigger = ReplanTrigger::kInitial;
  Plan plan;
};

struct RunStats {
  long long bins = 0;
  long long fallback_items = 0;
  long long replans = 0;  // plan regenerations after the initial plan
  long long kl_replans = 0;
  long long tolerance_replans = 0;
  long long section_replans = 0;
  long long planner_failures = 0;
  std::vector<PlanEvent> plan_events;  // includes the initial plan
};

struct RunResult {
  PackingSolution solution;
  RunStats stats;
};

// Stepwise packing engine shared by every policy. run_policy drives it over a
// whole arrival sequence; tests can drive individual steps.
class PackingEngine {
 public:
  PackingEngine(const Instance& instance, PolicyKind kind, PolicyParams params);

  // Plain best fit: tightest open bin that still fits the item, lowest bin id
  // on ties, a fresh bin otherwise. Breaks the chosen bin's pattern
  // assignment without refunding plan quota, unless the item happens to fill
  // a slot the pattern wanted anyway.
  int bestfit_step(int type, long long step);

  // Plan-guided step: fall back when the open-space risk w/e passes theta_o,
  // where w is the free space of pattern bins still expecting items and e is
  // the expected total size of the section's remaining arrivals. Otherwise
  // match an open pattern bin expecting the type (closest to completion
  // first), otherwise open a bin for the best plan entry with remaining quota
  // (most remaining, then higher fill rate, then lower index). A plan miss
  // bumps the type's tolerance count and falls back.
  int cgpp_step(int type, long long step);

  // Feeds the sliding window; call once per arriving item before planning.
  void observe(int type);

  // Drift / tolerance check. The KL test runs once the window is full; a
  // tolerance breach triggers regardless. Returns the trigger when a replan
  // happened.
  std::optional<ReplanTrigger> maybe_replan(long long step);

  // Adopts a distribution and plans the remainder of the section. On planner
  // failure the engine packs by fallback until the next section.
  void adopt_and_plan(const TypeDistribution& distribution, ReplanTrigger trigger,
                      long long step);

  // Moves the cursor to a new section; forces a replan once warmed.
  void start_section(long long step);

  bool warmed() const { return warmed_; }
  void set_warmed(bool warmed) { warmed_ = warmed; }
  int section_position() const { return section_pos_; }
  void advance_position() { ++section_pos_; }
  bool section_exhausted() const { return section_pos_ >= params_.section_length; }
  const MemoryWindow& window() const { return window_; }
  const Plan& plan() const { return plan_; }
  const std::vector<long long>& tolerance_table() const { return tolerance_; }
  long long total_residual() const { return total_residual_; }
  // Free space in pattern bins that still expect planned items (the risk w).
  long long open_pattern_space() const { return open_pattern_space_; }

  RunResult finish();  // moves the accumulated solution and stats out

 private:
  int open_bin(int type, long long step, const Pattern* pattern, int entry_index,
               PlacementCause cause);
  void pack_into(int bin_id, int type, long long step, PlacementCause cause, int entry_index,
                 bool consumes_wanted = false);
  int find_best_fit(int type) const;

  const Instance& instance_;
  PolicyKind kind_;
  PolicyParams params_;

  PackingSolution solution_;
  RunStats stats_;
  std::vector<std::set<int>> buckets_;     // bin ids keyed by residual capacity
  std::vector<int> open_pattern_bins_;
  std::vector<long long> wanted_size_;     // per bin: size still expected by its pattern

  Plan plan_;
  std::vector<double> entry_fill_;
  bool have_plan_ = false;
  bool fallback_only_ = false;
  bool warmed_ = false;

  TypeDistribution dist_;
  double mean_size_ = 0.0;
  MemoryWindow window_;
  std::vector<long long> tolerance_;
  int section_pos_ = 0;
  long long section_index_ = 0;
  long long total_residual_ = 0;
  long long open_pattern_space_ = 0;  // residual of bins still expecting items
};

// Runs a policy over the whole sequence. Deterministic: identical inputs give
// identical solutions. The prior-seeded policy requires params.prior.
RunResult run_policy(PolicyKind kind, const Instance& instance, const PolicyParams& params);

}  // namespace cgpp
