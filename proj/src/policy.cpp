#include "cgpp/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace cgpp {

PolicyKind policy_kind_from_name(const std::string& name) {
  if (name == "bestfit") return PolicyKind::kBestFit;
  if (name == "cgpp") return PolicyKind::kCgpp;
  if (name == "cgpp-l") return PolicyKind::kCgppL;
  throw std::invalid_argument("unknown policy \"" + name + "\"");
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kBestFit: return "bestfit";
    case PolicyKind::kCgpp: return "cgpp";
    case PolicyKind::kCgppL: return "cgpp-l";
  }
  return "unknown";
}

PolicyParams large_scale_params() {
  PolicyParams params;
  params.section_length = 4000;
  params.memory_length = 1000;
  params.theta_u = 20;
  params.theta_o = 1.5;
  return params;
}

const char* to_string(ReplanTrigger trigger) {
  switch (trigger) {
    case ReplanTrigger::kInitial: return "initial";
    case ReplanTrigger::kKlDrift: return "kl-drift";
    case ReplanTrigger::kTolerance: return "tolerance";
    case ReplanTrigger::kSection: return "section";
  }
  return "unknown";
}

namespace {

void validate_params(const PolicyParams& params) {
  if (params.section_length <= 0) {
    throw std::invalid_argument("policy: section length must be positive");
  }
  if (params.memory_length <= 0 || params.memory_length > params.section_length) {
    throw std::invalid_argument("policy: memory length must be in (0, section length]");
  }
  if (params.theta_kl < 0 || params.theta_u <= 0 || params.theta_o <= 0) {
    throw std::invalid_argument("policy: thresholds must be positive");
  }
  if (params.kl_epsilon <= 0) {
    throw std::invalid_argument("policy: kl epsilon must be positive");
  }
}

}  // namespace

PackingEngine::PackingEngine(const Instance& instance, PolicyKind kind, PolicyParams params)
    : instance_(instance),
      kind_(kind),
      params_(std::move(params)),
      buckets_(instance.bin_capacity() + 1),
      window_(params_.memory_length),
      tolerance_(instance.num_types(), 0) {
  validate_params(params_);
}

int PackingEngine::find_best_fit(int type) const {
  int size = instance_.size_of(type);
  for (int r = size; r <= instance_.bin_capacity(); ++r) {
    if (!buckets_[r].empty()) return *buckets_[r].begin();
  }
  return -1;
}

int PackingEngine::open_bin(int type, long long step, const Pattern* pattern, int entry_index,
                            PlacementCause cause) {
  int size = instance_.size_of(type);
  Bin bin;
  bin.id = static_cast<int>(solution_.bins.size());
  bin.open_step = step;
  bin.content.assign(instance_.num_types(), 0);
  bin.content[type] = 1;
  bin.residual = instance_.bin_capacity() - size;
  wanted_size_.push_back(0);
  if (pattern) {
    bin.assigned = *pattern;
    bin.wanted = pattern->counts;
    bin.wanted[type]--;
    long long remaining = pattern->packed_size(instance_) - size;
    wanted_size_[bin.id] = remaining;
    if (remaining > 0) {
      open_pattern_bins_.push_back(bin.id);
      open_pattern_space_ += bin.residual;
    }
  }
  if (bin.residual > 0) buckets_[bin.residual].insert(bin.id);
  total_residual_ += bin.residual;
  solution_.bins.push_back(std::move(bin));
  solution_.log.push_back(Placement{step, type, solution_.bins.back().id, cause, entry_index});
  return solution_.bins.back().id;
}

void PackingEngine::pack_into(int bin_id, int type, long long step, PlacementCause cause,
                              int entry_index, bool consumes_wanted) {
  Bin& bin = solution_.bins[bin_id];
  int size = instance_.size_of(type);
  buckets_[bin.residual].erase(bin_id);
  bin.residual -= size;
  if (bin.residual > 0) buckets_[bin.residual].insert(bin_id);
  if (consumes_wanted) {
    bin.wanted[type]--;
    wanted_size_[bin_id] -= size;
  }
  bin.content[type]++;
  total_residual_ -= size;
  solution_.log.push_back(Placement{step, type, bin_id, cause, entry_index});
}

int PackingEngine::bestfit_step(int type, long long step) {
  stats_.fallback_items++;
  int chosen = find_best_fit(type);
  if (chosen < 0) {
    return open_bin(type, step, nullptr, -1, PlacementCause::kFallback);
  }
  Bin& bin = solution_.bins[chosen];
  if (bin.pattern_mode()) {
    if (bin.wanted[type] > 0) {
      // The fallback happens to land on a planned slot: the pattern survives.
      open_pattern_space_ -= instance_.size_of(type);
      pack_into(chosen, type, step, PlacementCause::kFallback, -1, true);
      if (wanted_size_[chosen] == 0) open_pattern_space_ -= bin.residual;
      return chosen;
    }
    if (wanted_size_[chosen] > 0) open_pattern_space_ -= bin.residual;
    bin.broken = true;  // off-plan item: the bin stops matching its pattern
    wanted_size_[chosen] = 0;
  }
  pack_into(chosen, type, step, PlacementCause::kFallback, -1);
  return chosen;
}

int PackingEngine::cgpp_step(int type, long long step) {
  if (fallback_only_ || !have_plan_) {
    return bestfit_step(type, step);
  }
  double expected = static_cast<double>(params_.section_length - section_pos_) * mean_size_;
  if (expected <= 0.0 ||
      static_cast<double>(open_pattern_space_) / expected >= params_.theta_o) {
    return bestfit_step(type, step);
  }

  // Match an open pattern bin that still expects this type; prefer the bin
  // closest to completing its pattern, then the lowest id.
  int match = -1;
  size_t scan = 0;
  while (scan < open_pattern_bins_.size()) {
    int id = open_pattern_bins_[scan];
    const Bin& bin = solution_.bins[id];
    if (!bin.pattern_mode() || wanted_size_[id] == 0) {
      open_pattern_bins_[scan] = open_pattern_bins_.back();
      open_pattern_bins_.pop_back();
      continue;
    }
    if (bin.wanted[type] > 0 &&
        (match < 0 || wanted_size_[id] < wanted_size_[match] ||
         (wanted_size_[id] == wanted_size_[match] && id < match))) {
      match = id;
    }
    ++scan;
  }
  if (match >= 0) {
    Bin& bin = solution_.bins[match];
    open_pattern_space_ -= instance_.size_of(type);
    pack_into(match, type, step, PlacementCause::kPlanMatch, -1, true);
    // A completed pattern stops waiting; its slack no longer counts as open.
    if (wanted_size_[match] == 0) open_pattern_space_ -= bin.residual;
    return match;
  }

  // Open a bin for a plan entry that includes the type and has quota left.
  int entry_index = -1;
  for (size_t e = 0; e < plan_.entries.size(); ++e) {
    const PlanEntry& entry = plan_.entries[e];
    if (entry.remaining <= 0 || entry.pattern.counts[type] <= 0) continue;
    if (entry_index < 0) {
      entry_index = static_cast<int>(e);
      continue;
    }
    const PlanEntry& best = plan_.entries[entry_index];
    if (entry.remaining > best.remaining ||
        (entry.remaining == best.remaining && entry_fill_[e] > entry_fill_[entry_index])) {
      entry_index = static_cast<int>(e);
    }
  }
  if (entry_index >= 0) {
    PlanEntry& entry = plan_.entries[entry_index];
    entry.remaining--;
    return open_bin(type, step, &entry.pattern, entry_index, PlacementCause::kPlanOpen);
  }

  // No planned slot anywhere: note the underestimate and fall back.
  tolerance_[type]++;
  return bestfit_step(type, step);
}

void PackingEngine::observe(int type) { window_.push(type, instance_); }

std::optional<ReplanTrigger> PackingEngine::maybe_replan(long long step) {
  if (!warmed_) return std::nullopt;
  std::optional<TypeDistribution> estimated;
  std::optional<ReplanTrigger> trigger;
  if (window_.full()) {
    estimated = estimate_distribution(window_, instance_, silverman_bandwidth(window_));
    if (kl_divergence(estimated->probs, dist_.probs, params_.kl_epsilon) >= params_.theta_kl) {
      trigger = ReplanTrigger::kKlDrift;
    }
  }
  if (!trigger) {
    for (long long t : tolerance_) {
      if (t >= params_.theta_u) {
        trigger = ReplanTrigger::kTolerance;
        break;
      }
    }
  }
  if (!trigger) return std::nullopt;
  if (!estimated) {
    estimated = estimate_distribution(window_, instance_, silverman_bandwidth(window_));
  }
  adopt_and_plan(*estimated, *trigger, step);
  return trigger;
}

void PackingEngine::adopt_and_plan(const TypeDistribution& distribution, ReplanTrigger trigger,
                                   long long step) {
  distribution.validate(instance_.num_types());
  dist_ = distribution;
  mean_size_ = dist_.mean_size(instance_);
  std::vector<double> demands =
      forecast_demands(dist_, params_.section_length, section_pos_);
  try {
    PlanResult planned = generate_plan(demands, instance_, params_.planner);
    plan_ = std::move(planned.plan);
    entry_fill_.clear();
    for (const PlanEntry& entry : plan_.entries) {
      entry_fill_.push_back(fill_rate(entry.pattern.counts, instance_));
    }
    have_plan_ = true;
    fallback_only_ = false;
  } catch (const std::exception&) {
    stats_.planner_failures++;
    fallback_only_ = true;  // pack by best fit until the next section starts
  }
  std::fill(tolerance_.begin(), tolerance_.end(), 0);
  if (trigger != ReplanTrigger::kInitial) {
    stats_.replans++;
    switch (trigger) {
      case ReplanTrigger::kKlDrift: stats_.kl_replans++; break;
      case ReplanTrigger::kTolerance: stats_.tolerance_replans++; break;
      case ReplanTrigger::kSection: stats_.section_replans++; break;
      case ReplanTrigger::kInitial: break;
    }
  }
  if (have_plan_) {
    stats_.plan_events.push_back(PlanEvent{step, trigger, plan_});
  }
}

void PackingEngine::start_section(long long step) {
  section_pos_ = 0;
  section_index_++;
  fallback_only_ = false;
  if (!warmed_) return;
  if (window_.size() > 0) {
    TypeDistribution estimated =
        estimate_distribution(window_, instance_, silverman_bandwidth(window_));
    adopt_and_plan(estimated, ReplanTrigger::kSection, step);
  } else {
    adopt_and_plan(dist_, ReplanTrigger::kSection, step);
  }
}

RunResult PackingEngine::finish() {
  stats_.bins = solution_.bins_used();
  return RunResult{std::move(solution_), std::move(stats_)};
}

RunResult run_policy(PolicyKind kind, const Instance& instance, const PolicyParams& params) {
  validate_params(params);
  PackingEngine engine(instance, kind, params);

  if (kind == PolicyKind::kCgppL) {
    if (!params.prior.has_value()) {
      throw std::invalid_argument("policy: the prior-seeded policy needs params.prior");
    }
    engine.adopt_and_plan(*params.prior, ReplanTrigger::kInitial, 0);
    engine.set_warmed(true);
  }

  const std::vector<int>& sequence = instance.sequence();
  for (long long step = 0; step < static_cast<long long>(sequence.size()); ++step) {
    int type = sequence[static_cast<size_t>(step)];
    if (kind == PolicyKind::kBestFit) {
      engine.bestfit_step(type, step);
      continue;
    }
    engine.observe(type);
    bool planned_now = false;
    if (engine.section_exhausted()) {
      engine.start_section(step);  // forced replan once warmed
      planned_now = engine.warmed();
    }
    if (!engine.warmed()) {
      if (step < params.memory_length) {
        engine.bestfit_step(type, step);
        engine.advance_position();
        continue;
      }
      TypeDistribution estimated = estimate_distribution(
          engine.window(), instance, silverman_bandwidth(engine.window()));
      engine.adopt_and_plan(estimated, ReplanTrigger::kInitial, step);
      engine.set_warmed(true);
    } else if (!planned_now) {
      engine.maybe_replan(step);
    }
    engine.cgpp_step(type, step);
    engine.advance_position();
  }
  return engine.finish();
}

}  // namespace cgpp
