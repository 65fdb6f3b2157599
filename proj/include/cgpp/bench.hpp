#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgpp/core.hpp"
#include "cgpp/generator.hpp"
#include "cgpp/policy.hpp"

namespace cgpp {

// One benchmark data set: either a named preset, an inline distribution spec,
// or a fixed instance file. Generated data sets run once per seed.
struct DatasetConfig {
  std::string name;
  std::optional<std::string> preset;
  std::optional<DistributionSpec> spec;
  std::optional<std::string> instance_path;
  long long n_items = 0;
  std::optional<int> bin_capacity;  // defaults to the preset capacity
  std::vector<uint64_t> seeds;
};

struct ExperimentConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<std::string> policies;  // bestfit | cgpp | cgpp-l | offline
  PolicyParams params;
  std::string out_dir = "results";
  int jobs = 1;
};

// JSON config schema (see README): {"datasets": [...], "policies": [...],
// "params": {...}, "out_dir": "...", "jobs": N}.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct RunRow {
  std::string dataset;
  std::string instance_id;
  std::string policy;
  long long bins = 0;
  long long l2 = 0;
  long long gap = 0;
  double runtime_ms = 0.0;
  long long replans = 0;
  long long fallback_items = 0;
  std::string error;  // empty when the run succeeded

  bool ok() const { return error.empty(); }
};

struct AggregateRow {
  std::string dataset;
  std::string policy;
  int runs = 0;  // successful runs entering the aggregate
  double mean_gap = 0.0;
  double ci95_half_width = 0.0;
};

struct RunReport {
  std::vector<RunRow> rows;
  std::vector<AggregateRow> aggregates;

  bool any_error() const;
};

// Runs one named policy over an instance; "offline" invokes the oracle
// planner on the exact demand counts. The prior-seeded policy falls back to
// the instance's empirical type frequencies when params.prior is unset.
RunResult execute_run(const std::string& policy, const Instance& instance,
                      const PolicyParams& params);

// Expands the config into (instance, policy) runs, executes them on up to
// config.jobs workers and aggregates gaps per (dataset, policy). Row order
// follows the config regardless of completion order; a failed run becomes an
// error row instead of aborting the batch. Apart from runtime_ms the report
// is deterministic for a fixed config.
RunReport run_experiment(const ExperimentConfig& config);

// Two-sided 95% critical value of Student's t with df degrees of freedom.
// Table lookup; between rows the smaller df applies, beyond df 120 the
// normal value 1.960.
double t_critical_95(int df);

std::string report_csv(const RunReport& report);
std::string aggregate_csv(const RunReport& report);

struct FillRateRow {
  int bin = 0;
  long long open_step = 0;
  double fill = 0.0;
  std::string mode;  // "pattern" or "free"
};

// One row per bin in opening order.
std::vector<FillRateRow> fill_rate_series(const PackingSolution& solution,
                                          const Instance& instance);
std::string fill_rate_csv(const std::vector<FillRateRow>& rows);

struct HistogramRow {
  Pattern pattern;  // realized bin content
  long long count = 0;
  double fill = 0.0;
};

// Bins grouped by realized content, ascending by fill rate (ties by count
// vector) so equally filled patterns land in a stable order.
std::vector<HistogramRow> pattern_histogram(const PackingSolution& solution,
                                            const Instance& instance);
std::string histogram_csv(const std::vector<HistogramRow>& rows, const Instance& instance);

// Fraction of a's bins whose realized pattern also shows up in b:
// sum over patterns of min(count_a, count_b) divided by a's bin total.
double histogram_overlap(const std::vector<HistogramRow>& a,
                         const std::vector<HistogramRow>& b);

}  // namespace cgpp
