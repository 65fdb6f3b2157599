#include "cgpp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cgpp/bounds.hpp"
#include "cgpp/planner.hpp"
#include "json.hpp"

namespace cgpp {

namespace {

std::string fmt_double(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

const std::set<std::string>& known_policies() {
  static const std::set<std::string> names = {"bestfit", "cgpp", "cgpp-l", "offline"};
  return names;
}

PolicyParams params_from_json(const nlohmann::json& j, PolicyParams base) {
  if (j.contains("section_length")) base.section_length = j.at("section_length").get<int>();
  if (j.contains("memory_length")) base.memory_length = j.at("memory_length").get<int>();
  if (j.contains("theta_kl")) base.theta_kl = j.at("theta_kl").get<double>();
  if (j.contains("theta_u")) base.theta_u = j.at("theta_u").get<long long>();
  if (j.contains("theta_o")) base.theta_o = j.at("theta_o").get<double>();
  if (j.contains("kl_epsilon")) base.kl_epsilon = j.at("kl_epsilon").get<double>();
  if (j.contains("profile")) {
    const std::string profile = j.at("profile").get<std::string>();
    if (profile == "large") {
      PolicyParams scaled = large_scale_params();
      scaled.planner = base.planner;
      base = scaled;
    } else if (profile != "default") {
      throw std::invalid_argument("config: unknown params profile \"" + profile + "\"");
    }
  }
  if (j.contains("planner")) {
    const nlohmann::json& p = j.at("planner");
    if (p.contains("max_colgen_iters")) {
      base.planner.max_colgen_iters = p.at("max_colgen_iters").get<int>();
    }
    if (p.contains("ip_node_limit")) base.planner.ip_node_limit = p.at("ip_node_limit").get<int>();
    if (p.contains("lp_tolerance")) base.planner.lp_tolerance = p.at("lp_tolerance").get<double>();
  }
  return base;
}

DatasetConfig dataset_from_json(const nlohmann::json& j) {
  DatasetConfig dataset;
  dataset.name = j.at("name").get<std::string>();
  int sources = 0;
  if (j.contains("preset")) {
    dataset.preset = j.at("preset").get<std::string>();
    sources++;
  }
  if (j.contains("spec")) {
    dataset.spec = parse_distribution_spec(j.at("spec").dump());
    sources++;
  }
  if (j.contains("instance")) {
    dataset.instance_path = j.at("instance").get<std::string>();
    sources++;
  }
  if (sources != 1) {
    throw std::invalid_argument("config: dataset \"" + dataset.name +
                                "\" needs exactly one of preset/spec/instance");
  }
  if (j.contains("bin_capacity")) dataset.bin_capacity = j.at("bin_capacity").get<int>();
  if (j.contains("n_items")) dataset.n_items = j.at("n_items").get<long long>();
  if (j.contains("seeds")) {
    for (const nlohmann::json& s : j.at("seeds")) {
      dataset.seeds.push_back(s.get<uint64_t>());
    }
  }
  if (dataset.instance_path) {
    if (!dataset.seeds.empty() || dataset.n_items > 0) {
      throw std::invalid_argument("config: dataset \"" + dataset.name +
                                  "\" is a fixed instance; seeds/n_items do not apply");
    }
  } else {
    if (dataset.n_items <= 0) {
      throw std::invalid_argument("config: dataset \"" + dataset.name +
                                  "\" needs a positive n_items");
    }
    if (dataset.seeds.empty()) {
      throw std::invalid_argument("config: dataset \"" + dataset.name + "\" needs seeds");
    }
    std::set<uint64_t> distinct(dataset.seeds.begin(), dataset.seeds.end());
    if (distinct.size() != dataset.seeds.size()) {
      throw std::invalid_argument("config: dataset \"" + dataset.name +
                                  "\" repeats a seed");
    }
    if (dataset.spec && !dataset.bin_capacity) {
      throw std::invalid_argument("config: dataset \"" + dataset.name +
                                  "\" with an inline spec needs bin_capacity");
    }
  }
  return dataset;
}

// One expanded unit of work in config order.
struct RunTask {
  const DatasetConfig* dataset = nullptr;
  std::optional<uint64_t> seed;
  std::string policy;
};

Instance materialize(const DatasetConfig& dataset, std::optional<uint64_t> seed) {
  if (dataset.instance_path) return load_instance(*dataset.instance_path);
  if (dataset.preset) {
    const Preset& preset = find_preset(*dataset.preset);
    int capacity = dataset.bin_capacity.value_or(preset.bin_capacity);
    return sample_instance(preset.spec, capacity, dataset.n_items, *seed);
  }
  return sample_instance(*dataset.spec, *dataset.bin_capacity, dataset.n_items, *seed);
}

RunRow execute_task(const RunTask& task, const PolicyParams& params) {
  RunRow row;
  row.dataset = task.dataset->name;
  row.instance_id = task.dataset->name;
  if (task.seed) row.instance_id += "#" + std::to_string(*task.seed);
  row.policy = task.policy;
  try {
    Instance instance = materialize(*task.dataset, task.seed);
    row.l2 = l2_lower_bound(instance);
    auto start = std::chrono::steady_clock::now();
    RunResult result = execute_run(task.policy, instance, params);
    auto stop = std::chrono::steady_clock::now();
    row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    row.bins = result.solution.bins_used();
    row.replans = result.stats.replans;
    row.fallback_items = result.stats.fallback_items;
    row.gap = row.bins - row.l2;
    if (row.gap < 0) {
      row.error = "negative gap: " + std::to_string(row.bins) + " bins below bound " +
                  std::to_string(row.l2);
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

bool RunReport::any_error() const {
  return std::any_of(rows.begin(), rows.end(), [](const RunRow& r) { return !r.ok(); });
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ExperimentConfig config;
  for (const nlohmann::json& d : j.at("datasets")) {
    config.datasets.push_back(dataset_from_json(d));
  }
  std::set<std::string> names;
  for (const DatasetConfig& dataset : config.datasets) {
    if (!names.insert(dataset.name).second) {
      throw std::invalid_argument("config: duplicate dataset name \"" + dataset.name + "\"");
    }
  }
  for (const nlohmann::json& p : j.at("policies")) {
    std::string name = p.get<std::string>();
    if (!known_policies().count(name)) {
      throw std::invalid_argument("config: unknown policy \"" + name + "\"");
    }
    config.policies.push_back(name);
  }
  if (config.policies.empty()) {
    throw std::invalid_argument("config: policies must be non-empty");
  }
  if (j.contains("params")) config.params = params_from_json(j.at("params"), config.params);
  if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("jobs")) config.jobs = j.at("jobs").get<int>();
  if (config.jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

RunResult execute_run(const std::string& policy, const Instance& instance,
                      const PolicyParams& params) {
  if (!known_policies().count(policy)) {
    throw std::invalid_argument("unknown policy \"" + policy + "\"");
  }
  if (policy == "offline") {
    OfflineResult offline = solve_offline(instance, params.planner);
    RunResult result;
    result.solution = std::move(offline.solution);
    result.stats.bins = result.solution.bins_used();
    return result;
  }
  PolicyKind kind = policy_kind_from_name(policy);
  if (kind == PolicyKind::kCgppL && !params.prior) {
    PolicyParams seeded = params;
    std::vector<long long> counts = instance.type_counts();
    seeded.prior = TypeDistribution::from_counts(counts);
    return run_policy(kind, instance, seeded);
  }
  return run_policy(kind, instance, params);
}

RunReport run_experiment(const ExperimentConfig& config) {
  std::vector<RunTask> tasks;
  for (const DatasetConfig& dataset : config.datasets) {
    if (dataset.instance_path) {
      for (const std::string& policy : config.policies) {
        tasks.push_back(RunTask{&dataset, std::nullopt, policy});
      }
      continue;
    }
    for (uint64_t seed : dataset.seeds) {
      for (const std::string& policy : config.policies) {
        tasks.push_back(RunTask{&dataset, seed, policy});
      }
    }
  }

  RunReport report;
  report.rows.resize(tasks.size());
  std::atomic<size_t> next{0};
  int workers = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
  auto work = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      report.rows[i] = execute_task(tasks[i], config.params);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  for (const DatasetConfig& dataset : config.datasets) {
    for (const std::string& policy : config.policies) {
      std::vector<double> gaps;
      for (const RunRow& row : report.rows) {
        if (row.ok() && row.dataset == dataset.name && row.policy == policy) {
          gaps.push_back(static_cast<double>(row.gap));
        }
      }
      AggregateRow agg;
      agg.dataset = dataset.name;
      agg.policy = policy;
      agg.runs = static_cast<int>(gaps.size());
      if (!gaps.empty()) {
        double sum = 0.0;
        for (double g : gaps) sum += g;
        agg.mean_gap = sum / static_cast<double>(gaps.size());
        if (gaps.size() > 1) {
          double ss = 0.0;
          for (double g : gaps) ss += (g - agg.mean_gap) * (g - agg.mean_gap);
          double stdev = std::sqrt(ss / static_cast<double>(gaps.size() - 1));
          agg.ci95_half_width = t_critical_95(static_cast<int>(gaps.size()) - 1) * stdev /
                                std::sqrt(static_cast<double>(gaps.size()));
        }
      }
      report.aggregates.push_back(std::move(agg));
    }
  }
  return report;
}

double t_critical_95(int df) {
  static const double small[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) throw std::invalid_argument("t_critical_95: df must be >= 1");
  if (df <= 30) return small[df - 1];
  if (df < 40) return small[29];
  if (df < 60) return 2.021;
  if (df < 120) return 2.000;
  if (df == 120) return 1.980;
  return 1.960;
}

std::string report_csv(const RunReport& report) {
  std::string out = "dataset,instance,policy,bins,l2,gap,runtime_ms,replans,fallback_items,error\n";
  for (const RunRow& row : report.rows) {
    out += csv_escape(row.dataset) + ',' + csv_escape(row.instance_id) + ',' + row.policy + ',' +
           std::to_string(row.bins) + ',' + std::to_string(row.l2) + ',' +
           std::to_string(row.gap) + ',' + fmt_double(row.runtime_ms, 3) + ',' +
           std::to_string(row.replans) + ',' + std::to_string(row.fallback_items) + ',' +
           csv_escape(row.error) + '\n';
  }
  return out;
}

std::string aggregate_csv(const RunReport& report) {
  std::string out = "dataset,policy,runs,mean_gap,ci95_half_width\n";
  for (const AggregateRow& agg : report.aggregates) {
    out += csv_escape(agg.dataset) + ',' + agg.policy + ',' + std::to_string(agg.runs) + ',' +
           fmt_double(agg.mean_gap, 4) + ',' + fmt_double(agg.ci95_half_width, 4) + '\n';
  }
  return out;
}

std::vector<FillRateRow> fill_rate_series(const PackingSolution& solution,
                                          const Instance& instance) {
  std::vector<FillRateRow> rows;
  rows.reserve(solution.bins.size());
  for (const Bin& bin : solution.bins) {
    FillRateRow row;
    row.bin = bin.id;
    row.open_step = bin.open_step;
    row.fill = fill_rate(bin.content, instance);
    row.mode = bin.pattern_mode() ? "pattern" : "free";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fill_rate_csv(const std::vector<FillRateRow>& rows) {
  std::string out = "bin,open_step,fill_rate,mode\n";
  for (const FillRateRow& row : rows) {
    out += std::to_string(row.bin) + ',' + std::to_string(row.open_step) + ',' +
           fmt_double(row.fill, 6) + ',' + row.mode + '\n';
  }
  return out;
}

std::vector<HistogramRow> pattern_histogram(const PackingSolution& solution,
                                            const Instance& instance) {
  std::map<Pattern, long long> counts;
  for (const Bin& bin : solution.bins) {
    counts[Pattern{bin.content}]++;
  }
  std::vector<HistogramRow> rows;
  rows.reserve(counts.size());
  for (const auto& [pattern, count] : counts) {
    HistogramRow row;
    row.pattern = pattern;
    row.count = count;
    row.fill = fill_rate(pattern.counts, instance);
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const HistogramRow& a, const HistogramRow& b) {
    if (a.fill != b.fill) return a.fill < b.fill;
    return a.pattern < b.pattern;
  });
  return rows;
}

std::string histogram_csv(const std::vector<HistogramRow>& rows, const Instance& instance) {
  std::string out = "pattern,count,fill_rate\n";
  for (const HistogramRow& row : rows) {
    out += csv_escape(pattern_sizes_string(row.pattern, instance)) + ',' +
           std::to_string(row.count) + ',' + fmt_double(row.fill, 6) + '\n';
  }
  return out;
}

double histogram_overlap(const std::vector<HistogramRow>& a,
                         const std::vector<HistogramRow>& b) {
  std::map<Pattern, long long> other;
  for (const HistogramRow& row : b) other[row.pattern] = row.count;
  long long shared = 0;
  long long total = 0;
  for (const HistogramRow& row : a) {
    total += row.count;
    auto it = other.find(row.pattern);
    if (it != other.end()) shared += std::min(row.count, it->second);
  }
  if (total == 0) return 0.0;
  return static_cast<double>(shared) / static_cast<double>(total);
}

}  // namespace cgpp
