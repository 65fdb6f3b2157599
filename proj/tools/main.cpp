#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cgpp/bench.hpp"
#include "cgpp/bounds.hpp"
#include "cgpp/core.hpp"
#include "cgpp/generator.hpp"
#include "cgpp/policy.hpp"
#include "json.hpp"

namespace {

using namespace cgpp;

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

TypeDistribution load_prior(const std::string& arg, const Instance& instance) {
  if (arg == "empirical") {
    std::vector<long long> counts = instance.type_counts();
    return TypeDistribution::from_counts(counts);
  }
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open prior file: " + arg);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.is_object() && j.contains("probs")) j = j.at("probs");
  TypeDistribution prior;
  prior.probs = j.get<std::vector<double>>();
  prior.validate(instance.num_types());
  return prior;
}

struct GenArgs {
  std::string preset;
  std::string spec_path;
  std::string out_path;
  long long n = 0;
  int bin_capacity = 0;
  uint64_t seed = 1;
  bool list = false;
};

int run_gen(const GenArgs& args) {
  if (args.list) {
    for (const Preset& preset : preset_catalog()) {
      std::cout << preset.name << "  (B=" << preset.bin_capacity << ") " << preset.note << "\n";
    }
    return 0;
  }
  if (args.preset.empty() == args.spec_path.empty()) {
    throw std::runtime_error("gen: pass exactly one of --preset or --spec");
  }
  if (args.n <= 0) throw std::runtime_error("gen: --n must be positive");
  DistributionSpec spec;
  int capacity = args.bin_capacity;
  if (!args.preset.empty()) {
    const Preset& preset = find_preset(args.preset);
    spec = preset.spec;
    if (capacity == 0) capacity = preset.bin_capacity;
  } else {
    spec = load_distribution_spec(args.spec_path);
    if (capacity == 0) throw std::runtime_error("gen: --spec needs --bin-capacity");
  }
  Instance instance = sample_instance(spec, capacity, args.n, args.seed);
  std::string text = format_instance(instance);
  if (args.out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(args.out_path, text);
  }
  return 0;
}

struct RunArgs {
  std::string policy;
  std::string instance_path;
  std::string prior;
  std::string profile = "default";
  std::string report_path;
  std::string fillrate_path;
  std::string histogram_path;
  PolicyParams params;
};

int run_run(const RunArgs& args, const CLI::App& cmd) {
  Instance instance = load_instance(args.instance_path);
  PolicyParams params;
  if (args.profile == "large") {
    params = large_scale_params();
  } else if (args.profile != "default") {
    throw std::runtime_error("run: unknown profile \"" + args.profile + "\"");
  }
  if (cmd.count("--section-length")) params.section_length = args.params.section_length;
  if (cmd.count("--memory-length")) params.memory_length = args.params.memory_length;
  if (cmd.count("--theta-kl")) params.theta_kl = args.params.theta_kl;
  if (cmd.count("--theta-u")) params.theta_u = args.params.theta_u;
  if (cmd.count("--theta-o")) params.theta_o = args.params.theta_o;
  if (cmd.count("--colgen-iters")) params.planner.max_colgen_iters = args.params.planner.max_colgen_iters;
  if (cmd.count("--node-limit")) params.planner.ip_node_limit = args.params.planner.ip_node_limit;
  if (cmd.count("--lp-tolerance")) params.planner.lp_tolerance = args.params.planner.lp_tolerance;
  if (!args.prior.empty()) params.prior = load_prior(args.prior, instance);

  auto start = std::chrono::steady_clock::now();
  RunResult result = execute_run(args.policy, instance, params);
  auto stop = std::chrono::steady_clock::now();
  double runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();

  long long l2 = l2_lower_bound(instance);
  long long bins = result.solution.bins_used();
  std::cout << "policy=" << args.policy << " bins=" << bins << " l2=" << l2
            << " gap=" << (bins - l2) << " replans=" << result.stats.replans
            << " fallback_items=" << result.stats.fallback_items << " runtime_ms=" << runtime_ms
            << "\n";

  if (!args.report_path.empty()) {
    RunReport report;
    RunRow row;
    row.dataset = "cli";
    row.instance_id = args.instance_path;
    row.policy = args.policy;
    row.bins = bins;
    row.l2 = l2;
    row.gap = bins - l2;
    row.runtime_ms = runtime_ms;
    row.replans = result.stats.replans;
    row.fallback_items = result.stats.fallback_items;
    report.rows.push_back(std::move(row));
    write_text_file(args.report_path, report_csv(report));
  }
  if (!args.fillrate_path.empty()) {
    write_text_file(args.fillrate_path, fill_rate_csv(fill_rate_series(result.solution, instance)));
  }
  if (!args.histogram_path.empty()) {
    write_text_file(args.histogram_path,
                    histogram_csv(pattern_histogram(result.solution, instance), instance));
  }
  return bins - l2 >= 0 ? 0 : 1;
}

struct BenchArgs {
  std::string config_path;
  std::string out_dir;
  int jobs = 0;
};

int run_bench(const BenchArgs& args) {
  ExperimentConfig config = load_experiment_config(args.config_path);
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (args.jobs > 0) config.jobs = args.jobs;

  RunReport report = run_experiment(config);

  std::filesystem::create_directories(config.out_dir);
  std::string report_path = config.out_dir + "/report.csv";
  std::string aggregate_path = config.out_dir + "/aggregate.csv";
  write_text_file(report_path, report_csv(report));
  write_text_file(aggregate_path, aggregate_csv(report));

  for (const AggregateRow& agg : report.aggregates) {
    std::cout << "dataset=" << agg.dataset << " policy=" << agg.policy << " runs=" << agg.runs
              << " mean_gap=" << agg.mean_gap << " ci95=" << agg.ci95_half_width << "\n";
  }
  std::cout << "report: " << report_path << "\n";
  std::cout << "aggregate: " << aggregate_path << "\n";

  bool failed = false;
  for (const RunRow& row : report.rows) {
    if (!row.ok()) {
      std::cerr << "error: " << row.instance_id << " " << row.policy << ": " << row.error << "\n";
      failed = true;
    }
  }
  return failed ? 1 : 0;
}

int run_bound(const std::string& instance_path) {
  Instance instance = load_instance(instance_path);
  BoundReport report = bound_report(instance);
  std::cout << report.l1 << " " << report.l2;
  if (report.exact) std::cout << " " << *report.exact;
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D online bin packing: plan-guided policies, baselines, bounds and benchmarks"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a seeded instance file");
  gen->add_option("--preset", gen_args.preset, "Built-in distribution preset name");
  gen->add_option("--spec", gen_args.spec_path, "Distribution spec JSON file");
  gen->add_option("--n", gen_args.n, "Number of items");
  gen->add_option("--bin-capacity", gen_args.bin_capacity, "Bin capacity (preset default when 0)");
  gen->add_option("--seed", gen_args.seed, "RNG seed (default 1)");
  gen->add_option("--out", gen_args.out_path, "Output file (stdout when omitted)");
  gen->add_flag("--list", gen_args.list, "List built-in presets and exit");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run one policy over an instance file");
  run->add_option("--policy", run_args.policy, "bestfit | cgpp | cgpp-l | offline")->required();
  run->add_option("--instance", run_args.instance_path, "Instance file")->required();
  run->add_option("--profile", run_args.profile, "Parameter profile: default | large");
  run->add_option("--section-length", run_args.params.section_length, "Items per section (L)");
  run->add_option("--memory-length", run_args.params.memory_length, "Sliding window size (k)");
  run->add_option("--theta-kl", run_args.params.theta_kl, "KL drift threshold");
  run->add_option("--theta-u", run_args.params.theta_u, "Per-type tolerance threshold");
  run->add_option("--theta-o", run_args.params.theta_o, "Open-space risk threshold");
  run->add_option("--colgen-iters", run_args.params.planner.max_colgen_iters,
                  "Column generation iteration cap");
  run->add_option("--node-limit", run_args.params.planner.ip_node_limit,
                  "Branch-and-bound node limit");
  run->add_option("--lp-tolerance", run_args.params.planner.lp_tolerance,
                  "Reduced-cost stopping tolerance");
  run->add_option("--prior", run_args.prior,
                  "Prior for cgpp-l: \"empirical\" or a JSON file with probs");
  run->add_option("--report", run_args.report_path, "Write a one-row report CSV here");
  run->add_option("--fillrate", run_args.fillrate_path, "Write the fill-rate series CSV here");
  run->add_option("--histogram", run_args.histogram_path, "Write the pattern histogram CSV here");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Run an experiment config");
  bench->add_option("--config", bench_args.config_path, "Experiment config JSON")->required();
  bench->add_option("--out", bench_args.out_dir, "Output directory (overrides config)");
  bench->add_option("--jobs", bench_args.jobs, "Worker threads (overrides config)");

  std::string bound_instance;
  CLI::App* bound = app.add_subcommand("bound", "Print lower bounds for an instance");
  bound->add_option("--instance", bound_instance, "Instance file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (run->parsed()) return run_run(run_args, *run);
    if (bench->parsed()) return run_bench(bench_args);
    if (bound->parsed()) return run_bound(bound_instance);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
