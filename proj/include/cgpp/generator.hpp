#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cgpp/core.hpp"

namespace cgpp {

// xoshiro256++ seeded through splitmix64. Both algorithms are published with
// reference implementations, so a generated instance can be reproduced from
// (spec, seed) in any language without depending on one standard library's
// distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  double next_unit();          // uniform in [0, 1)
  int next_int(int lo, int hi);  // uniform over {lo, ..., hi}

 private:
  uint64_t state_[4];
};

enum class DistKind {
  kUniform,
  kNormal,
  kBinomial,
  kPoisson,
  kWeibull,
  kCategorical,
  kMixture,
  kPeriodic,
};

// Declarative description of an item-size distribution. Continuous kinds are
// sampled, rounded to the nearest integer and clamped to [lo, hi]; the
// support of every kind must fit inside [1, B-1] for the chosen capacity.
struct DistributionSpec {
  DistKind kind = DistKind::kUniform;
  // uniform / normal / poisson / weibull clamp range (inclusive)
  int lo = 1;
  int hi = 1;
  double mu = 0.0;      // normal
  double sigma = 1.0;   // normal
  int trials = 1;       // binomial n
  double p = 0.5;       // binomial success probability
  int offset = 0;       // binomial shift
  double lambda = 1.0;  // poisson
  double shape = 1.0;   // weibull
  double scale = 1.0;   // weibull
  std::map<int, double> weights;          // categorical: size -> weight
  std::vector<DistributionSpec> parts;    // mixture / periodic components
  std::vector<double> part_weights;       // mixture component weights
  int section_size = 0;                   // periodic switch interval

  static DistributionSpec make_uniform(int lo, int hi);
  static DistributionSpec make_normal(double mu, double sigma, int lo, int hi);
  static DistributionSpec make_binomial(int trials, double p, int offset);
  static DistributionSpec make_poisson(double lambda, int lo, int hi);
  static DistributionSpec make_weibull(double shape, double scale, int lo, int hi);
  static DistributionSpec make_categorical(std::map<int, double> weights);
  static DistributionSpec make_mixture(std::vector<double> weights,
                                       std::vector<DistributionSpec> parts);
  static DistributionSpec make_periodic(int section_size, std::vector<DistributionSpec> parts);

  // All sizes the spec can emit, ascending. Throws std::invalid_argument on
  // malformed specs.
  std::vector<int> support() const;
};

// JSON (de)serialisation of a spec; schema documented in the README.
DistributionSpec parse_distribution_spec(const std::string& json_text);
std::string format_distribution_spec(const DistributionSpec& spec);
DistributionSpec load_distribution_spec(const std::string& path);

// Draws n item sizes, declares one type per distinct supported size (ids
// ascending by size) and returns the instance. Validates that the support
// fits in [1, B-1].
Instance sample_instance(const DistributionSpec& spec, int bin_capacity, long long n,
                         uint64_t seed);

struct Preset {
  std::string name;
  std::string note;
  int bin_capacity = 100;
  DistributionSpec spec;
};

// Built-in catalog of named distributions.
const std::vector<Preset>& preset_catalog();
const Preset& find_preset(const std::string& name);  // throws on unknown name

}  // namespace cgpp
