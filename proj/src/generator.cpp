#include "cgpp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cgpp {

namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) {
  uint64_t sm = seed;
  for (auto& s : state_) s = splitmix64(sm);
}

uint64_t Rng::next_u64() {
  uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::next_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("rng: empty integer range");
  double span = static_cast<double>(hi) - lo + 1.0;
  return lo + static_cast<int>(next_unit() * span);
}

DistributionSpec DistributionSpec::make_uniform(int lo, int hi) {
  DistributionSpec s;
  s.kind = DistKind::kUniform;
  s.lo = lo;
  s.hi = hi;
  return s;
}

DistributionSpec DistributionSpec::make_normal(double mu, double sigma, int lo, int hi) {
  DistributionSpec s;
  s.kind = DistKind::kNormal;
  s.mu = mu;
  s.sigma = sigma;
  s.lo = lo;
  s.hi = hi;
  return s;
}

DistributionSpec DistributionSpec::make_binomial(int trials, double p, int offset) {
  DistributionSpec s;
  s.kind = DistKind::kBinomial;
  s.trials = trials;
  s.p = p;
  s.offset = offset;
  s.lo = offset;
  s.hi = offset + trials;
  return s;
}

DistributionSpec DistributionSpec::make_poisson(double lambda, int lo, int hi) {
  DistributionSpec s;
  s.kind = DistKind::kPoisson;
  s.lambda = lambda;
  s.lo = lo;
  s.hi = hi;
  return s;
}

DistributionSpec DistributionSpec::make_weibull(double shape, double scale, int lo, int hi) {
  DistributionSpec s;
  s.kind = DistKind::kWeibull;
  s.shape = shape;
  s.scale = scale;
  s.lo = lo;
  s.hi = hi;
  return s;
}

DistributionSpec DistributionSpec::make_categorical(std::map<int, double> weights) {
  DistributionSpec s;
  s.kind = DistKind::kCategorical;
  s.weights = std::move(weights);
  return s;
}

DistributionSpec DistributionSpec::make_mixture(std::vector<double> weights,
                                                std::vector<DistributionSpec> parts) {
  DistributionSpec s;
  s.kind = DistKind::kMixture;
  s.part_weights = std::move(weights);
  s.parts = std::move(parts);
  return s;
}

DistributionSpec DistributionSpec::make_periodic(int section_size,
                                                 std::vector<DistributionSpec> parts) {
  DistributionSpec s;
  s.kind = DistKind::kPeriodic;
  s.section_size = section_size;
  s.parts = std::move(parts);
  return s;
}

std::vector<int> DistributionSpec::support() const {
  std::set<int> sizes;
  switch (kind) {
    case DistKind::kUniform:
    case DistKind::kNormal:
    case DistKind::kPoisson:
    case DistKind::kWeibull:
      if (lo > hi) throw std::invalid_argument("spec: empty clamp range");
      if (kind == DistKind::kNormal && !(sigma > 0)) {
        throw std::invalid_argument("spec: normal sigma must be positive");
      }
      if (kind == DistKind::kPoisson && !(lambda > 0)) {
        throw std::invalid_argument("spec: poisson lambda must be positive");
      }
      if (kind == DistKind::kWeibull && (!(shape > 0) || !(scale > 0))) {
        throw std::invalid_argument("spec: weibull parameters must be positive");
      }
      for (int s = lo; s <= hi; ++s) sizes.insert(s);
      break;
    case DistKind::kBinomial:
      if (trials < 1 || p < 0 || p > 1) {
        throw std::invalid_argument("spec: binomial parameters out of range");
      }
      for (int s = 0; s <= trials; ++s) sizes.insert(offset + s);
      break;
    case DistKind::kCategorical: {
      if (weights.empty()) throw std::invalid_argument("spec: empty categorical");
      double total = 0;
      for (const auto& [size, w] : weights) {
        if (w < 0) throw std::invalid_argument("spec: negative categorical weight");
        total += w;
        if (w > 0) sizes.insert(size);
      }
      if (!(total > 0)) throw std::invalid_argument("spec: categorical weights sum to zero");
      break;
    }
    case DistKind::kMixture: {
      if (parts.empty() || parts.size() != part_weights.size()) {
        throw std::invalid_argument("spec: mixture parts/weights mismatch");
      }
      double total = 0;
      for (double w : part_weights) {
        if (w < 0) throw std::invalid_argument("spec: negative mixture weight");
        total += w;
      }
      if (!(total > 0)) throw std::invalid_argument("spec: mixture weights sum to zero");
      for (const DistributionSpec& part : parts) {
        for (int s : part.support()) sizes.insert(s);
      }
      break;
    }
    case DistKind::kPeriodic: {
      if (parts.empty()) throw std::invalid_argument("spec: periodic without components");
      if (section_size <= 0) throw std::invalid_argument("spec: periodic section size");
      for (const DistributionSpec& part : parts) {
        for (int s : part.support()) sizes.insert(s);
      }
      break;
    }
  }
  return std::vector<int>(sizes.begin(), sizes.end());
}

namespace {

int clamp_round(double x, int lo, int hi) {
  int v = static_cast<int>(std::llround(x));
  return std::clamp(v, lo, hi);
}

int sample_size(const DistributionSpec& spec, Rng& rng, long long index) {
  switch (spec.kind) {
    case DistKind::kUniform:
      return rng.next_int(spec.lo, spec.hi);
    case DistKind::kNormal: {
      constexpr double kTwoPi = 6.283185307179586;
      double u1 = rng.next_unit();
      double u2 = rng.next_unit();
      double z = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(kTwoPi * u2);
      return clamp_round(spec.mu + spec.sigma * z, spec.lo, spec.hi);
    }
    case DistKind::kBinomial: {
      int successes = 0;
      for (int i = 0; i < spec.trials; ++i) successes += rng.next_unit() < spec.p ? 1 : 0;
      return spec.offset + successes;
    }
    case DistKind::kPoisson: {
      double threshold = std::exp(-spec.lambda);
      int k = 0;
      double prod = rng.next_unit();
      while (prod > threshold) {
        ++k;
        prod *= rng.next_unit();
      }
      return std::clamp(k, spec.lo, spec.hi);
    }
    case DistKind::kWeibull: {
      double u = rng.next_unit();
      double x = spec.scale * std::pow(-std::log(1.0 - u), 1.0 / spec.shape);
      return clamp_round(x, spec.lo, spec.hi);
    }
    case DistKind::kCategorical: {
      double total = 0;
      for (const auto& [size, w] : spec.weights) total += w;
      double target = rng.next_unit() * total;
      double acc = 0;
      int last = spec.weights.begin()->first;
      for (const auto& [size, w] : spec.weights) {
        if (w <= 0) continue;
        acc += w;
        last = size;
        if (target < acc) return size;
      }
      return last;  // guards against rounding at the very top of the CDF
    }
    case DistKind::kMixture: {
      double total = 0;
      for (double w : spec.part_weights) total += w;
      double target = rng.next_unit() * total;
      double acc = 0;
      size_t pick = spec.parts.size() - 1;
      for (size_t i = 0; i < spec.parts.size(); ++i) {
        acc += spec.part_weights[i];
        if (target < acc) {
          pick = i;
          break;
        }
      }
      return sample_size(spec.parts[pick], rng, index);
    }
    case DistKind::kPeriodic: {
      size_t active = static_cast<size_t>((index / spec.section_size) %
                                          static_cast<long long>(spec.parts.size()));
      return sample_size(spec.parts[active], rng, index);
    }
  }
  throw std::logic_error("spec: unhandled distribution kind");
}

}  // namespace

Instance sample_instance(const DistributionSpec& spec, int bin_capacity, long long n,
                         uint64_t seed) {
  if (bin_capacity <= 1) throw std::invalid_argument("generator: capacity too small");
  if (n < 0) throw std::invalid_argument("generator: negative item count");
  std::vector<int> sizes = spec.support();
  if (sizes.front() < 1 || sizes.back() >= bin_capacity) {
    throw std::invalid_argument("generator: support [" + std::to_string(sizes.front()) + ", " +
                                std::to_string(sizes.back()) + "] outside [1, " +
                                std::to_string(bin_capacity - 1) + "]");
  }
  std::vector<ItemType> types;
  std::vector<int> size_to_index(bin_capacity, -1);
  for (size_t i = 0; i < sizes.size(); ++i) {
    types.push_back(ItemType{static_cast<int>(i) + 1, sizes[i]});
    size_to_index[sizes[i]] = static_cast<int>(i);
  }
  Rng rng(seed);
  std::vector<int> sequence;
  sequence.reserve(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    int size = sample_size(spec, rng, i);
    int idx = size_to_index[size];
    if (idx < 0) throw std::logic_error("generator: sampled size outside declared support");
    sequence.push_back(idx);
  }
  return Instance(bin_capacity, std::move(types), std::move(sequence));
}

namespace {

using nlohmann::json;

json spec_to_json(const DistributionSpec& spec) {
  json j;
  switch (spec.kind) {
    case DistKind::kUniform:
      j["kind"] = "uniform";
      j["lo"] = spec.lo;
      j["hi"] = spec.hi;
      break;
    case DistKind::kNormal:
      j["kind"] = "normal";
      j["mu"] = spec.mu;
      j["sigma"] = spec.sigma;
      j["lo"] = spec.lo;
      j["hi"] = spec.hi;
      break;
    case DistKind::kBinomial:
      j["kind"] = "binomial";
      j["trials"] = spec.trials;
      j["p"] = spec.p;
      j["offset"] = spec.offset;
      break;
    case DistKind::kPoisson:
      j["kind"] = "poisson";
      j["lambda"] = spec.lambda;
      j["lo"] = spec.lo;
      j["hi"] = spec.hi;
      break;
    case DistKind::kWeibull:
      j["kind"] = "weibull";
      j["shape"] = spec.shape;
      j["scale"] = spec.scale;
      j["lo"] = spec.lo;
      j["hi"] = spec.hi;
      break;
    case DistKind::kCategorical: {
      j["kind"] = "categorical";
      json w = json::object();
      for (const auto& [size, weight] : spec.weights) w[std::to_string(size)] = weight;
      j["weights"] = std::move(w);
      break;
    }
    case DistKind::kMixture: {
      j["kind"] = "mixture";
      j["weights"] = spec.part_weights;
      json parts = json::array();
      for (const DistributionSpec& part : spec.parts) parts.push_back(spec_to_json(part));
      j["parts"] = std::move(parts);
      break;
    }
    case DistKind::kPeriodic: {
      j["kind"] = "periodic";
      j["section_size"] = spec.section_size;
      json parts = json::array();
      for (const DistributionSpec& part : spec.parts) parts.push_back(spec_to_json(part));
      j["parts"] = std::move(parts);
      break;
    }
  }
  return j;
}

DistributionSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw std::invalid_argument("spec json: missing kind");
  }
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") {
    return DistributionSpec::make_uniform(j.at("lo").get<int>(), j.at("hi").get<int>());
  }
  if (kind == "normal") {
    return DistributionSpec::make_normal(j.at("mu").get<double>(), j.at("sigma").get<double>(),
                                         j.at("lo").get<int>(), j.at("hi").get<int>());
  }
  if (kind == "binomial") {
    return DistributionSpec::make_binomial(j.at("trials").get<int>(), j.at("p").get<double>(),
                                           j.at("offset").get<int>());
  }
  if (kind == "poisson") {
    return DistributionSpec::make_poisson(j.at("lambda").get<double>(), j.at("lo").get<int>(),
                                          j.at("hi").get<int>());
  }
  if (kind == "weibull") {
    return DistributionSpec::make_weibull(j.at("shape").get<double>(),
                                          j.at("scale").get<double>(), j.at("lo").get<int>(),
                                          j.at("hi").get<int>());
  }
  if (kind == "categorical") {
    std::map<int, double> weights;
    for (const auto& [key, value] : j.at("weights").items()) {
      weights[std::stoi(key)] = value.get<double>();
    }
    return DistributionSpec::make_categorical(std::move(weights));
  }
  if (kind == "mixture") {
    std::vector<DistributionSpec> parts;
    for (const json& part : j.at("parts")) parts.push_back(spec_from_json(part));
    return DistributionSpec::make_mixture(j.at("weights").get<std::vector<double>>(),
                                          std::move(parts));
  }
  if (kind == "periodic") {
    std::vector<DistributionSpec> parts;
    for (const json& part : j.at("parts")) parts.push_back(spec_from_json(part));
    return DistributionSpec::make_periodic(j.at("section_size").get<int>(), std::move(parts));
  }
  throw std::invalid_argument("spec json: unknown kind \"" + kind + "\"");
}

}  // namespace

DistributionSpec parse_distribution_spec(const std::string& json_text) {
  json j = json::parse(json_text);
  if (j.is_object() && j.contains("distribution")) j = j.at("distribution");
  DistributionSpec spec = spec_from_json(j);
  spec.support();  // reject out-of-order bounds and mismatched composites early
  return spec;
}

std::string format_distribution_spec(const DistributionSpec& spec) {
  return spec_to_json(spec).dump(2) + "\n";
}

DistributionSpec load_distribution_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_distribution_spec(buf.str());
}

namespace {

std::vector<Preset> build_catalog() {
  std::vector<Preset> presets;
  auto add = [&](std::string name, std::string note, int capacity, DistributionSpec spec) {
    presets.push_back(Preset{std::move(name), std::move(note), capacity, std::move(spec)});
  };

  add("uniform", "item sizes uniform on [1, 100)", 100, DistributionSpec::make_uniform(1, 99));
  add("uniform-b", "item sizes uniform on [10, 60)", 100,
      DistributionSpec::make_uniform(10, 59));
  add("uniform-s", "item sizes uniform on [25, 75)", 100,
      DistributionSpec::make_uniform(25, 74));
  {
    std::map<int, double> weights;
    for (int s = 10; s <= 90; s += 10) weights[s] = 1.0;
    add("uniform-c", "coarse grid {10,20,...,90}, equal weights", 100,
        DistributionSpec::make_categorical(std::move(weights)));
  }
  add("normal", "normal around the range midpoint, sigma = range/6", 100,
      DistributionSpec::make_normal(50.0, 98.0 / 6.0, 1, 99));
  add("normal-b", "normal with mean 35 on [10, 60)", 100,
      DistributionSpec::make_normal(35.0, 49.0 / 6.0, 10, 59));
  add("normal-s", "normal around the range midpoint on [25, 75)", 100,
      DistributionSpec::make_normal(49.5, 49.0 / 6.0, 25, 74));
  {
    std::map<int, double> weights;
    double sigma = 80.0 / 6.0;
    for (int s = 10; s <= 90; s += 10) {
      double d = (s - 50.0) / sigma;
      weights[s] = std::exp(-0.5 * d * d);
    }
    add("normal-c", "coarse grid {10,20,...,90} with normal weights", 100,
        DistributionSpec::make_categorical(std::move(weights)));
  }

  std::vector<DistributionSpec> weibulls;
  for (double shape : {0.5, 1.0, 1.5, 2.0, 5.0}) {
    char name[32];
    std::snprintf(name, sizeof(name), "weibull-%.1f", shape);
    weibulls.push_back(DistributionSpec::make_weibull(shape, 20.0, 1, 99));
    add(name, "weibull, scale 20, clamped to [1, 99]", 100, weibulls.back());
  }
  add("weibull-periodic", "cycles the five weibull shapes every 4000 items", 100,
      DistributionSpec::make_periodic(4000, weibulls));

  {
    std::vector<DistributionSpec> parts;
    for (double p : {0.2, 0.35, 0.5, 0.65}) {
      parts.push_back(DistributionSpec::make_binomial(98, p, 1));
    }
    add("binomial-ps", "binomial(98, p)+1 with p stepping by 0.15 every 2000 items", 100,
        DistributionSpec::make_periodic(2000, std::move(parts)));
  }
  {
    std::vector<DistributionSpec> parts;
    for (double p : {0.2, 0.3, 0.4, 0.5, 0.6}) {
      parts.push_back(DistributionSpec::make_binomial(98, p, 1));
    }
    add("binomial-pb", "binomial(98, p)+1 with p stepping by 0.1 every 2000 items", 100,
        DistributionSpec::make_periodic(2000, std::move(parts)));
  }
  {
    std::vector<DistributionSpec> parts;
    for (double lambda : {5.0, 15.0, 25.0, 35.0, 45.0}) {
      parts.push_back(DistributionSpec::make_poisson(lambda, 1, 99));
    }
    add("poisson-p", "poisson with lambda stepping by 10 every 2000 items", 100,
        DistributionSpec::make_periodic(2000, std::move(parts)));
  }

  add("burke-dual", "two-mode mixture: equal-weight normals at 25 and 65, sigma 5", 100,
      DistributionSpec::make_mixture(
          {0.5, 0.5},
          {DistributionSpec::make_normal(25.0, 5.0, 1, 99),
           DistributionSpec::make_normal(65.0, 5.0, 1, 99)}));

  // Known benchmark families on capacity 9. The published probability tables
  // are not bundled here; these carry placeholder weights until transcribed.
  {
    std::map<int, double> flat;
    for (int s = 1; s <= 8; ++s) flat[s] = 1.0;
    std::string note =
        "placeholder probabilities, transcribe the published table before use";
    add("bw1", note, 9, DistributionSpec::make_categorical(flat));
    add("lw1", note, 9, DistributionSpec::make_categorical(flat));
    add("pp1", note, 9, DistributionSpec::make_categorical(flat));
  }
  return presets;
}

}  // namespace

const std::vector<Preset>& preset_catalog() {
  static const std::vector<Preset> catalog = build_catalog();
  return catalog;
}

const Preset& find_preset(const std::string& name) {
  for (const Preset& p : preset_catalog()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown preset \"" + name + "\"");
}

}  // namespace cgpp
