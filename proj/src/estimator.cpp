#include "cgpp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cgpp {

TypeDistribution TypeDistribution::uniform(int num_types) {
  if (num_types <= 0) throw std::invalid_argument("distribution: no types");
  return TypeDistribution{std::vector<double>(num_types, 1.0 / num_types)};
}

TypeDistribution TypeDistribution::from_counts(std::span<const long long> counts) {
  long long total = 0;
  for (long long c : counts) {
    if (c < 0) throw std::invalid_argument("distribution: negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("distribution: empty counts");
  TypeDistribution d;
  d.probs.reserve(counts.size());
  for (long long c : counts) d.probs.push_back(static_cast<double>(c) / total);
  return d;
}

double TypeDistribution::mean_size(const Instance& instance) const {
  double mean = 0.0;
  for (size_t t = 0; t < probs.size(); ++t) {
    mean += probs[t] * instance.size_of(static_cast<int>(t));
  }
  return mean;
}

void TypeDistribution::validate(int num_types) const {
  if (static_cast<int>(probs.size()) != num_types) {
    throw std::invalid_argument("distribution: length mismatch");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("distribution: negative probability");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-6) {
    throw std::invalid_argument("distribution: probabilities do not sum to one");
  }
}

MemoryWindow::MemoryWindow(int capacity) : capacity_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("memory window: capacity must be positive");
}

void MemoryWindow::push(int type_index, const Instance& instance) {
  if (type_index < 0 || type_index >= instance.num_types()) {
    throw std::invalid_argument("memory window: unknown type");
  }
  if (counts_.empty()) counts_.assign(instance.num_types(), 0);
  if (static_cast<int>(buffer_.size()) == capacity_) {
    int old = buffer_.front();
    buffer_.pop_front();
    counts_[old]--;
    long long s = instance.size_of(old);
    sum_ -= s;
    sum_sq_ -= s * s;
  }
  buffer_.push_back(type_index);
  counts_[type_index]++;
  long long s = instance.size_of(type_index);
  sum_ += s;
  sum_sq_ += s * s;
}

double MemoryWindow::mean() const {
  if (buffer_.empty()) return 0.0;
  return static_cast<double>(sum_) / static_cast<double>(buffer_.size());
}

double MemoryWindow::stddev() const {
  if (buffer_.empty()) return 0.0;
  double n = static_cast<double>(buffer_.size());
  double m = static_cast<double>(sum_) / n;
  double var = static_cast<double>(sum_sq_) / n - m * m;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

double silverman_bandwidth(const MemoryWindow& window) {
  if (window.size() == 0) {
    throw std::invalid_argument("bandwidth: empty window");
  }
  double h = 1.06 * window.stddev() * std::pow(static_cast<double>(window.size()), -0.2);
  return std::max(1.0, h);
}

TypeDistribution estimate_distribution(const MemoryWindow& window, const Instance& instance,
                                       double bandwidth) {
  if (window.size() == 0) {
    throw std::invalid_argument("estimate: empty window");
  }
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("estimate: bandwidth must be positive");
  }
  const std::vector<long long>& counts = window.counts();
  int num_types = instance.num_types();

  // Kernel values depend only on the integer size difference, so tabulate
  // exp(-d^2 / (2 h^2)) once per call.
  int max_size = 0, min_size = instance.bin_capacity();
  for (int t = 0; t < num_types; ++t) {
    max_size = std::max(max_size, instance.size_of(t));
    min_size = std::min(min_size, instance.size_of(t));
  }
  int span = max_size - min_size;
  std::vector<double> kernel(span + 1);
  double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  for (int d = 0; d <= span; ++d) {
    kernel[d] = std::exp(-static_cast<double>(d) * d * inv2h2);
  }

  TypeDistribution dist;
  dist.probs.assign(num_types, 0.0);
  double total = 0.0;
  for (int t = 0; t < num_types; ++t) {
    double density = 0.0;
    int st = instance.size_of(t);
    for (int u = 0; u < num_types; ++u) {
      if (!counts[u]) continue;
      density += static_cast<double>(counts[u]) * kernel[std::abs(st - instance.size_of(u))];
    }
    dist.probs[t] = density;
    total += density;
  }
  for (double& p : dist.probs) p /= total;
  return dist;
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon) {
  if (p.size() != q.size() || p.empty()) {
    throw std::invalid_argument("kl: length mismatch");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("kl: smoothing epsilon must be positive");
  }
  double denom = 1.0 + epsilon * static_cast<double>(p.size());
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    double pi = (p[i] + epsilon) / denom;
    double qi = (q[i] + epsilon) / denom;
    kl += pi * std::log(pi / qi);
  }
  return kl < 0.0 ? 0.0 : kl;
}

std::vector<double> forecast_demands(const TypeDistribution& distribution, int section_length,
                                     int position) {
  if (position < 0 || position > section_length) {
    throw std::invalid_argument("forecast: position outside the section");
  }
  std::vector<double> demands(distribution.probs.size(), 0.0);
  double remaining = static_cast<double>(section_length - position);
  for (size_t t = 0; t < demands.size(); ++t) {
    demands[t] = distribution.probs[t] * remaining;
  }
  return demands;
}

}  // namespace cgpp
