#pragma once

#include <deque>
#include <span>
#include <vector>

#include "cgpp/core.hpp"

namespace cgpp {

// Probability of each item type, indexed like the instance type table.
struct TypeDistribution {
  std::vector<double> probs;

  static TypeDistribution uniform(int num_types);
  static TypeDistribution from_counts(std::span<const long long> counts);

  // Expected item size under this distribution.
  double mean_size(const Instance& instance) const;
  void validate(int num_types) const;  // throws std::invalid_argument
};

// Sliding buffer over the last `capacity` observed items. Per-type counts and
// the size moments are maintained incrementally, so pushing an item is O(1)
// and estimation never has to walk the raw buffer.
class MemoryWindow {
 public:
  explicit MemoryWindow(int capacity);

  void push(int type_index, const Instance& instance);
  int size() const { return static_cast<int>(buffer_.size()); }
  int capacity() const { return capacity_; }
  bool full() const { return size() == capacity_; }
  const std::vector<long long>& counts() const { return counts_; }

  double mean() const;
  double stddev() const;  // population standard deviation of buffered sizes

 private:
  int capacity_ = 0;
  std::deque<int> buffer_;
  std::vector<long long> counts_;
  long long sum_ = 0;
  long long sum_sq_ = 0;
};

// Rule-of-thumb kernel width: 1.06 * stddev(window) * n^(-1/5), floored at 1
// so a constant window still yields a usable kernel.
double silverman_bandwidth(const MemoryWindow& window);

// Gaussian kernel density estimate over the declared type sizes: one kernel
// per buffered item (grouped by type count), evaluated at every type size and
// normalised into a probability vector. The window must be non-empty.
TypeDistribution estimate_distribution(const MemoryWindow& window, const Instance& instance,
                                       double bandwidth);

// KL divergence D(p || q) after epsilon-smoothing and renormalising both
// arguments, which keeps the value finite for empirical vectors with zeros.
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double epsilon = 1e-6);

// Expected demand per type over the remainder of a section of length
// section_length with position items already seen.
std::vector<double> forecast_demands(const TypeDistribution& distribution, int section_length,
                                     int position);

}  // namespace cgpp
