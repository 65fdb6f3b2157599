#include "cgpp/core.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cgpp {

Instance::Instance(int bin_capacity, std::vector<ItemType> types, std::vector<int> sequence)
    : bin_capacity_(bin_capacity), types_(std::move(types)), sequence_(std::move(sequence)) {
  if (bin_capacity_ <= 0) {
    throw std::invalid_argument("instance: bin capacity must be positive");
  }
  if (types_.empty()) {
    throw std::invalid_argument("instance: at least one item type is required");
  }
  for (int i = 0; i < static_cast<int>(types_.size()); ++i) {
    const ItemType& t = types_[i];
    if (t.id != i + 1) {
      throw std::invalid_argument("instance: type ids must be dense, 1-based and in order");
    }
    if (t.size < 1 || t.size >= bin_capacity_) {
      throw std::invalid_argument("instance: type sizes must satisfy 1 <= size < capacity");
    }
  }
  for (int idx : sequence_) {
    if (idx < 0 || idx >= static_cast<int>(types_.size())) {
      throw std::invalid_argument("instance: sequence refers to an undeclared type");
    }
  }
}

std::vector<long long> Instance::type_counts() const {
  std::vector<long long> counts(types_.size(), 0);
  for (int idx : sequence_) counts[idx]++;
  return counts;
}

long long Instance::total_size() const {
  long long total = 0;
  for (int idx : sequence_) total += types_[idx].size;
  return total;
}

Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  long long b = 0, t = 0, n = 0;
  if (!(in >> b >> t >> n)) {
    throw std::invalid_argument("instance parse: malformed header, expected \"B T N\"");
  }
  if (t <= 0 || n < 0) {
    throw std::invalid_argument("instance parse: header counts out of range");
  }
  std::vector<ItemType> types;
  types.reserve(static_cast<size_t>(t));
  for (long long i = 0; i < t; ++i) {
    ItemType ty;
    if (!(in >> ty.id >> ty.size)) {
      throw std::invalid_argument("instance parse: truncated type table");
    }
    types.push_back(ty);
  }
  std::vector<int> sequence;
  sequence.reserve(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    int id = 0;
    if (!(in >> id)) {
      throw std::invalid_argument("instance parse: truncated arrival sequence");
    }
    if (id < 1 || id > t) {
      throw std::invalid_argument("instance parse: sequence id out of range");
    }
    sequence.push_back(id - 1);
  }
  std::string tail;
  if (in >> tail) {
    throw std::invalid_argument("instance parse: trailing tokens after sequence");
  }
  return Instance(static_cast<int>(b), std::move(types), std::move(sequence));
}

std::string format_instance(const Instance& instance) {
  std::ostringstream out;
  out << instance.bin_capacity() << ' ' << instance.num_types() << ' ' << instance.num_items()
      << '\n';
  for (const ItemType& t : instance.types()) {
    out << t.id << ' ' << t.size << '\n';
  }
  const std::vector<int>& seq = instance.sequence();
  constexpr int kPerLine = 20;
  for (size_t i = 0; i < seq.size(); ++i) {
    out << seq[i] + 1;
    out << ((i + 1) % kPerLine == 0 || i + 1 == seq.size() ? '\n' : ' ');
  }
  return out.str();
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open instance file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write instance file: " + path);
  }
  out << format_instance(instance);
}

bool Pattern::empty() const {
  return std::all_of(counts.begin(), counts.end(), [](int c) { return c == 0; });
}

int Pattern::total_items() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

long long Pattern::packed_size(const Instance& instance) const {
  long long total = 0;
  for (size_t t = 0; t < counts.size(); ++t) {
    total += static_cast<long long>(counts[t]) * instance.size_of(static_cast<int>(t));
  }
  return total;
}

std::optional<std::string> validate_pattern(const Pattern& pattern, const Instance& instance) {
  if (static_cast<int>(pattern.counts.size()) != instance.num_types()) {
    return "pattern has " + std::to_string(pattern.counts.size()) + " counts, expected " +
           std::to_string(instance.num_types());
  }
  for (int c : pattern.counts) {
    if (c < 0) return std::string("pattern has a negative count");
  }
  if (pattern.empty()) {
    return std::string("pattern is empty");
  }
  long long packed = pattern.packed_size(instance);
  if (packed > instance.bin_capacity()) {
    return "pattern size " + std::to_string(packed) + " exceeds capacity " +
           std::to_string(instance.bin_capacity());
  }
  return std::nullopt;
}

double fill_rate(std::span<const int> counts, const Instance& instance) {
  long long total = 0;
  for (size_t t = 0; t < counts.size(); ++t) {
    total += static_cast<long long>(counts[t]) * instance.size_of(static_cast<int>(t));
  }
  return static_cast<double>(total) / static_cast<double>(instance.bin_capacity());
}

long long Plan::total_quota() const {
  long long total = 0;
  for (const PlanEntry& e : entries) total += e.quota;
  return total;
}

const char* to_string(PlacementCause cause) {
  switch (cause) {
    case PlacementCause::kPlanMatch: return "plan-match";
    case PlacementCause::kPlanOpen: return "plan-open";
    case PlacementCause::kFallback: return "fallback";
  }
  return "unknown";
}

std::vector<std::vector<int>> replay_contents(const Instance& instance,
                                              const std::vector<Placement>& log) {
  std::vector<std::vector<int>> bins;
  for (const Placement& p : log) {
    if (p.step < 0 || p.step >= instance.num_items()) {
      throw std::invalid_argument("replay: placement step outside the sequence");
    }
    if (instance.sequence()[static_cast<size_t>(p.step)] != p.type) {
      throw std::invalid_argument("replay: placement type disagrees with the sequence");
    }
    if (p.bin < 0) {
      throw std::invalid_argument("replay: negative bin id");
    }
    if (p.bin >= static_cast<int>(bins.size())) {
      bins.resize(static_cast<size_t>(p.bin) + 1, std::vector<int>(instance.num_types(), 0));
    }
    bins[p.bin][p.type]++;
  }
  return bins;
}

std::string pattern_sizes_string(const Pattern& pattern, const Instance& instance) {
  std::vector<int> sizes;
  for (size_t t = 0; t < pattern.counts.size(); ++t) {
    for (int c = 0; c < pattern.counts[t]; ++c) {
      sizes.push_back(instance.size_of(static_cast<int>(t)));
    }
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<int>());
  std::string out;
  for (size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += '+';
    out += std::to_string(sizes[i]);
  }
  return out;
}

}  // namespace cgpp
