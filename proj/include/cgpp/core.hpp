#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cgpp {

// One declared item type. Declared ids are dense and 1-based; everywhere else
// in the code a type is referred to by its 0-based position in the type table.
struct ItemType {
  int id = 0;
  int size = 0;
};

// Immutable problem instance: bin capacity, type table and arrival sequence.
// The sequence is stored as 0-based type indices.
class Instance {
 public:
  Instance() = default;
  Instance(int bin_capacity, std::vector<ItemType> types, std::vector<int> sequence);

  int bin_capacity() const { return bin_capacity_; }
  int num_types() const { return static_cast<int>(types_.size()); }
  long long num_items() const { return static_cast<long long>(sequence_.size()); }
  const std::vector<ItemType>& types() const { return types_; }
  int size_of(int type_index) const { return types_[type_index].size; }
  const std::vector<int>& sequence() const { return sequence_; }

  // Number of arrivals per type.
  std::vector<long long> type_counts() const;
  long long total_size() const;

 private:
  int bin_capacity_ = 0;
  std::vector<ItemType> types_;
  std::vector<int> sequence_;
};

// Text format: first line "B T N", then T lines "id size", then N type ids in
// arrival order. format_instance produces a canonical rendering, so
// format(parse(format(x))) == format(x) byte for byte.
Instance parse_instance(const std::string& text);
std::string format_instance(const Instance& instance);
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

// A bin configuration: how many items of each type one bin holds.
struct Pattern {
  std::vector<int> counts;

  bool operator==(const Pattern&) const = default;
  bool operator<(const Pattern& other) const { return counts < other.counts; }

  bool empty() const;
  int total_items() const;
  long long packed_size(const Instance& instance) const;
};

// Returns a violation description, or nullopt when the pattern is admissible
// (non-negative counts, not all zero, packed size within capacity).
std::optional<std::string> validate_pattern(const Pattern& pattern, const Instance& instance);

// Fraction of bin capacity used by the given per-type counts.
double fill_rate(std::span<const int> counts, const Instance& instance);

struct PlanEntry {
  Pattern pattern;
  int quota = 0;      // planned number of bins with this pattern
  int remaining = 0;  // quota not yet consumed by plan-open decisions
};

struct Plan {
  std::vector<PlanEntry> entries;

  long long total_quota() const;
};

enum class PlacementCause { kPlanMatch, kPlanOpen, kFallback };

const char* to_string(PlacementCause cause);

struct Placement {
  long long step = 0;  // index into the arrival sequence
  int type = 0;        // type index of the packed item
  int bin = 0;         // bin id the item went into
  PlacementCause cause = PlacementCause::kFallback;
  int plan_entry = -1;  // plan entry consumed when cause == kPlanOpen
};

struct Bin {
  int id = 0;
  long long open_step = 0;
  std::vector<int> content;  // per-type counts
  int residual = 0;          // free capacity
  std::optional<Pattern> assigned;  // pattern the bin was opened for, if any
  std::vector<int> wanted;   // per-type counts the assigned pattern still expects
  bool broken = false;       // true once an off-pattern item lands in the bin

  // Pattern-assigned mode: content + wanted equals the assigned pattern.
  bool pattern_mode() const { return assigned.has_value() && !broken; }
};

struct PackingSolution {
  std::vector<Bin> bins;
  std::vector<Placement> log;

  int bins_used() const { return static_cast<int>(bins.size()); }
};

// Rebuilds per-bin contents by replaying a placement log; used to check that
// a solution's bins are consistent with its own log.
std::vector<std::vector<int>> replay_contents(const Instance& instance,
                                              const std::vector<Placement>& log);

// Human-readable pattern rendering as item sizes, e.g. "5+3+2".
std::string pattern_sizes_string(const Pattern& pattern, const Instance& instance);

}  // namespace cgpp
