// LRU stack distances and Data Movement Distance accumulation.
//
// Distance convention is inclusive: the distance of a reuse is the number of
// distinct data touched since the previous access to the same datum,
// counting that datum. In "a b b b c a" the second a has distance 3; an
// immediate re-access has distance 1. A first access is a cold miss.

#ifndef DMC_REUSE_HPP
#define DMC_REUSE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dmc/core.hpp"

namespace dmc {

/// Per-access outcome of a stack-distance run. 0 marks a cold miss.
struct DistanceSequence {
  static constexpr std::uint64_t kCold = 0;

  std::vector<std::uint64_t> values;

  std::size_t size() const { return values.size(); }
  bool is_cold(std::size_t i) const { return values[i] == kCold; }
  std::uint64_t operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const DistanceSequence&,
                         const DistanceSequence&) = default;
};

/// Naive LRU stack scan, O(N * M). The reference the fast engine is checked
/// against.
DistanceSequence stack_distances_oracle(const Trace& trace);

/// Fenwick tree over last-access timestamps with periodic timestamp
/// compaction: O(N log M) time, O(M) live tree size.
DistanceSequence stack_distances_fast(const Trace& trace);

/// Sizes of the objects that the trace touches at least once, in
/// declaration order.
std::vector<std::uint64_t> touched_object_sizes(const Trace& trace);

/// Sums sqrt(d) over the finite distances and prices cold misses per the
/// configured policy. Granularity is not applied here; see
/// scale_granularity().
DmdReport accumulate_dmd(const DistanceSequence& distances,
                         const AnalysisConfig& config,
                         std::span<const std::uint64_t> touched_sizes);

/// Maps every element access to the access of its cache block. Each block
/// becomes a size-1 object whose id is (base + offset) / block_size.
Trace apply_block_transform(const Trace& trace, const LayoutTable& layout);

/// Lower-bound cost of first-touching m data: m^1.5.
double cold_cost(double m);

enum class Engine { kFast, kOracle };

/// Full pipeline: optional block transform (block_size > 1), stack
/// distances with the chosen engine, accumulation, then granularity scaling.
DmdReport analyze(const Trace& trace, const AnalysisConfig& config,
                  Engine engine = Engine::kFast);

}  // namespace dmc

#endif  // DMC_REUSE_HPP
