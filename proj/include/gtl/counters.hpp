#pragma once

#include <cstdint>
#include <string>

namespace gtl {

/// Deterministic cost counters; all monotone during a run.
struct CostCounters {
  std::uint64_t shape_checks = 0;
  std::uint64_t flat_checks = 0;
  std::uint64_t wrappers_allocated = 0;
  std::uint64_t wrapped_calls = 0;
  std::uint64_t blame_ops = 0;
  std::uint64_t steps = 0;
  std::uint64_t map_size = 0;

  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

// `name=value` lines, one per counter.
std::string format_counters(const CostCounters& c);

}  // namespace gtl
