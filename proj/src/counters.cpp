#include "gtl/counters.hpp"

namespace gtl {

std::string format_counters(const CostCounters& c) {
  std::string out;
  auto line = [&](const char* name, std::uint64_t v) {
    out += name;
    out += '=';
    out += std::to_string(v);
    out += '\n';
  };
  line("shape_checks", c.shape_checks);
  line("flat_checks", c.flat_checks);
  line("wrappers_allocated", c.wrappers_allocated);
  line("wrapped_calls", c.wrapped_calls);
  line("blame_ops", c.blame_ops);
  line("steps", c.steps);
  line("map_size", c.map_size);
  return out;
}

}  // namespace gtl
