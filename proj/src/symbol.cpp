#include "gtl/symbol.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace gtl {
namespace {

struct Interner {
  std::shared_mutex mutex;
  std::deque<std::string> names{std::string{}};
  std::unordered_map<std::string_view, std::uint32_t> ids;
};

Interner& interner() {
  static Interner table;
  return table;
}

}  // namespace

Symbol::Symbol(std::string_view name) {
  if (name.empty()) return;
  Interner& table = interner();
  {
    std::shared_lock lock(table.mutex);
    if (auto it = table.ids.find(name); it != table.ids.end()) {
      id_ = it->second;
      return;
    }
  }
  std::unique_lock lock(table.mutex);
  if (auto it = table.ids.find(name); it != table.ids.end()) {
    id_ = it->second;
    return;
  }
  table.names.emplace_back(name);
  id_ = static_cast<std::uint32_t>(table.names.size() - 1);
  table.ids.emplace(table.names.back(), id_);
}

const std::string& Symbol::str() const {
  Interner& table = interner();
  std::shared_lock lock(table.mutex);
  return table.names[id_];
}

}  // namespace gtl
