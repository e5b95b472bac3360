#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace gtl {

// Interned identifier. Interning is thread-safe; comparison is by id.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);

  const std::string& str() const;
  std::uint32_t id() const { return id_; }
  bool empty() const { return id_ == 0; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.id_ != b.id_; }
  friend bool operator<(Symbol a, Symbol b) { return a.id_ < b.id_; }

 private:
  std::uint32_t id_ = 0;
};

}  // namespace gtl

template <>
struct std::hash<gtl::Symbol> {
  std::size_t operator()(gtl::Symbol s) const noexcept { return s.id(); }
};
