#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gtl/source.hpp"
#include "gtl/syntax.hpp"

namespace gtl {

inline constexpr std::size_t kMaxConfigurable = 16;

class ConfigError : public Error {
 public:
  using Error::Error;
};

class LatticeTooLarge : public ConfigError {
 public:
  explicit LatticeTooLarge(std::size_t n);
};

/// One bit per Configurable module, in declaration order; 1 means typed.
/// The leftmost character of the bit string is the first module and the
/// most significant bit, so ascending `value()` is the lattice order.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::size_t width, std::uint32_t value);

  static Configuration all_typed(std::size_t width);
  static Configuration all_untyped(std::size_t width) { return Configuration(width, 0); }
  // Accepts a bit string of exactly `width` characters, or `typed`/`untyped`.
  static Configuration parse(std::string_view text, std::size_t width);

  std::size_t width() const { return width_; }
  std::uint32_t value() const { return value_; }
  bool typed(std::size_t k) const { return (value_ >> (width_ - 1 - k)) & 1u; }
  std::size_t typed_count() const;
  std::string bits() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::size_t width_ = 0;
  std::uint32_t value_ = 0;
};

std::size_t count_configurable(const std::vector<ModuleDecl>& modules);

// Per-module typedness under `config`; fixed-language modules keep theirs.
std::vector<bool> resolve_langs(const std::vector<ModuleDecl>& modules, const Configuration& config);

// All 2^N configurations in ascending order. Throws LatticeTooLarge for N > 16.
std::vector<Configuration> enumerate_lattice(const std::vector<ModuleDecl>& modules);
std::vector<Configuration> enumerate_lattice(std::size_t width);

}  // namespace gtl
