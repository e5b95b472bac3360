#include "gtl/config.hpp"

#include <bit>

namespace gtl {

LatticeTooLarge::LatticeTooLarge(std::size_t n)
    : ConfigError("lattice too large: " + std::to_string(n) + " configurable modules (limit " +
                  std::to_string(kMaxConfigurable) + ")") {}

Configuration::Configuration(std::size_t width, std::uint32_t value) : width_(width), value_(value) {
  if (width > kMaxConfigurable) throw LatticeTooLarge(width);
  if (width < 32 && (value >> width) != 0) throw ConfigError("configuration value out of range");
}

Configuration Configuration::all_typed(std::size_t width) {
  if (width > kMaxConfigurable) throw LatticeTooLarge(width);
  return Configuration(width, width == 0 ? 0u : (1u << width) - 1u);
}

Configuration Configuration::parse(std::string_view text, std::size_t width) {
  if (text == "typed") return all_typed(width);
  if (text == "untyped") return all_untyped(width);
  if (text.size() != width)
    throw ConfigError("configuration '" + std::string(text) + "' needs " + std::to_string(width) +
                      " bits");
  std::uint32_t v = 0;
  for (char c : text) {
    if (c != '0' && c != '1')
      throw ConfigError("configuration must be a bit string, 'typed' or 'untyped'");
    v = (v << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return Configuration(width, v);
}

std::size_t Configuration::typed_count() const { return std::popcount(value_); }

std::string Configuration::bits() const {
  std::string s;
  for (std::size_t k = 0; k < width_; ++k) s.push_back(typed(k) ? '1' : '0');
  return s;
}

std::size_t count_configurable(const std::vector<ModuleDecl>& modules) {
  std::size_t n = 0;
  for (const auto& m : modules) n += m.lang == Lang::Configurable;
  return n;
}

std::vector<bool> resolve_langs(const std::vector<ModuleDecl>& modules, const Configuration& config) {
  if (config.width() != count_configurable(modules))
    throw ConfigError("configuration has " + std::to_string(config.width()) + " bits but program has " +
                      std::to_string(count_configurable(modules)) + " configurable modules");
  std::vector<bool> typed;
  std::size_t k = 0;
  for (const auto& m : modules) {
    switch (m.lang) {
      case Lang::Typed: typed.push_back(true); break;
      case Lang::Untyped: typed.push_back(false); break;
      case Lang::Configurable: typed.push_back(config.typed(k++)); break;
    }
  }
  return typed;
}

std::vector<Configuration> enumerate_lattice(std::size_t width) {
  if (width > kMaxConfigurable) throw LatticeTooLarge(width);
  std::vector<Configuration> out;
  const std::uint32_t n = 1u << width;
  out.reserve(n);
  for (std::uint32_t v = 0; v < n; ++v) out.emplace_back(width, v);
  return out;
}

std::vector<Configuration> enumerate_lattice(const std::vector<ModuleDecl>& modules) {
  return enumerate_lattice(count_configurable(modules));
}

}  // namespace gtl
