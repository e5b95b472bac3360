#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gtl/symbol.hpp"

namespace gtl {

enum class Origin { User, Desugared };

// Half-open character-offset range into the source text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
};

struct SourceLoc {
  Symbol module;
  Span span;
  Origin origin = Origin::User;

  // `module:offset`, the canonical rendering used in diagnostics.
  std::string str() const;
};

struct LineColumn {
  std::size_t line = 1;
  std::size_t column = 1;
};

LineColumn line_column(std::string_view text, std::size_t offset);

// Base class for every error the toolchain reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t offset, LineColumn position);
  std::size_t offset() const { return offset_; }
  LineColumn position() const { return position_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  std::size_t offset_;
  LineColumn position_;
};

class StaticTypeError : public Error {
 public:
  StaticTypeError(SourceLoc loc, const std::string& message);
  const SourceLoc& loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

class UnboundVariable : public StaticTypeError {
 public:
  UnboundVariable(SourceLoc loc, Symbol name);
  Symbol name() const { return name_; }

 private:
  Symbol name_;
};

}  // namespace gtl
