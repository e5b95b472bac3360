#include "gtl/source.hpp"

namespace gtl {

std::string SourceLoc::str() const {
  return module.str() + ":" + std::to_string(span.start);
}

LineColumn line_column(std::string_view text, std::size_t offset) {
  LineColumn pos;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

ParseError::ParseError(std::string message, std::size_t offset, LineColumn position)
    : Error(std::to_string(position.line) + ":" + std::to_string(position.column) + ": " +
            message),
      detail_(std::move(message)),
      offset_(offset),
      position_(position) {}

StaticTypeError::StaticTypeError(SourceLoc loc, const std::string& message)
    : Error(loc.str() + ": " + message), loc_(std::move(loc)) {}

UnboundVariable::UnboundVariable(SourceLoc loc, Symbol name)
    : StaticTypeError(std::move(loc), "unbound variable " + name.str()), name_(name) {}

}  // namespace gtl
