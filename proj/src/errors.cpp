#include "errors.hpp"

namespace chartsynth {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "configuration error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::layout: return "layout error";
    case ErrorKind::unsupported: return "unsupported chart";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

namespace {

std::string format_position(std::size_t line, std::size_t column, const std::string& message) {
  std::string out = std::to_string(line);
  if (column > 0) out += ":" + std::to_string(column);
  return out + ": " + message;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(ErrorKind::parse, format_position(line, column, message)),
      line_(line),
      column_(column),
      detail_(message) {}

}  // namespace chartsynth
