#pragma once

#include <stdexcept>
#include <string>

namespace chartsynth {

enum class ErrorKind {
  config,
  parse,
  validation,
  layout,
  unsupported,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(ErrorKind::config, message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::validation, message) {}
};

class LayoutError : public Error {
 public:
  explicit LayoutError(const std::string& message) : Error(ErrorKind::layout, message) {}
};

class UnsupportedChartError : public Error {
 public:
  explicit UnsupportedChartError(const std::string& message)
      : Error(ErrorKind::unsupported, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

/// Parse failure with a 1-based source position. `column` is 0 when only the
/// line is known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

}  // namespace chartsynth
