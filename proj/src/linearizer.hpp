#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "table.hpp"

namespace chartsynth::linearizer {

/// Target text for chart-to-table pairs:
///
///   TITLE | <title>
///    | <h1> | <h2> | ...
///   <label> | <v1> | <v2> | ...
///
/// Cells are joined by " | ". Inside cell text '\' becomes "\\", '|' becomes
/// "\p" and a newline becomes "\n". Numbers use the table precision.
std::string linearize(const DataTable& table);

/// Raised by delinearize. `partial()` holds every complete row read before the
/// failure (when the title and header lines were readable).
class DelinearizeError : public ParseError {
 public:
  DelinearizeError(std::size_t line, const std::string& message, std::optional<DataTable> partial)
      : ParseError(line, 0, message), partial_(std::move(partial)) {}

  const std::optional<DataTable>& partial() const noexcept { return partial_; }

 private:
  std::optional<DataTable> partial_;
};

/// Inverse of linearize. Lenient about the single spaces around separators.
DataTable delinearize(std::string_view text);

std::string escape_cell(std::string_view cell);
/// Throws std::invalid_argument on a dangling or unknown escape.
std::string unescape_cell(std::string_view cell);

}  // namespace chartsynth::linearizer
