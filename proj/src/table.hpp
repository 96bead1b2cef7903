#pragma once

#include <string>
#include <vector>

#include "decimal.hpp"

namespace chartsynth {

/// Titled grid of numeric cells: values[r][c] belongs to row_labels[r] and
/// col_headers[c]. Equality compares cell values numerically.
struct DataTable {
  std::string title;
  std::vector<std::string> col_headers;
  std::vector<std::string> row_labels;
  std::vector<std::vector<Decimal>> values;

  std::size_t rows() const noexcept { return row_labels.size(); }
  std::size_t cols() const noexcept { return col_headers.size(); }

  /// Widest cell scale; the number of decimals every cell is printed with.
  int precision() const noexcept;

  /// Throws ValidationError describing the first violated invariant: at least
  /// one row and column, rectangular values, non-empty unique labels.
  void validate() const;

  friend bool operator==(const DataTable&, const DataTable&) = default;
};

}  // namespace chartsynth
