#include "table.hpp"

#include <set>

#include "errors.hpp"

namespace chartsynth {

int DataTable::precision() const noexcept {
  int p = 0;
  for (const auto& row : values) {
    for (const auto& cell : row) p = cell.scale() > p ? cell.scale() : p;
  }
  return p;
}

namespace {

void check_labels(const std::vector<std::string>& labels, const char* what) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) {
      throw ValidationError(std::string(what) + " " + std::to_string(i) + " is empty");
    }
    if (!seen.insert(labels[i]).second) {
      throw ValidationError(std::string("duplicate ") + what + " '" + labels[i] + "'");
    }
  }
}

}  // namespace

void DataTable::validate() const {
  if (col_headers.empty()) throw ValidationError("table has no columns");
  if (row_labels.empty()) throw ValidationError("table has no rows");
  if (values.size() != row_labels.size()) {
    throw ValidationError("table has " + std::to_string(values.size()) + " value rows for " +
                          std::to_string(row_labels.size()) + " row labels");
  }
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (values[r].size() != col_headers.size()) {
      throw ValidationError("row " + std::to_string(r) + " has " + std::to_string(values[r].size()) +
                            " values, expected " + std::to_string(col_headers.size()));
    }
  }
  check_labels(col_headers, "column header");
  check_labels(row_labels, "row label");
}

}  // namespace chartsynth
