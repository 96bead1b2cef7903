#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decimal.hpp"
#include "table.hpp"

namespace chartsynth::tablegen {

struct IntRange {
  int min = 1;
  int max = 1;

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct TableGenParams {
  IntRange rows{3, 8};
  IntRange cols{1, 3};
  Decimal value_lo = Decimal::from_int(0);
  Decimal value_hi = Decimal::from_int(1000);
  int value_precision = 0;
  /// Word list for row labels; see vocabulary_ids().
  std::string label_vocabulary = "countries";
  /// Forces one column with strictly positive values (drawable as a pie).
  bool pie_compatible = false;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

std::vector<std::string> vocabulary_ids();
/// Throws ConfigError for an unknown id.
std::span<const std::string_view> vocabulary(std::string_view id);

/// Pure function of (params, index).
DataTable generate_table(const TableGenParams& params, std::uint64_t index);

enum class Delimited { csv, tsv };

Delimited parse_delimited_format(std::string_view name);

/// First row: title in the corner cell, then column headers. Following rows:
/// label, then values.
std::string export_delimited(const DataTable& table, Delimited format);
/// Throws ParseError with line/column for ragged rows, non-numeric cells and
/// duplicate labels.
DataTable import_delimited(std::string_view text, Delimited format);

void export_table(const DataTable& table, const std::filesystem::path& path, Delimited format);
DataTable import_table(const std::filesystem::path& path, Delimited format);

}  // namespace chartsynth::tablegen
