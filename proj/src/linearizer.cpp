#include "linearizer.hpp"

#include <set>
#include <stdexcept>
#include <vector>

namespace chartsynth::linearizer {

std::string escape_cell(std::string_view cell) {
  std::string out;
  out.reserve(cell.size());
  for (char c : cell) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '|': out += "\\p"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_cell(std::string_view cell) {
  std::string out;
  out.reserve(cell.size());
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (cell[i] != '\\') {
      out.push_back(cell[i]);
      continue;
    }
    if (i + 1 >= cell.size()) throw std::invalid_argument("dangling escape");
    switch (cell[++i]) {
      case '\\': out.push_back('\\'); break;
      case 'p': out.push_back('|'); break;
      case 'n': out.push_back('\n'); break;
      default: throw std::invalid_argument(std::string("unknown escape \\") + cell[i]);
    }
  }
  return out;
}

std::string linearize(const DataTable& table) {
  table.validate();
  const int precision = table.precision();
  std::string out = "TITLE | " + escape_cell(table.title) + "\n";
  for (const auto& header : table.col_headers) out += " | " + escape_cell(header);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += "\n" + escape_cell(table.row_labels[r]);
    for (const auto& cell : table.values[r]) out += " | " + cell.to_string(precision);
  }
  return out;
}

namespace {

// Splits on raw '|' (escaped pipes never appear raw) and drops at most one
// space on each side of every separator.
std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = line.find('|', start);
    std::string_view cell = line.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
    if (start > 0 && !cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    if (bar != std::string_view::npos && !cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
    cells.push_back(cell);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return cells;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  // A single trailing newline is tolerated.
  if (lines.size() > 1 && lines.back().empty()) lines.pop_back();
  return lines;
}

std::optional<DataTable> partial_of(const DataTable& table) {
  if (table.col_headers.empty() || table.row_labels.empty()) return std::nullopt;
  try {
    table.validate();
  } catch (const Error&) {
    return std::nullopt;
  }
  return table;
}

}  // namespace

DataTable delinearize(std::string_view text) {
  auto lines = split_lines(text);
  DataTable table;
  auto fail = [&table](std::size_t line, const std::string& message) -> DelinearizeError {
    return DelinearizeError(line, message, partial_of(table));
  };
  auto unescape = [&](std::string_view cell, std::size_t line) {
    try {
      return unescape_cell(cell);
    } catch (const std::invalid_argument& e) {
      throw fail(line, e.what());
    }
  };

  auto title_cells = split_cells(lines[0]);
  if (title_cells.size() != 2 || title_cells[0] != "TITLE") throw fail(1, "expected 'TITLE | <title>'");
  table.title = unescape(title_cells[1], 1);

  if (lines.size() < 2) throw fail(2, "missing header line");
  auto header_cells = split_cells(lines[1]);
  if (header_cells.size() < 2 || !header_cells[0].empty()) {
    throw fail(2, "header line must start with ' | ' and name at least one column");
  }
  std::set<std::string> seen;
  std::vector<std::string> headers;
  for (std::size_t c = 1; c < header_cells.size(); ++c) {
    std::string h = unescape(header_cells[c], 2);
    if (h.empty()) throw fail(2, "empty column header");
    if (!seen.insert(h).second) throw fail(2, "duplicate column header '" + h + "'");
    headers.push_back(std::move(h));
  }
  table.col_headers = std::move(headers);

  if (lines.size() < 3) throw fail(3, "no data rows");
  seen.clear();
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto cells = split_cells(lines[i]);
    if (cells.size() != table.cols() + 1) {
      throw fail(line_no, "row has " + std::to_string(cells.size() - 1) + " values, expected " +
                              std::to_string(table.cols()));
    }
    std::string label = unescape(cells[0], line_no);
    if (label.empty()) throw fail(line_no, "empty row label");
    if (!seen.insert(label).second) throw fail(line_no, "duplicate row label '" + label + "'");
    std::vector<Decimal> row;
    row.reserve(table.cols());
    for (std::size_t c = 1; c < cells.size(); ++c) {
      auto value = Decimal::parse(cells[c]);
      if (!value) throw fail(line_no, "unparseable number '" + std::string(cells[c]) + "'");
      row.push_back(*value);
    }
    table.row_labels.push_back(std::move(label));
    table.values.push_back(std::move(row));
  }
  return table;
}

}  // namespace chartsynth::linearizer
