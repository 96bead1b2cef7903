#include "tablegen.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace chartsynth::tablegen {

extern const std::array<std::string_view, 32> kSeriesNames;

namespace {

constexpr int kMaxRows = 64;
constexpr int kMaxCols = 16;
const Decimal kMaxMagnitude = Decimal::from_int(1'000'000'000'000);

std::string_view row_noun(std::string_view vocabulary_id) {
  if (vocabulary_id == "countries") return "country";
  if (vocabulary_id == "years") return "year";
  if (vocabulary_id == "months") return "month";
  return "sector";
}

bool is_ordered_vocabulary(std::string_view id) { return id == "years" || id == "months"; }

std::string make_title(Rng& rng, const std::vector<std::string>& headers, std::string_view noun) {
  std::string joined = headers[0];
  for (std::size_t i = 1; i < headers.size(); ++i) {
    joined += (i + 1 == headers.size() ? " and " : ", ") + headers[i];
  }
  switch (rng.below(10)) {
    case 0: return "";
    case 1:
    case 2:
    case 3: return joined + " per " + std::string(noun);
    default: return joined + " by " + std::string(noun);
  }
}

}  // namespace

void TableGenParams::validate() const {
  if (rows.min < 1 || rows.min > rows.max) throw ConfigError("rows: range must satisfy 1 <= min <= max");
  if (rows.max > kMaxRows) throw ConfigError("rows: max exceeds " + std::to_string(kMaxRows));
  if (cols.min < 1 || cols.min > cols.max) throw ConfigError("cols: range must satisfy 1 <= min <= max");
  if (cols.max > kMaxCols) throw ConfigError("cols: max exceeds " + std::to_string(kMaxCols));
  if (value_precision < 0 || value_precision > 2) throw ConfigError("value_precision must be 0, 1 or 2");
  if (value_hi < value_lo) throw ConfigError("value_range: lo must not exceed hi");
  if (value_lo.min_scale() > value_precision || value_hi.min_scale() > value_precision) {
    throw ConfigError("value_range: bounds have more decimals than value_precision");
  }
  Decimal neg_max(-kMaxMagnitude.mantissa(), 0);
  if (value_lo < neg_max || value_hi > kMaxMagnitude) {
    throw ConfigError("value_range: magnitude exceeds 1e12");
  }
  auto words = vocabulary(label_vocabulary);
  if (static_cast<std::size_t>(rows.max) > words.size()) {
    throw ConfigError("rows: max exceeds the " + std::to_string(words.size()) + " labels of '" +
                      label_vocabulary + "'");
  }
  if (pie_compatible && value_hi <= Decimal::from_int(0)) {
    throw ConfigError("value_range: pie_compatible tables need hi > 0");
  }
}

DataTable generate_table(const TableGenParams& params, std::uint64_t index) {
  params.validate();
  Rng rng(mix_seed(params.seed, index));

  const int row_count = static_cast<int>(rng.uniform_int(params.rows.min, params.rows.max));
  const int col_count =
      params.pie_compatible ? 1 : static_cast<int>(rng.uniform_int(params.cols.min, params.cols.max));

  DataTable table;
  auto words = vocabulary(params.label_vocabulary);
  if (is_ordered_vocabulary(params.label_vocabulary)) {
    auto start = rng.below(words.size() - static_cast<std::size_t>(row_count) + 1);
    for (int r = 0; r < row_count; ++r) table.row_labels.emplace_back(words[start + static_cast<std::size_t>(r)]);
  } else {
    std::vector<std::size_t> order(words.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (int r = 0; r < row_count; ++r) table.row_labels.emplace_back(words[order[static_cast<std::size_t>(r)]]);
  }

  std::vector<std::size_t> series(kSeriesNames.size());
  for (std::size_t i = 0; i < series.size(); ++i) series[i] = i;
  rng.shuffle(series);
  for (int c = 0; c < col_count; ++c) table.col_headers.emplace_back(kSeriesNames[series[static_cast<std::size_t>(c)]]);

  const int p = params.value_precision;
  std::int64_t lo = params.value_lo.rescaled(p).mantissa();
  std::int64_t hi = params.value_hi.rescaled(p).mantissa();
  if (params.pie_compatible) lo = std::max<std::int64_t>(lo, 1);

  table.values.resize(static_cast<std::size_t>(row_count));
  for (auto& row : table.values) {
    row.reserve(static_cast<std::size_t>(col_count));
    for (int c = 0; c < col_count; ++c) row.emplace_back(rng.uniform_int(lo, hi), p);
  }
  table.title = make_title(rng, table.col_headers, row_noun(params.label_vocabulary));
  return table;
}

Delimited parse_delimited_format(std::string_view name) {
  if (name == "csv") return Delimited::csv;
  if (name == "tsv") return Delimited::tsv;
  throw ConfigError("format must be csv or tsv, got '" + std::string(name) + "'");
}

namespace {

char delimiter_of(Delimited format) { return format == Delimited::csv ? ',' : '\t'; }

void write_field(std::string& out, std::string_view field, char delim) {
  bool quote = field.find_first_of(std::string{delim, '"', '\n', '\r'}) != std::string_view::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!quote) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

struct Field {
  std::string text;
  std::size_t column;  // 1-based byte column where the field starts
};

struct Record {
  std::vector<Field> fields;
  std::size_t line;
};

// RFC 4180 style: quoted fields may contain delimiters, doubled quotes and
// newlines.
std::vector<Record> split_records(std::string_view text, char delim) {
  std::vector<Record> records;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t line_start = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") {
    i = 3;
    line_start = 3;
  }
  while (i < text.size()) {
    Record record{{}, line};
    while (true) {
      Field field{{}, i - line_start + 1};
      if (i < text.size() && text[i] == '"') {
        std::size_t open_line = line, open_col = i - line_start + 1;
        ++i;
        while (true) {
          if (i >= text.size()) throw ParseError(open_line, open_col, "unterminated quoted field");
          char c = text[i];
          if (c == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.text.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (c == '\n') {
            ++line;
            line_start = i + 1;
          }
          field.text.push_back(c);
          ++i;
        }
        if (i < text.size() && text[i] != delim && text[i] != '\n' && text[i] != '\r') {
          throw ParseError(line, i - line_start + 1, "unexpected character after closing quote");
        }
      } else {
        while (i < text.size() && text[i] != delim && text[i] != '\n' && text[i] != '\r') {
          field.text.push_back(text[i]);
          ++i;
        }
      }
      record.fields.push_back(std::move(field));
      if (i < text.size() && text[i] == delim) {
        ++i;
        continue;
      }
      break;
    }
    if (i < text.size() && text[i] == '\r') ++i;
    if (i < text.size() && text[i] == '\n') ++i;
    ++line;
    line_start = i;
    bool blank = record.fields.size() == 1 && record.fields[0].text.empty();
    if (!blank) records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

std::string export_delimited(const DataTable& table, Delimited format) {
  table.validate();
  const char delim = delimiter_of(format);
  const int precision = table.precision();
  std::string out;
  write_field(out, table.title, delim);
  for (const auto& header : table.col_headers) {
    out.push_back(delim);
    write_field(out, header, delim);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < table.rows(); ++r) {
    write_field(out, table.row_labels[r], delim);
    for (const auto& cell : table.values[r]) {
      out.push_back(delim);
      out += cell.to_string(precision);
    }
    out.push_back('\n');
  }
  return out;
}

DataTable import_delimited(std::string_view text, Delimited format) {
  auto records = split_records(text, delimiter_of(format));
  if (records.empty()) throw ParseError(1, 1, "no header row");
  const Record& header = records.front();
  if (header.fields.size() < 2) throw ParseError(header.line, 1, "header row needs at least one column header");

  DataTable table;
  table.title = header.fields[0].text;
  std::set<std::string> seen;
  for (std::size_t c = 1; c < header.fields.size(); ++c) {
    const Field& f = header.fields[c];
    if (f.text.empty()) throw ParseError(header.line, f.column, "empty column header");
    if (!seen.insert(f.text).second) {
      throw ParseError(header.line, f.column, "duplicate column header '" + f.text + "'");
    }
    table.col_headers.push_back(f.text);
  }
  if (records.size() < 2) throw ParseError(header.line + 1, 1, "no data rows");

  seen.clear();
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Record& rec = records[r];
    if (rec.fields.size() != header.fields.size()) {
      throw ParseError(rec.line, 1, "row has " + std::to_string(rec.fields.size()) + " fields, expected " +
                                        std::to_string(header.fields.size()));
    }
    const Field& label = rec.fields[0];
    if (label.text.empty()) throw ParseError(rec.line, label.column, "empty row label");
    if (!seen.insert(label.text).second) {
      throw ParseError(rec.line, label.column, "duplicate row label '" + label.text + "'");
    }
    table.row_labels.push_back(label.text);
    std::vector<Decimal> row;
    for (std::size_t c = 1; c < rec.fields.size(); ++c) {
      auto value = Decimal::parse(rec.fields[c].text);
      if (!value) {
        throw ParseError(rec.line, rec.fields[c].column, "non-numeric value '" + rec.fields[c].text + "'");
      }
      row.push_back(*value);
    }
    table.values.push_back(std::move(row));
  }
  table.validate();
  return table;
}

void export_table(const DataTable& table, const std::filesystem::path& path, Delimited format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << export_delimited(table, format);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

DataTable import_table(const std::filesystem::path& path, Delimited format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return import_delimited(buffer.str(), format);
}

}  // namespace chartsynth::tablegen
