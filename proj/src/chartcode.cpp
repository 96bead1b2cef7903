#include <map>
#include <set>

#include "chartrender.hpp"
#include "errors.hpp"

namespace chartsynth::chartrender {

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void check_single_line(const std::string& text, const char* what) {
  if (text.find('\n') != std::string::npos || text.find('\r') != std::string::npos) {
    throw ValidationError(std::string(what) + " '" + text + "' contains a line break; chart code cannot carry it");
  }
}

struct Token {
  std::string text;
  bool quoted = false;
  std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t') {
      ++i;
      continue;
    }
    Token token;
    token.column = i + 1;
    if (line[i] == '"') {
      token.quoted = true;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char c = line[i];
        if (c == '\\') {
          if (i + 1 >= line.size() || (line[i + 1] != '"' && line[i + 1] != '\\')) {
            throw ParseError(line_no, i + 1, "invalid escape in string");
          }
          token.text.push_back(line[i + 1]);
          i += 2;
          continue;
        }
        if (c == '"') {
          closed = true;
          ++i;
          break;
        }
        token.text.push_back(c);
        ++i;
      }
      if (!closed) throw ParseError(line_no, token.column, "unterminated string");
      if (i < line.size() && line[i] != ' ' && line[i] != '\t') {
        throw ParseError(line_no, i + 1, "expected whitespace after string");
      }
    } else {
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
        if (line[i] == '"') throw ParseError(line_no, i + 1, "unexpected quote inside word");
        token.text.push_back(line[i]);
        ++i;
      }
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

int parse_int_arg(const Token& token, std::size_t line_no, const char* what) {
  if (token.quoted || token.text.empty() || token.text.size() > 6 ||
      token.text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(line_no, token.column, std::string("expected an integer ") + what);
  }
  return std::stoi(token.text);
}

bool parse_switch(const Token& token, std::size_t line_no) {
  if (!token.quoted && token.text == "on") return true;
  if (!token.quoted && token.text == "off") return false;
  throw ParseError(line_no, token.column, "expected 'on' or 'off'");
}

const std::string& bare_word(const Token& token, std::size_t line_no, const char* what) {
  if (token.quoted) throw ParseError(line_no, token.column, std::string("expected a bare ") + what);
  return token.text;
}

}  // namespace

std::string emit_code(const DataTable& table, const ChartSpec& input) {
  input.validate();
  const ChartSpec spec = input.normalized();
  check_drawable(table, spec);
  check_single_line(table.title, "title");
  for (const auto& h : table.col_headers) check_single_line(h, "column header");
  for (const auto& l : table.row_labels) check_single_line(l, "row label");

  const int precision = table.precision();
  std::string out;
  out += "title " + quote(table.title) + "\n";
  out += "type " + std::string(to_string(spec.chart_type)) + "\n";
  out += "orient " + std::string(to_string(spec.orientation)) + "\n";
  out += "palette " + spec.palette + "\n";
  out += "theme " + spec.style_theme + "\n";
  out += "font " + spec.font_id + " " + std::to_string(spec.font_size) + "\n";
  out += "size " + std::to_string(spec.width_px) + " " + std::to_string(spec.height_px) + "\n";
  out += std::string("values ") + (spec.show_values ? "on" : "off") + "\n";
  out += std::string("legend ") + (spec.legend ? "on" : "off") + "\n";
  out += "cols";
  for (const auto& h : table.col_headers) out += " " + quote(h);
  out += "\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += "row " + quote(table.row_labels[r]);
    for (const auto& cell : table.values[r]) out += " " + cell.to_string(precision);
    out += "\n";
  }
  return out;
}

std::pair<DataTable, ChartSpec> parse_code(std::string_view script) {
  if (script.empty()) throw ParseError(1, 1, "empty chart script; expected a statement");

  static const std::map<std::string, std::size_t, std::less<>> kSettingArity = {
      {"title", 1}, {"type", 1}, {"orient", 1}, {"palette", 1}, {"theme", 1},
      {"font", 2},  {"size", 2}, {"values", 1}, {"legend", 1},
  };

  DataTable table;
  ChartSpec spec;
  std::set<std::string> seen;
  bool have_cols = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < script.size()) {
    ++line_no;
    std::size_t nl = script.find('\n', start);
    std::string_view line = script.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? script.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto tokens = tokenize(line, line_no);
    if (tokens.empty()) continue;
    const Token& head = tokens.front();
    if (head.quoted) throw ParseError(line_no, head.column, "expected a statement keyword");
    const std::string& keyword = head.text;
    const std::size_t args = tokens.size() - 1;

    if (auto it = kSettingArity.find(keyword); it != kSettingArity.end()) {
      if (have_cols) throw ParseError(line_no, head.column, "statement '" + keyword + "' after the data");
      if (!seen.insert(keyword).second) throw ParseError(line_no, head.column, "repeated statement '" + keyword + "'");
      if (args != it->second) {
        throw ParseError(line_no, head.column, "statement '" + keyword + "' takes " + std::to_string(it->second) +
                                                   " argument(s), got " + std::to_string(args));
      }
      const Token& a = tokens[1];
      if (keyword == "title") {
        if (!a.quoted) throw ParseError(line_no, a.column, "title must be a quoted string");
        table.title = a.text;
      } else if (keyword == "type") {
        const auto& w = bare_word(a, line_no, "chart type");
        if (w != "bar" && w != "line" && w != "pie") throw ParseError(line_no, a.column, "unknown chart type '" + w + "'");
        spec.chart_type = parse_chart_type(w);
      } else if (keyword == "orient") {
        const auto& w = bare_word(a, line_no, "orientation");
        if (w != "v" && w != "h") throw ParseError(line_no, a.column, "orientation must be 'v' or 'h'");
        spec.orientation = parse_orientation(w);
      } else if (keyword == "palette") {
        spec.palette = bare_word(a, line_no, "palette id");
      } else if (keyword == "theme") {
        spec.style_theme = bare_word(a, line_no, "theme id");
      } else if (keyword == "font") {
        spec.font_id = bare_word(a, line_no, "font id");
        spec.font_size = parse_int_arg(tokens[2], line_no, "font size");
      } else if (keyword == "size") {
        spec.width_px = parse_int_arg(a, line_no, "width");
        spec.height_px = parse_int_arg(tokens[2], line_no, "height");
      } else if (keyword == "values") {
        spec.show_values = parse_switch(a, line_no);
      } else if (keyword == "legend") {
        spec.legend = parse_switch(a, line_no);
      }
    } else if (keyword == "cols") {
      if (have_cols) throw ParseError(line_no, head.column, "repeated statement 'cols'");
      if (args == 0) throw ParseError(line_no, head.column, "cols needs at least one header");
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (!tokens[i].quoted) throw ParseError(line_no, tokens[i].column, "column headers must be quoted strings");
        table.col_headers.push_back(tokens[i].text);
      }
      have_cols = true;
    } else if (keyword == "row") {
      if (!have_cols) throw ParseError(line_no, head.column, "row before cols");
      if (args == 0 || !tokens[1].quoted) throw ParseError(line_no, head.column + 4, "row needs a quoted label");
      if (args - 1 != table.cols()) {
        throw ParseError(line_no, head.column, "row has " + std::to_string(args - 1) + " values, expected " +
                                                   std::to_string(table.cols()));
      }
      std::vector<Decimal> values;
      for (std::size_t i = 2; i < tokens.size(); ++i) {
        auto value = tokens[i].quoted ? std::nullopt : Decimal::parse(tokens[i].text);
        if (!value) throw ParseError(line_no, tokens[i].column, "expected a number, got '" + tokens[i].text + "'");
        values.push_back(*value);
      }
      table.row_labels.push_back(tokens[1].text);
      table.values.push_back(std::move(values));
    } else {
      throw ParseError(line_no, head.column, "unknown statement '" + keyword + "'");
    }
  }

  const std::size_t end_line = line_no + 1;
  for (const auto& [keyword, arity] : kSettingArity) {
    if (keyword != "title" && !seen.contains(keyword)) {
      throw ParseError(end_line, 1, "missing statement '" + keyword + "'");
    }
  }
  if (!have_cols) throw ParseError(end_line, 1, "missing statement 'cols'");
  if (table.rows() == 0) throw ParseError(end_line, 1, "missing statement 'row'");

  try {
    spec.validate();
    check_drawable(table, spec.normalized());
  } catch (const ConfigError& e) {
    throw ValidationError(e.what());
  } catch (const UnsupportedChartError& e) {
    throw ValidationError(e.what());
  }
  return {std::move(table), spec.normalized()};
}

}  // namespace chartsynth::chartrender
