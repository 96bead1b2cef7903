#include "dropingest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace chartsynth::dropingest {

using nlohmann::ordered_json;

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string canonicalize_answer(const DropAnswer& answer) {
  std::string number = normalize_whitespace(answer.number);
  if (!number.empty()) return number;

  std::string spans;
  for (const auto& span : answer.spans) {
    std::string s = normalize_whitespace(span);
    if (s.empty()) continue;
    if (!spans.empty()) spans += ", ";
    spans += s;
  }
  if (!spans.empty()) return spans;

  std::string date;
  for (const std::string* part : {&answer.date.day, &answer.date.month, &answer.date.year}) {
    std::string s = normalize_whitespace(*part);
    if (s.empty()) continue;
    if (!date.empty()) date += ' ';
    date += s;
  }
  return date;
}

namespace {

std::string text_field(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return "";
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number()) return it->dump();
  return "";
}

DropAnswer read_answer(const ordered_json& qa) {
  DropAnswer answer;
  auto it = qa.find("answer");
  if (it == qa.end() || !it->is_object()) return answer;
  const ordered_json& a = *it;
  answer.number = text_field(a, "number");
  if (auto spans = a.find("spans"); spans != a.end() && spans->is_array()) {
    for (const auto& span : *spans) {
      if (span.is_string()) answer.spans.push_back(span.get<std::string>());
    }
  }
  if (auto date = a.find("date"); date != a.end() && date->is_object()) {
    answer.date.day = text_field(*date, "day");
    answer.date.month = text_field(*date, "month");
    answer.date.year = text_field(*date, "year");
  }
  return answer;
}

std::pair<std::size_t, std::size_t> position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

DropLoad parse_drop(std::string_view json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text.begin(), json_text.end());
  } catch (const ordered_json::parse_error& e) {
    auto [line, column] = position_of(json_text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(line, column, std::string("malformed DROP JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError(1, 1, "DROP file must be an object keyed by passage id");

  DropLoad out;
  for (const auto& [passage_id, entry] : root.items()) {
    if (!entry.is_object()) throw ParseError(1, 1, "passage '" + passage_id + "' is not an object");
    const std::string passage = normalize_whitespace(text_field(entry, "passage"));
    auto qa_pairs = entry.find("qa_pairs");
    if (qa_pairs == entry.end()) continue;
    if (!qa_pairs->is_array()) throw ParseError(1, 1, "qa_pairs of '" + passage_id + "' is not an array");
    std::size_t ordinal = 0;
    for (const auto& qa : *qa_pairs) {
      ++out.qa_pairs;
      std::string query_id = qa.is_object() ? text_field(qa, "query_id") : "";
      if (query_id.empty()) query_id = std::to_string(ordinal);
      ++ordinal;
      std::string source_id = passage_id + "/" + query_id;
      if (!qa.is_object()) {
        ++out.skipped.empty_text;
        out.skipped.skipped_ids.push_back(source_id);
        continue;
      }
      DropRecord record;
      record.passage = passage;
      record.question = normalize_whitespace(text_field(qa, "question"));
      record.answer = canonicalize_answer(read_answer(qa));
      record.source_id = std::move(source_id);
      if (record.answer.empty()) {
        ++out.skipped.empty_answer;
        out.skipped.skipped_ids.push_back(record.source_id);
      } else if (record.passage.empty() || record.question.empty()) {
        ++out.skipped.empty_text;
        out.skipped.skipped_ids.push_back(record.source_id);
      } else {
        out.records.push_back(std::move(record));
      }
    }
  }
  return out;
}

DropLoad load_drop(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open DROP file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_drop(buffer.str());
}

DropImage render_drop(const DropRecord& record, const textraster::RenderParams& params) {
  if (record.passage.empty() || record.question.empty()) {
    throw ValidationError("DROP record '" + record.source_id + "' has an empty passage or question");
  }
  params.validate();
  const auto& font = textraster::Font::get(params.font_id, params.font_size);
  const int width = params.canvas_width - 2 * params.margin;
  auto passage = textraster::wrap_text(record.passage, font, width);
  auto question = textraster::wrap_text(record.question, font, width);
  const auto limit = static_cast<std::size_t>(textraster::max_lines(params));

  DropImage out;
  if (passage.size() + 1 + question.size() > limit) {
    if (question.size() + 2 > limit) {
      throw LayoutError("question of '" + record.source_id + "' needs " + std::to_string(question.size()) +
                        " lines; the canvas holds " + std::to_string(limit));
    }
    passage.resize(limit - 1 - question.size());
    out.truncated = true;
  }
  std::vector<std::string> lines = std::move(passage);
  lines.emplace_back();
  lines.insert(lines.end(), question.begin(), question.end());
  out.image = textraster::rasterize_lines(lines, params).image;
  return out;
}

}  // namespace chartsynth::dropingest
