#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "image.hpp"
#include "textraster.hpp"

namespace chartsynth::dropingest {

struct DropDate {
  std::string day;
  std::string month;
  std::string year;
};

/// Answer struct as stored in DROP files.
struct DropAnswer {
  std::string number;
  std::vector<std::string> spans;
  DropDate date;
};

struct DropRecord {
  std::string passage;
  std::string question;
  std::string answer;
  std::string source_id;  // "<passage id>/<query id>"

  friend bool operator==(const DropRecord&, const DropRecord&) = default;
};

struct SkipReport {
  std::size_t empty_answer = 0;
  std::size_t empty_text = 0;  // passage or question empty
  std::vector<std::string> skipped_ids;

  std::size_t total() const noexcept { return empty_answer + empty_text; }
};

struct DropLoad {
  std::vector<DropRecord> records;
  SkipReport skipped;
  std::size_t qa_pairs = 0;  // == records.size() + skipped.total()
};

/// Trims and collapses internal whitespace runs to one space.
std::string normalize_whitespace(std::string_view text);

/// Number if present, else spans joined by ", " in file order, else the date
/// as "day month year" without the empty parts. Empty when nothing is set.
std::string canonicalize_answer(const DropAnswer& answer);

/// Throws ParseError (line:column of the JSON defect) on malformed input and
/// when the top level is not an object of passages.
DropLoad parse_drop(std::string_view json_text);
DropLoad load_drop(const std::filesystem::path& path);

struct DropImage {
  RasterImage image;
  bool truncated = false;
};

/// Passage, a blank line, then the question. When the text is taller than
/// max_height the passage is cut at a line (hence word) boundary so the
/// question stays visible, and `truncated` is set.
DropImage render_drop(const DropRecord& record, const textraster::RenderParams& params);

}  // namespace chartsynth::dropingest
