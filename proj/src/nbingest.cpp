#include "nbingest.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "errors.hpp"

namespace chartsynth::nbingest {

namespace fs = std::filesystem;
using nlohmann::json;

void NotebookFilters::validate() const {
  if (min_lines < 0) throw ConfigError("min_lines must be >= 0");
  if (min_code_chars > max_code_chars) throw ConfigError("min_code_chars exceeds max_code_chars");
  if (min_image_side < 1 || min_image_side > max_image_side) {
    throw ConfigError("image side bounds must satisfy 1 <= min <= max");
  }
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

std::vector<std::uint8_t> decode_base64(std::string_view text) {
  static constexpr auto kTable = [] {
    std::array<std::int8_t, 256> t{};
    t.fill(-1);
    const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(alphabet[i])] = static_cast<std::int8_t>(i);
    return t;
  }();

  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
    clean.push_back(c);
  }
  if (clean.size() % 4 != 0) throw ParseError(1, 0, "base64 length is not a multiple of 4");

  std::vector<std::uint8_t> out;
  out.reserve(clean.size() / 4 * 3);
  for (std::size_t i = 0; i < clean.size(); i += 4) {
    const bool last = i + 4 == clean.size();
    int pad = 0;
    std::uint32_t chunk = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      char c = clean[i + j];
      if (c == '=') {
        if (!last || j < 2) throw ParseError(1, i + j + 1, "misplaced base64 padding");
        ++pad;
        chunk <<= 6;
        continue;
      }
      if (pad > 0) throw ParseError(1, i + j + 1, "data after base64 padding");
      std::int8_t v = kTable[static_cast<unsigned char>(c)];
      if (v < 0) throw ParseError(1, i + j + 1, "invalid base64 character");
      chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    }
    out.push_back(static_cast<std::uint8_t>(chunk >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(chunk >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(chunk));
  }
  return out;
}

namespace {

// nbformat stores multiline text either as one string or a list of lines.
std::string joined_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  std::string out;
  if (value.is_array()) {
    for (const auto& part : value) {
      if (part.is_string()) out += part.get<std::string>();
    }
  }
  return out;
}

std::string_view trimmed(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

int count_lines(std::string_view code) {
  int lines = 0;
  std::size_t pos = 0;
  while (pos <= code.size()) {
    auto end = code.find('\n', pos);
    if (end == std::string_view::npos) end = code.size();
    if (!trimmed(code.substr(pos, end - pos)).empty()) ++lines;
    pos = end + 1;
  }
  return lines;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::vector<NotebookPair> extract_pairs(std::string_view notebook_json, const std::string& notebook_path,
                                        const NotebookFilters& filters, IngestStats& stats) {
  json doc = json::parse(notebook_json.begin(), notebook_json.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("cells") || !doc["cells"].is_array()) {
    ++stats.unparseable;
    return {};
  }
  ++stats.notebooks;

  std::vector<NotebookPair> pairs;
  std::string previous_code;
  bool have_previous = false;
  const json& cells = doc["cells"];
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const json& cell = cells[ci];
    if (!cell.is_object() || cell.value("cell_type", "") != "code") continue;
    std::string source = joined_text(cell.value("source", json()));

    std::string code(trimmed(source));
    if (have_previous && count_lines(source) < filters.min_lines) {
      std::string prev(trimmed(previous_code));
      if (!prev.empty()) code = code.empty() ? prev : prev + "\n" + code;
    }
    previous_code = source;
    have_previous = true;

    auto outputs = cell.find("outputs");
    if (outputs == cell.end() || !outputs->is_array()) continue;
    std::size_t png_index = 0;
    for (const auto& output : *outputs) {
      if (!output.is_object()) continue;
      auto data = output.find("data");
      if (data == output.end() || !data->is_object()) continue;
      auto png = data->find("image/png");
      if (png == data->end()) continue;
      ++stats.png_outputs;
      const std::size_t output_index = png_index++;

      RasterImage image;
      try {
        image = decode_png(decode_base64(joined_text(*png)));
      } catch (const ParseError&) {
        ++stats.corrupt;
        continue;
      }
      const bool code_ok = code.size() >= filters.min_code_chars && code.size() <= filters.max_code_chars;
      const bool image_ok = std::min(image.width(), image.height()) >= filters.min_image_side &&
                            std::max(image.width(), image.height()) <= filters.max_image_side;
      if (code.empty() || !code_ok || !image_ok) {
        ++stats.filtered;
        continue;
      }
      pairs.push_back({std::move(image), code, notebook_path, ci, output_index});
    }
  }
  return pairs;
}

IngestResult ingest_notebooks(const fs::path& dir, const NotebookFilters& filters) {
  filters.validate();
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a readable directory: '" + dir.string() + "'");

  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(dir, ec), end;
  if (ec) throw IoError("cannot scan '" + dir.string() + "': " + ec.message());
  for (; it != end; it.increment(ec)) {
    if (ec) throw IoError("cannot scan '" + dir.string() + "': " + ec.message());
    if (it->is_regular_file(ec)) files.push_back(it->path());
  }
  std::vector<std::string> relative(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    relative[i] = files[i].lexically_relative(dir).generic_string();
  }
  std::vector<std::size_t> order(files.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return relative[a] < relative[b]; });

  struct Slot {
    std::vector<NotebookPair> pairs;
    IngestStats stats;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(order.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < order.size(); k = next++) {
      Slot& slot = slots[k];
      const std::size_t i = order[k];
      try {
        slot.stats.files_scanned = 1;
        if (files[i].extension() != ".ipynb") {
          slot.stats.non_notebook = 1;
          continue;
        }
        slot.pairs = extract_pairs(read_file(files[i]), relative[i], filters, slot.stats);
      } catch (...) {
        slot.error = std::current_exception();
      }
    }
  };
  unsigned n_threads = filters.threads > 0 ? static_cast<unsigned>(filters.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(1, order.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  IngestResult result;
  for (auto& slot : slots) {
    if (slot.error) std::rethrow_exception(slot.error);
    auto& s = result.stats;
    s.files_scanned += slot.stats.files_scanned;
    s.notebooks += slot.stats.notebooks;
    s.non_notebook += slot.stats.non_notebook;
    s.unparseable += slot.stats.unparseable;
    s.png_outputs += slot.stats.png_outputs;
    s.corrupt += slot.stats.corrupt;
    s.filtered += slot.stats.filtered;
    for (auto& pair : slot.pairs) result.pairs.push_back(std::move(pair));
  }
  return result;
}

}  // namespace chartsynth::nbingest
