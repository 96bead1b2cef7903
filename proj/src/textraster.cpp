#include "textraster.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "errors.hpp"
#include "font_data.hpp"

namespace chartsynth::textraster {

using detail::FaceRecord;
using detail::GlyphRecord;
using detail::kFaceCount;
using detail::kFaces;

namespace {

const FaceRecord* find_face(std::string_view id, int size) noexcept {
  for (std::size_t i = 0; i < kFaceCount; ++i) {
    if (kFaces[i].name == id && kFaces[i].size == size) return &kFaces[i];
  }
  return nullptr;
}

const GlyphRecord& glyph(const FaceRecord& face, char32_t c) noexcept {
  if (c == U'\t') c = U' ';
  if (c < static_cast<char32_t>(detail::kFirstGlyph) || c > static_cast<char32_t>(detail::kLastGlyph)) {
    c = U'?';
  }
  return face.glyphs[c - detail::kFirstGlyph];
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto b0 = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
    } else {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(extra) >= text.size()) {
      out.push_back(U'\uFFFD');
      break;
    }
    bool valid = true;
    for (int k = 1; k <= extra; ++k) {
      auto b = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!valid) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

Font::Font(const FaceRecord* face) : face_(face), id_(face->name) {}

const Font& Font::get(std::string_view id, int size) {
  static std::mutex mutex;
  static std::map<const FaceRecord*, std::unique_ptr<Font>> cache;
  const FaceRecord* face = find_face(id, size);
  if (face == nullptr) {
    throw ConfigError("font '" + std::string(id) + "' at size " + std::to_string(size) +
                      " is not bundled");
  }
  std::lock_guard lock(mutex);
  auto& slot = cache[face];
  if (!slot) slot = std::make_unique<Font>(face);
  return *slot;
}

bool Font::exists(std::string_view id, int size) noexcept { return find_face(id, size) != nullptr; }

std::vector<std::string> Font::ids() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kFaceCount; ++i) {
    if (out.empty() || out.back() != kFaces[i].name) out.emplace_back(kFaces[i].name);
  }
  return out;
}

std::vector<int> Font::sizes(std::string_view id) {
  std::vector<int> out;
  for (std::size_t i = 0; i < kFaceCount; ++i) {
    if (kFaces[i].name == id) out.push_back(kFaces[i].size);
  }
  return out;
}

int Font::size() const noexcept { return face_->size; }
int Font::ascent() const noexcept { return face_->ascent; }
int Font::descent() const noexcept { return face_->descent; }

int Font::advance(char32_t c) const noexcept { return glyph(*face_, c).advance; }

int Font::measure(std::string_view utf8) const {
  int width = 0;
  for (char32_t c : decode_utf8(utf8)) width += advance(c);
  return width;
}

void Font::draw(RasterImage& image, int x, int baseline, std::string_view utf8, Rgb color) const {
  int pen = x;
  for (char32_t c : decode_utf8(utf8)) {
    const GlyphRecord& g = glyph(*face_, c);
    const unsigned char* bits = face_->coverage + g.offset;
    for (int row = 0; row < g.height; ++row) {
      for (int col = 0; col < g.width; ++col) {
        image.blend(pen + g.x0 + col, baseline + g.y0 + row, color, bits[row * g.width + col]);
      }
    }
    pen += g.advance;
  }
}

void RenderParams::validate() const {
  if (canvas_width < 64) throw ConfigError("canvas_width must be >= 64");
  if (canvas_width > 8192) throw ConfigError("canvas_width must be <= 8192");
  if (margin < 0 || 2 * margin >= canvas_width) throw ConfigError("margin out of range");
  if (line_spacing < 0.5 || line_spacing > 4.0) throw ConfigError("line_spacing must be in [0.5, 4]");
  if (!Font::exists(font_id, font_size)) {
    throw ConfigError("font_id '" + font_id + "' at font_size " + std::to_string(font_size) +
                      " is not bundled");
  }
  if (max_height < 2 * margin + line_height()) {
    throw ConfigError("max_height is smaller than one line of text");
  }
}

int RenderParams::line_height() const {
  const Font& font = Font::get(font_id, font_size);
  return static_cast<int>(std::lround(font.line_height() * line_spacing));
}

std::vector<std::string> wrap_text(std::string_view text, const Font& font, int max_width) {
  std::vector<std::string> lines;
  const int space = font.advance(U' ');
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find('\n', start);
    std::string_view paragraph =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);

    std::string line;
    int line_width = 0;
    std::size_t i = 0;
    while (i < paragraph.size()) {
      while (i < paragraph.size() && (paragraph[i] == ' ' || paragraph[i] == '\t' || paragraph[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < paragraph.size() && paragraph[j] != ' ' && paragraph[j] != '\t' && paragraph[j] != '\r') ++j;
      if (j == i) break;
      std::string_view word = paragraph.substr(i, j - i);
      int word_width = font.measure(word);
      if (word_width > max_width) {
        throw LayoutError("word '" + std::string(word) + "' is " + std::to_string(word_width) +
                          " px wide; the line allows " + std::to_string(max_width) + " px");
      }
      if (line.empty()) {
        line.assign(word);
        line_width = word_width;
      } else if (line_width + space + word_width <= max_width) {
        line += ' ';
        line.append(word);
        line_width += space + word_width;
      } else {
        lines.push_back(std::move(line));
        line.assign(word);
        line_width = word_width;
      }
      i = j;
    }
    lines.push_back(std::move(line));

    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

int max_lines(const RenderParams& params) {
  return (params.max_height - 2 * params.margin) / params.line_height();
}

TextImage rasterize_lines(const std::vector<std::string>& lines, const RenderParams& params) {
  params.validate();
  const Font& font = Font::get(params.font_id, params.font_size);
  const int line_height = params.line_height();
  const int height = 2 * params.margin + static_cast<int>(lines.size()) * line_height;
  TextImage out;
  out.image = RasterImage(params.canvas_width, height, kWhite);
  out.line_count = lines.size();
  // Extra leading from line_spacing is split above and below the glyphs.
  const int lead = (line_height - font.line_height()) / 2;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int top = params.margin + static_cast<int>(i) * line_height;
    font.draw(out.image, params.margin, top + lead + font.ascent(), lines[i], kBlack);
  }
  return out;
}

TextImage rasterize_text(std::string_view text, const RenderParams& params, Overflow overflow) {
  if (text.empty()) throw ValidationError("text to rasterize is empty");
  params.validate();
  const Font& font = Font::get(params.font_id, params.font_size);
  auto lines = wrap_text(text, font, params.canvas_width - 2 * params.margin);
  const auto limit = static_cast<std::size_t>(max_lines(params));
  bool truncated = false;
  if (lines.size() > limit) {
    if (overflow == Overflow::error) {
      throw LayoutError("text needs " + std::to_string(lines.size()) + " lines; max_height allows " +
                        std::to_string(limit));
    }
    lines.resize(limit);
    truncated = true;
  }
  TextImage out = rasterize_lines(lines, params);
  out.truncated = truncated;
  return out;
}

RasterImage compose_question_header(std::string_view question, const RasterImage& chart,
                                    const RenderParams& params) {
  if (chart.empty()) throw ValidationError("chart image is empty");
  if (question.empty()) throw ValidationError("question is empty");
  RenderParams header_params = params;
  header_params.canvas_width = chart.width();
  TextImage header = rasterize_text(question, header_params, Overflow::error);

  const int header_height = header.image.height() + 1;
  RasterImage out(chart.width(), header_height + chart.height(), kWhite);
  auto dst = out.pixels();
  auto header_px = header.image.pixels();
  std::copy(header_px.begin(), header_px.end(), dst.begin());
  out.fill_rect(0, header.image.height(), chart.width(), header_height, kHeaderRule);
  auto chart_px = chart.pixels();
  std::copy(chart_px.begin(), chart_px.end(),
            dst.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(header_height) *
                                                      static_cast<std::size_t>(chart.width()) * 3));
  return out;
}

}  // namespace chartsynth::textraster
