#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "image.hpp"

namespace chartsynth::textraster {

namespace detail {
struct FaceRecord;
}

/// One bundled face at one pixel size. Sizes are in points at 72 dpi, so a
/// point equals a pixel. Instances are immutable and shared.
class Font {
 public:
  /// Throws ConfigError for an unknown id or a size that is not bundled.
  static const Font& get(std::string_view id, int size);
  static bool exists(std::string_view id, int size) noexcept;
  static std::vector<std::string> ids();
  static std::vector<int> sizes(std::string_view id);

  const std::string& id() const noexcept { return id_; }
  int size() const noexcept;
  int ascent() const noexcept;
  int descent() const noexcept;
  int line_height() const noexcept { return ascent() + descent(); }

  /// Advance in pixels of one code point; anything outside printable ASCII
  /// renders (and measures) as '?'.
  int advance(char32_t c) const noexcept;
  /// Sum of advances over the UTF-8 text (no kerning).
  int measure(std::string_view utf8) const;
  /// Draws with the pen starting at (x, baseline).
  void draw(RasterImage& image, int x, int baseline, std::string_view utf8, Rgb color) const;

  explicit Font(const detail::FaceRecord* face);

 private:
  const detail::FaceRecord* face_;
  std::string id_;
};

/// Decodes UTF-8 leniently; invalid sequences yield U+FFFD.
std::u32string decode_utf8(std::string_view text);

struct RenderParams {
  int canvas_width = 512;
  int max_height = 2048;
  std::string font_id = "dejavu-sans";
  int font_size = 16;
  int margin = 8;
  double line_spacing = 1.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  int line_height() const;
};

/// Greedy word wrap. '\n' forces a break and an empty paragraph yields an
/// empty line; whitespace runs collapse to one space. Throws LayoutError when a
/// single word is wider than `max_width`.
std::vector<std::string> wrap_text(std::string_view text, const Font& font, int max_width);

enum class Overflow { error, truncate };

struct TextImage {
  RasterImage image;
  std::size_t line_count = 0;
  bool truncated = false;
};

/// Black-on-white lines, top-aligned inside the margin.
TextImage rasterize_lines(const std::vector<std::string>& lines, const RenderParams& params);

/// Wraps `text` at the canvas width and rasterizes it. Height is
/// 2 * margin + lines * line_height. Beyond max_height the result is either a
/// LayoutError or, with Overflow::truncate, cut at the last whole line.
TextImage rasterize_text(std::string_view text, const RenderParams& params,
                         Overflow overflow = Overflow::error);

/// Number of lines that fit under max_height.
int max_lines(const RenderParams& params);

/// Stacks the question (rasterized at the chart's width) and a 1-px rule over
/// the chart. The chart pixels are copied unchanged into the bottom rows.
RasterImage compose_question_header(std::string_view question, const RasterImage& chart,
                                    const RenderParams& params);

inline constexpr Rgb kHeaderRule{160, 160, 160};

}  // namespace chartsynth::textraster
