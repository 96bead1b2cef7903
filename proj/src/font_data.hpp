#pragma once

#include <cstddef>

namespace chartsynth::textraster::detail {

// Printable ASCII 32..126, one record per code point.
inline constexpr int kFirstGlyph = 32;
inline constexpr int kLastGlyph = 126;

struct GlyphRecord {
  int advance;
  int x0;  // bitmap left edge relative to the pen position
  int y0;  // bitmap top edge relative to the baseline (negative = above)
  int width;
  int height;
  int offset;  // into FaceRecord::coverage
};

struct FaceRecord {
  const char* name;
  int size;
  int ascent;
  int descent;
  const GlyphRecord* glyphs;
  const unsigned char* coverage;
};

extern const FaceRecord kFaces[];
extern const std::size_t kFaceCount;

}  // namespace chartsynth::textraster::detail
