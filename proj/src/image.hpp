#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chartsynth {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

/// Row-major RGB8 pixel grid.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = kWhite);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb color);
  /// Alpha-blends `color` with 8-bit coverage onto the pixel; clipped.
  void blend(int x, int y, Rgb color, std::uint8_t coverage);
  void fill_rect(int x0, int y0, int x1, int y1, Rgb color);  // half-open, clipped
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  /// Copies of `rows` starting at row `y0`, as a new image.
  RasterImage crop_rows(int y0, int rows) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Deterministic PNG: RGB8, no alpha, zlib level 6, adaptive filters, no
/// ancillary chunks.
std::vector<std::uint8_t> encode_png(const RasterImage& image);

/// Decodes any PNG libpng understands into RGB8; transparency is composited
/// over white. Throws ParseError on corrupt input.
RasterImage decode_png(std::span<const std::uint8_t> bytes);

}  // namespace chartsynth
