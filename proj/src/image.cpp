#include "image.hpp"

#include <png.h>

#include <csetjmp>
#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace chartsynth {

RasterImage::RasterImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image dimensions");
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

Rgb RasterImage::at(int x, int y) const {
  auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void RasterImage::set(int x, int y, Rgb color) {
  if (!contains(x, y)) return;
  auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  pixels_[i] = color.r;
  pixels_[i + 1] = color.g;
  pixels_[i + 2] = color.b;
}

void RasterImage::blend(int x, int y, Rgb color, std::uint8_t coverage) {
  if (coverage == 0 || !contains(x, y)) return;
  if (coverage == 255) {
    set(x, y, color);
    return;
  }
  Rgb bg = at(x, y);
  auto mix = [coverage](std::uint8_t back, std::uint8_t fore) {
    return static_cast<std::uint8_t>((back * (255 - coverage) + fore * coverage + 127) / 255);
  };
  set(x, y, {mix(bg.r, color.r), mix(bg.g, color.g), mix(bg.b, color.b)});
}

void RasterImage::fill_rect(int x0, int y0, int x1, int y1, Rgb color) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, width_);
  y1 = std::min(y1, height_);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) set(x, y, color);
  }
}

RasterImage RasterImage::crop_rows(int y0, int rows) const {
  if (y0 < 0 || rows < 0 || y0 + rows > height_) throw std::out_of_range("crop_rows out of range");
  RasterImage out(width_, rows);
  auto stride = static_cast<std::size_t>(width_) * 3;
  std::memcpy(out.pixels_.data(), pixels_.data() + static_cast<std::size_t>(y0) * stride,
              static_cast<std::size_t>(rows) * stride);
  return out;
}

namespace {

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

void png_warning_ignore(png_structp, png_const_charp) {}

// Row writing has its own frame; the setjmp target holds no objects with
// destructors.
bool write_png_rows(png_structp png, png_infop info, const RasterImage& image,
                    std::vector<std::uint8_t>* out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, out, write_to_vector, flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_ALL_FILTERS);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(image.width()) * 3;
  const std::uint8_t* base = image.pixels().data();
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(base + static_cast<std::size_t>(y) * stride));
  }
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  if (image.empty()) throw std::invalid_argument("cannot encode an empty image");
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.height()) / 4 + 64);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                            png_warning_ignore);
  if (png == nullptr) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  bool ok = info != nullptr && write_png_rows(png, info, image, &out);
  png_destroy_write_struct(&png, &info);
  if (!ok) throw std::runtime_error("PNG encoding failed");
  return out;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image header;
  std::memset(&header, 0, sizeof(header));
  header.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&header, bytes.data(), bytes.size()) == 0) {
    std::string message = header.message;
    png_image_free(&header);
    throw ParseError(1, 0, "invalid PNG: " + message);
  }
  header.format = PNG_FORMAT_RGB;
  if (header.width == 0 || header.height == 0 || header.width > 16384 || header.height > 16384) {
    png_image_free(&header);
    throw ParseError(1, 0, "PNG dimensions out of range");
  }
  RasterImage out(static_cast<int>(header.width), static_cast<int>(header.height));
  png_color background{255, 255, 255};
  if (png_image_finish_read(&header, &background, out.pixels().data(), 0, nullptr) == 0) {
    std::string message = header.message;
    png_image_free(&header);
    throw ParseError(1, 0, "invalid PNG: " + message);
  }
  return out;
}

}  // namespace chartsynth
