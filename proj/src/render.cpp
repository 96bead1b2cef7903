#include <algorithm>
#include <cmath>
#include <cstdio>

#include "chartrender.hpp"
#include "errors.hpp"
#include "textraster.hpp"

namespace chartsynth::chartrender {

namespace {

using textraster::Font;

struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

struct Ticks {
  double lo = 0;
  double hi = 1;
  int decimals = 0;
  std::vector<double> values;
};

Ticks nice_ticks(double lo, double hi) {
  const double rough = (hi - lo) / 5.0;
  double magnitude = 1.0;
  int exponent = 0;
  while (magnitude * 10.0 <= rough) {
    magnitude *= 10.0;
    ++exponent;
  }
  while (magnitude > rough) {
    magnitude /= 10.0;
    --exponent;
  }
  double step = magnitude;
  int extra_decimals = 0;
  for (double factor : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = factor * magnitude;
    extra_decimals = factor == 2.5 ? 1 : 0;
    if (step >= rough) break;
  }
  Ticks ticks;
  ticks.decimals = std::max(0, -exponent + extra_decimals);
  auto first = static_cast<long long>(std::floor(lo / step + 1e-9));
  auto last = static_cast<long long>(std::ceil(hi / step - 1e-9));
  if (last <= first) last = first + 1;
  ticks.lo = static_cast<double>(first) * step;
  ticks.hi = static_cast<double>(last) * step;
  for (long long k = first; k <= last; ++k) ticks.values.push_back(static_cast<double>(k) * step);
  return ticks;
}

std::string format_tick(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  std::string out = buffer;
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

void draw_line(RasterImage& image, int x0, int y0, int x1, int y1, Rgb color, int thickness) {
  const int lo = -(thickness - 1) / 2;
  const int hi = thickness / 2;
  int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    for (int oy = lo; oy <= hi; ++oy) {
      for (int ox = lo; ox <= hi; ++ox) image.set(x0 + ox, y0 + oy, color);
    }
    if (x0 == x1 && y0 == y1) break;
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

class ChartPainter {
 public:
  ChartPainter(const DataTable& table, const ChartSpec& spec)
      : table_(table),
        spec_(spec),
        theme_(theme(spec.style_theme)),
        colors_(palette(spec.palette)),
        font_(Font::get(spec.font_id, spec.font_size)),
        image_(spec.width_px, spec.height_px, theme_.background),
        precision_(table.precision()) {
    pad_ = std::max(6, spec.font_size / 2);
    line_height_ = font_.line_height();
    area_ = {pad_, pad_, spec.width_px - pad_, spec.height_px - pad_};
  }

  RasterImage run() {
    draw_title();
    if (spec_.legend) draw_legend();
    switch (spec_.chart_type) {
      case ChartType::pie: draw_pie(); break;
      case ChartType::bar:
        if (spec_.orientation == Orientation::horizontal) {
          draw_horizontal_bars();
        } else {
          draw_vertical(true);
        }
        break;
      case ChartType::line: draw_vertical(false); break;
    }
    return std::move(image_);
  }

 private:
  Rgb series_color(std::size_t i) const { return colors_[i % colors_.size()]; }
  double value(std::size_t r, std::size_t c) const { return table_.values[r][c].to_double(); }
  std::string value_text(std::size_t r, std::size_t c) const {
    return table_.values[r][c].to_string(precision_);
  }

  // Draws text whose box is [x, x + width) x [top, top + line height); fails
  // when any part would leave the canvas.
  void text_at(int x, int top, const std::string& text, Rgb color, const std::string& element) {
    int width = font_.measure(text);
    if (x < 0 || top < 0 || x + width > image_.width() || top + line_height_ > image_.height()) {
      throw LayoutError(element + " '" + text + "' overflows the " + std::to_string(image_.width()) +
                        "x" + std::to_string(image_.height()) + " canvas");
    }
    font_.draw(image_, x, top + font_.ascent(), text, color);
  }

  void draw_title() {
    if (table_.title.empty()) return;
    int width = font_.measure(table_.title);
    if (width > area_.width()) {
      throw LayoutError("title '" + table_.title + "' is " + std::to_string(width) +
                        " px wide; the canvas allows " + std::to_string(area_.width()));
    }
    text_at(area_.x0 + (area_.width() - width) / 2, area_.y0, table_.title, theme_.text, "title");
    area_.y0 += line_height_ + pad_ / 2;
  }

  void draw_legend() {
    const auto& entries = spec_.chart_type == ChartType::pie ? table_.row_labels : table_.col_headers;
    const int swatch = std::max(6, line_height_ * 2 / 3);
    int widest = 0;
    for (const auto& e : entries) widest = std::max(widest, font_.measure(e));
    const int legend_width = swatch + 4 + widest;
    if (legend_width + pad_ > image_.width() * 45 / 100) {
      throw LayoutError("legend is " + std::to_string(legend_width) + " px wide; at most 45% of the canvas may be used");
    }
    if (static_cast<int>(entries.size()) * line_height_ > area_.height()) {
      throw LayoutError("legend needs " + std::to_string(entries.size() * static_cast<std::size_t>(line_height_)) +
                        " px of height; " + std::to_string(area_.height()) + " px remain");
    }
    const int x = area_.x1 - legend_width;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      int top = area_.y0 + static_cast<int>(i) * line_height_;
      int sy = top + (line_height_ - swatch) / 2;
      image_.fill_rect(x, sy, x + swatch, sy + swatch, series_color(i));
      text_at(x + swatch + 4, top, entries[i], theme_.text, "legend entry");
    }
    area_.x1 = x - pad_;
  }

  Ticks value_ticks(bool include_zero) const {
    double lo = value(0, 0), hi = lo;
    for (std::size_t r = 0; r < table_.rows(); ++r) {
      for (std::size_t c = 0; c < table_.cols(); ++c) {
        lo = std::min(lo, value(r, c));
        hi = std::max(hi, value(r, c));
      }
    }
    if (include_zero) {
      lo = std::min(lo, 0.0);
      hi = std::max(hi, 0.0);
    }
    if (hi == lo) {
      if (include_zero) {
        hi = lo + 1.0;
      } else {
        lo -= 1.0;
        hi += 1.0;
      }
    }
    return nice_ticks(lo, hi);
  }

  void draw_frame(const Rect& plot) {
    image_.fill_rect(plot.x0, plot.y0, plot.x1, plot.y1, theme_.plot_background);
  }

  void draw_spines(const Rect& plot) {
    draw_line(image_, plot.x0, plot.y0, plot.x0, plot.y1 - 1, theme_.axis, 1);
    draw_line(image_, plot.x0, plot.y1 - 1, plot.x1 - 1, plot.y1 - 1, theme_.axis, 1);
    if (theme_.box) {
      draw_line(image_, plot.x0, plot.y0, plot.x1 - 1, plot.y0, theme_.axis, 1);
      draw_line(image_, plot.x1 - 1, plot.y0, plot.x1 - 1, plot.y1 - 1, theme_.axis, 1);
    }
  }

  void require_plot(const Rect& plot) const {
    if (plot.width() < 24 || plot.height() < 24) {
      throw LayoutError("plot area shrinks to " + std::to_string(plot.width()) + "x" +
                        std::to_string(plot.height()) + " px after placing text");
    }
  }

  void draw_vertical(bool bars) {
    const Ticks ticks = value_ticks(bars);
    int tick_width = 0;
    for (double t : ticks.values) tick_width = std::max(tick_width, font_.measure(format_tick(t, ticks.decimals)));

    Rect plot{area_.x0 + tick_width + 6, area_.y0 + (spec_.show_values ? line_height_ : line_height_ / 2),
              area_.x1, area_.y1};
    const int rows = static_cast<int>(table_.rows());
    const double slot = static_cast<double>(plot.width()) / rows;
    int widest_label = 0;
    for (const auto& label : table_.row_labels) widest_label = std::max(widest_label, font_.measure(label));
    int label_rows = 1;
    if (widest_label > slot - 2) {
      label_rows = 2;
      if (widest_label > 2 * slot - 4) {
        throw LayoutError("x-axis labels need " + std::to_string(widest_label) + " px but each category has " +
                          std::to_string(static_cast<int>(slot)) + " px");
      }
    }
    plot.y1 -= label_rows * line_height_ + 4;
    require_plot(plot);

    const double span = ticks.hi - ticks.lo;
    auto y_of = [&](double v) {
      return plot.y1 - 1 - static_cast<int>(std::lround((v - ticks.lo) / span * (plot.height() - 1)));
    };
    auto slot_x = [&](int r) { return plot.x0 + static_cast<int>(std::lround(slot * r)); };

    draw_frame(plot);
    for (double t : ticks.values) {
      int y = y_of(t);
      if (theme_.grid_lines) draw_line(image_, plot.x0, y, plot.x1 - 1, y, theme_.grid, 1);
      draw_line(image_, plot.x0 - 4, y, plot.x0 - 1, y, theme_.axis, 1);
      std::string text = format_tick(t, ticks.decimals);
      text_at(plot.x0 - 6 - font_.measure(text), y - line_height_ / 2, text, theme_.text, "y-axis tick label");
    }
    for (int r = 0; r < rows; ++r) {
      const std::string& label = table_.row_labels[static_cast<std::size_t>(r)];
      int center = (slot_x(r) + slot_x(r + 1)) / 2;
      int top = plot.y1 + 4 + (label_rows == 2 ? (r % 2) * line_height_ : 0);
      text_at(center - font_.measure(label) / 2, top, label, theme_.text, "x-axis label");
    }

    const int cols = static_cast<int>(table_.cols());
    const int zero_y = y_of(0.0);
    for (int r = 0; r < rows; ++r) {
      const int x0 = slot_x(r), x1 = slot_x(r + 1);
      if (bars) {
        const int group = std::max(cols, (x1 - x0) * 4 / 5);
        const int bar_width = std::max(1, group / cols);
        const int start = x0 + ((x1 - x0) - bar_width * cols) / 2;
        for (int c = 0; c < cols; ++c) {
          const int bx = start + c * bar_width;
          const double v = value(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
          const int y = y_of(v);
          image_.fill_rect(bx, std::min(y, zero_y), bx + bar_width, std::max(y, zero_y),
                           series_color(static_cast<std::size_t>(c)));
        }
      }
    }
    if (!bars) {
      for (int c = 0; c < cols; ++c) {
        Rgb color = series_color(static_cast<std::size_t>(c));
        for (int r = 0; r + 1 < rows; ++r) {
          draw_line(image_, (slot_x(r) + slot_x(r + 1)) / 2,
                    y_of(value(static_cast<std::size_t>(r), static_cast<std::size_t>(c))),
                    (slot_x(r + 1) + slot_x(r + 2)) / 2,
                    y_of(value(static_cast<std::size_t>(r + 1), static_cast<std::size_t>(c))), color, 2);
        }
        for (int r = 0; r < rows; ++r) {
          int px = (slot_x(r) + slot_x(r + 1)) / 2;
          int py = y_of(value(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
          image_.fill_rect(px - 2, py - 2, px + 3, py + 3, color);
        }
      }
    }
    draw_spines(plot);

    if (!spec_.show_values) return;
    for (int r = 0; r < rows; ++r) {
      const int x0 = slot_x(r), x1 = slot_x(r + 1);
      const int group = std::max(cols, (x1 - x0) * 4 / 5);
      const int bar_width = std::max(1, group / cols);
      const int start = x0 + ((x1 - x0) - bar_width * cols) / 2;
      for (int c = 0; c < cols; ++c) {
        const auto ri = static_cast<std::size_t>(r), ci = static_cast<std::size_t>(c);
        const std::string text = value_text(ri, ci);
        const int center = bars ? start + c * bar_width + bar_width / 2 : (x0 + x1) / 2;
        const double v = value(ri, ci);
        const int y = y_of(v);
        const int top = (v < 0 && bars) ? y + 2 : y - line_height_ - (bars ? 1 : 3);
        text_at(center - font_.measure(text) / 2, top, text, theme_.text, "value label");
      }
    }
  }

  void draw_horizontal_bars() {
    const Ticks ticks = value_ticks(true);
    int widest_label = 0;
    for (const auto& label : table_.row_labels) widest_label = std::max(widest_label, font_.measure(label));
    if (widest_label + 6 > image_.width() * 45 / 100) {
      throw LayoutError("y-axis labels need " + std::to_string(widest_label) +
                        " px; at most 45% of the canvas may be used");
    }
    int right_reserve = 0;
    for (double t : ticks.values) right_reserve = std::max(right_reserve, font_.measure(format_tick(t, ticks.decimals)) / 2 + 1);
    int left_reserve = right_reserve;
    if (spec_.show_values) {
      for (std::size_t r = 0; r < table_.rows(); ++r) {
        for (std::size_t c = 0; c < table_.cols(); ++c) {
          int w = font_.measure(value_text(r, c)) + 4;
          if (value(r, c) >= 0) {
            right_reserve = std::max(right_reserve, w);
          } else {
            left_reserve = std::max(left_reserve, w);
          }
        }
      }
    }
    Rect plot{area_.x0 + std::max(widest_label + 6, left_reserve), area_.y0, area_.x1 - right_reserve,
              area_.y1 - line_height_ - 6};
    require_plot(plot);
    const int rows = static_cast<int>(table_.rows());
    const double slot = static_cast<double>(plot.height()) / rows;
    if (slot < line_height_) {
      throw LayoutError("y-axis labels need " + std::to_string(line_height_) + " px per row; rows are " +
                        std::to_string(static_cast<int>(slot)) + " px");
    }
    const double span = ticks.hi - ticks.lo;
    auto x_of = [&](double v) {
      return plot.x0 + static_cast<int>(std::lround((v - ticks.lo) / span * (plot.width() - 1)));
    };
    auto slot_y = [&](int r) { return plot.y0 + static_cast<int>(std::lround(slot * r)); };

    draw_frame(plot);
    for (double t : ticks.values) {
      int x = x_of(t);
      if (theme_.grid_lines) draw_line(image_, x, plot.y0, x, plot.y1 - 1, theme_.grid, 1);
      draw_line(image_, x, plot.y1, x, plot.y1 + 3, theme_.axis, 1);
      std::string text = format_tick(t, ticks.decimals);
      text_at(x - font_.measure(text) / 2, plot.y1 + 5, text, theme_.text, "x-axis tick label");
    }
    const int cols = static_cast<int>(table_.cols());
    const int zero_x = x_of(0.0);
    for (int r = 0; r < rows; ++r) {
      const int y0 = slot_y(r), y1 = slot_y(r + 1);
      const std::string& label = table_.row_labels[static_cast<std::size_t>(r)];
      text_at(plot.x0 - 6 - font_.measure(label), (y0 + y1) / 2 - line_height_ / 2, label, theme_.text,
              "y-axis label");
      const int group = std::max(cols, (y1 - y0) * 4 / 5);
      const int bar_height = std::max(1, group / cols);
      const int start = y0 + ((y1 - y0) - bar_height * cols) / 2;
      for (int c = 0; c < cols; ++c) {
        const int by = start + c * bar_height;
        const int x = x_of(value(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
        image_.fill_rect(std::min(x, zero_x), by, std::max(x, zero_x), by + bar_height,
                         series_color(static_cast<std::size_t>(c)));
      }
    }
    draw_spines(plot);

    if (!spec_.show_values) return;
    for (int r = 0; r < rows; ++r) {
      const int y0 = slot_y(r), y1 = slot_y(r + 1);
      const int group = std::max(cols, (y1 - y0) * 4 / 5);
      const int bar_height = std::max(1, group / cols);
      const int start = y0 + ((y1 - y0) - bar_height * cols) / 2;
      for (int c = 0; c < cols; ++c) {
        const auto ri = static_cast<std::size_t>(r), ci = static_cast<std::size_t>(c);
        const std::string text = value_text(ri, ci);
        const double v = value(ri, ci);
        const int x = x_of(v);
        const int center_y = start + c * bar_height + bar_height / 2;
        const int left = v >= 0 ? x + 3 : x - 3 - font_.measure(text);
        text_at(left, center_y - line_height_ / 2, text, theme_.text, "value label");
      }
    }
  }

  void draw_pie() {
    const Rect plot = area_;
    require_plot(plot);
    const int radius = std::min(plot.width(), plot.height()) / 2 - 2;
    if (radius < 16) throw LayoutError("pie radius shrinks to " + std::to_string(radius) + " px");
    const double cx = plot.x0 + plot.width() / 2.0;
    const double cy = plot.y0 + plot.height() / 2.0;

    // Slice boundaries as fractions of the full turn, clockwise from 12 o'clock.
    double total = 0;
    for (std::size_t r = 0; r < table_.rows(); ++r) total += value(r, 0);
    std::vector<double> bounds{0.0};
    for (std::size_t r = 0; r < table_.rows(); ++r) bounds.push_back(bounds.back() + value(r, 0) / total);
    bounds.back() = 1.0;

    const double two_pi = 6.283185307179586;
    const double r2 = static_cast<double>(radius) * radius;
    for (int y = plot.y0; y < plot.y1; ++y) {
      for (int x = plot.x0; x < plot.x1; ++x) {
        double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        if (dx * dx + dy * dy > r2) continue;
        double angle = std::atan2(dx, -dy);
        if (angle < 0) angle += two_pi;
        double fraction = angle / two_pi;
        auto slice = static_cast<std::size_t>(
            std::upper_bound(bounds.begin() + 1, bounds.end(), fraction) - (bounds.begin() + 1));
        if (slice >= table_.rows()) slice = table_.rows() - 1;
        image_.set(x, y, series_color(slice));
      }
    }

    if (!spec_.show_values) return;
    for (std::size_t r = 0; r < table_.rows(); ++r) {
      const double mid = (bounds[r] + bounds[r + 1]) / 2.0 * two_pi;
      const double lx = cx + std::sin(mid) * radius * 0.62;
      const double ly = cy - std::cos(mid) * radius * 0.62;
      const Rgb back = series_color(r);
      const int luminance = (299 * back.r + 587 * back.g + 114 * back.b) / 1000;
      const Rgb ink = luminance > 140 ? kBlack : kWhite;
      const std::string text = value_text(r, 0);
      text_at(static_cast<int>(std::lround(lx)) - font_.measure(text) / 2,
              static_cast<int>(std::lround(ly)) - line_height_ / 2, text, ink, "value label");
    }
  }

  const DataTable& table_;
  const ChartSpec& spec_;
  const Theme& theme_;
  const std::vector<Rgb>& colors_;
  const Font& font_;
  RasterImage image_;
  int precision_;
  int pad_ = 6;
  int line_height_ = 0;
  Rect area_;
};

}  // namespace

RasterImage render(const DataTable& table, const ChartSpec& spec) {
  spec.validate();
  const ChartSpec normal = spec.normalized();
  check_drawable(table, normal);
  return ChartPainter(table, normal).run();
}

}  // namespace chartsynth::chartrender
