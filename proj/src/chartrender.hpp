#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "image.hpp"
#include "table.hpp"
#include "tablegen.hpp"

namespace chartsynth::chartrender {

enum class ChartType { bar, line, pie };
enum class Orientation { vertical, horizontal };

std::string_view to_string(ChartType type);
std::string_view to_string(Orientation orientation);
/// Throws ConfigError on unknown names.
ChartType parse_chart_type(std::string_view name);
Orientation parse_orientation(std::string_view name);

inline constexpr int kMinCanvas = 64;
inline constexpr int kMaxCanvas = 2048;

/// Every option that decides how a table is drawn. `seed` records where the
/// options came from; it is not part of the drawing and not part of the chart
/// code.
struct ChartSpec {
  ChartType chart_type = ChartType::bar;
  Orientation orientation = Orientation::vertical;
  std::string palette = "tab10";
  std::string style_theme = "classic";
  bool show_values = false;
  std::string font_id = "dejavu-sans";
  int font_size = 12;
  int width_px = 640;
  int height_px = 480;
  bool legend = true;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Orientation is only meaningful for bars; pies always carry a legend.
  ChartSpec normalized() const;

  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

/// Equality over the drawn fields (everything except `seed`).
bool same_rendering(const ChartSpec& a, const ChartSpec& b);

struct Theme {
  std::string id;
  Rgb background;
  Rgb plot_background;
  Rgb axis;
  Rgb grid;
  Rgb text;
  bool grid_lines;
  bool box;  // all four spines instead of left and bottom only
};

std::vector<std::string> palette_ids();
std::vector<std::string> theme_ids();
/// Throws ConfigError for unknown ids.
const std::vector<Rgb>& palette(std::string_view id);
const Theme& theme(std::string_view id);

/// Allowed values per ChartSpec field. Every list must be non-empty.
struct StylePools {
  std::vector<ChartType> chart_types{ChartType::bar, ChartType::line, ChartType::pie};
  std::vector<Orientation> orientations{Orientation::vertical, Orientation::horizontal};
  std::vector<std::string> palettes = palette_ids();
  std::vector<std::string> themes = theme_ids();
  std::vector<std::string> fonts{"dejavu-sans", "dejavu-serif", "dejavu-mono"};
  std::vector<int> font_sizes{10, 12, 14};
  tablegen::IntRange width{480, 800};
  tablegen::IntRange height{360, 600};
  std::vector<bool> show_values{false, true};
  std::vector<bool> legend{false, true};

  void validate() const;
};

/// Pure function of (pools, seed, index); the result is normalized.
ChartSpec sample_spec(const StylePools& pools, std::uint64_t seed, std::uint64_t index);

/// Throws UnsupportedChartError (pie with negative/zero values or more than one
/// column) or LayoutError naming the element that does not fit.
RasterImage render(const DataTable& table, const ChartSpec& spec);

/// Canonical chart script, one statement per line in this order:
/// title, type, orient, palette, theme, font, size, values, legend, cols, row...
std::string emit_code(const DataTable& table, const ChartSpec& spec);

/// Throws ParseError (line:column) on grammar violations and ValidationError
/// when the described chart is not drawable (unknown ids, pie with negative
/// values). The returned spec is normalized and has seed 0.
std::pair<DataTable, ChartSpec> parse_code(std::string_view script);

/// Checks that the table can be drawn with the chart type.
void check_drawable(const DataTable& table, const ChartSpec& spec);

}  // namespace chartsynth::chartrender
