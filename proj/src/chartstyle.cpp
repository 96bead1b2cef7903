#include <algorithm>
#include <map>

#include "chartrender.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "textraster.hpp"

namespace chartsynth::chartrender {

std::string_view to_string(ChartType type) {
  switch (type) {
    case ChartType::bar: return "bar";
    case ChartType::line: return "line";
    case ChartType::pie: return "pie";
  }
  return "bar";
}

std::string_view to_string(Orientation orientation) {
  return orientation == Orientation::vertical ? "v" : "h";
}

ChartType parse_chart_type(std::string_view name) {
  if (name == "bar") return ChartType::bar;
  if (name == "line") return ChartType::line;
  if (name == "pie") return ChartType::pie;
  throw ConfigError("chart_type: unknown chart type '" + std::string(name) + "'");
}

Orientation parse_orientation(std::string_view name) {
  if (name == "v" || name == "vertical") return Orientation::vertical;
  if (name == "h" || name == "horizontal") return Orientation::horizontal;
  throw ConfigError("orientation: unknown orientation '" + std::string(name) + "'");
}

namespace {

const std::map<std::string, std::vector<Rgb>, std::less<>>& palettes() {
  static const std::map<std::string, std::vector<Rgb>, std::less<>> table = {
      {"tab10", {{31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40}, {148, 103, 189},
                 {140, 86, 75}, {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207}}},
      {"deep", {{76, 114, 176}, {221, 132, 82}, {85, 168, 104}, {196, 78, 82}, {129, 114, 179},
                {147, 120, 96}, {218, 139, 195}, {140, 140, 140}, {204, 185, 116}, {100, 181, 205}}},
      {"pastel", {{161, 201, 244}, {255, 180, 130}, {141, 229, 161}, {255, 159, 155}, {208, 187, 255},
                  {222, 187, 155}, {250, 176, 228}, {207, 207, 207}, {255, 254, 163}, {185, 242, 240}}},
      {"viridis", {{68, 1, 84}, {31, 158, 137}, {253, 231, 37}, {62, 74, 137}, {109, 205, 89},
                   {72, 40, 120}, {53, 183, 121}, {49, 104, 142}, {180, 222, 44}, {38, 130, 142}}},
      {"warm", {{178, 24, 43}, {214, 96, 77}, {244, 165, 130}, {253, 219, 199}, {140, 45, 4},
                {204, 76, 2}, {236, 112, 20}, {254, 153, 41}, {254, 196, 79}, {120, 60, 30}}},
      {"grayscale", {{30, 30, 30}, {80, 80, 80}, {120, 120, 120}, {160, 160, 160}, {200, 200, 200},
                     {55, 55, 55}, {100, 100, 100}, {140, 140, 140}, {180, 180, 180}, {215, 215, 215}}},
  };
  return table;
}

const std::map<std::string, Theme, std::less<>>& themes() {
  static const std::map<std::string, Theme, std::less<>> table = {
      {"classic", {"classic", kWhite, kWhite, kBlack, {220, 220, 220}, kBlack, false, true}},
      {"whitegrid", {"whitegrid", kWhite, kWhite, {60, 60, 60}, {222, 222, 222}, {40, 40, 40}, true, false}},
      {"darkgrid", {"darkgrid", kWhite, {234, 234, 242}, {234, 234, 242}, kWhite, {40, 40, 40}, true, false}},
      {"dark", {"dark", {34, 34, 34}, {48, 48, 48}, {200, 200, 200}, {80, 80, 80}, {235, 235, 235}, true, false}},
      {"minimal", {"minimal", kWhite, kWhite, {150, 150, 150}, {235, 235, 235}, {70, 70, 70}, true, false}},
  };
  return table;
}

template <typename T>
void require_non_empty(const std::vector<T>& pool, const char* name) {
  if (pool.empty()) throw ConfigError(std::string("style pool '") + name + "' is empty");
}

}  // namespace

std::vector<std::string> palette_ids() {
  std::vector<std::string> out;
  for (const auto& [id, colors] : palettes()) out.push_back(id);
  return out;
}

std::vector<std::string> theme_ids() {
  std::vector<std::string> out;
  for (const auto& [id, t] : themes()) out.push_back(id);
  return out;
}

const std::vector<Rgb>& palette(std::string_view id) {
  auto it = palettes().find(id);
  if (it == palettes().end()) throw ConfigError("palette: unknown palette '" + std::string(id) + "'");
  return it->second;
}

const Theme& theme(std::string_view id) {
  auto it = themes().find(id);
  if (it == themes().end()) throw ConfigError("style_theme: unknown theme '" + std::string(id) + "'");
  return it->second;
}

void ChartSpec::validate() const {
  chartrender::palette(palette);
  theme(style_theme);
  if (!textraster::Font::exists(font_id, font_size)) {
    throw ConfigError("font: '" + font_id + "' at " + std::to_string(font_size) + " pt is not bundled");
  }
  if (width_px < kMinCanvas || width_px > kMaxCanvas) throw ConfigError("width_px must be in [64, 2048]");
  if (height_px < kMinCanvas || height_px > kMaxCanvas) throw ConfigError("height_px must be in [64, 2048]");
}

ChartSpec ChartSpec::normalized() const {
  ChartSpec out = *this;
  if (out.chart_type != ChartType::bar) out.orientation = Orientation::vertical;
  if (out.chart_type == ChartType::pie) out.legend = true;
  return out;
}

bool same_rendering(const ChartSpec& a, const ChartSpec& b) {
  ChartSpec x = a;
  x.seed = b.seed;
  return x == b;
}

void StylePools::validate() const {
  require_non_empty(chart_types, "chart_types");
  require_non_empty(orientations, "orientations");
  require_non_empty(palettes, "palettes");
  require_non_empty(themes, "themes");
  require_non_empty(fonts, "fonts");
  require_non_empty(font_sizes, "font_sizes");
  require_non_empty(show_values, "show_values");
  require_non_empty(legend, "legend");
  for (const auto& id : palettes) palette(id);
  for (const auto& id : themes) theme(id);
  for (const auto& font : fonts) {
    for (int size : font_sizes) {
      if (!textraster::Font::exists(font, size)) {
        throw ConfigError("fonts: '" + font + "' at " + std::to_string(size) + " pt is not bundled");
      }
    }
  }
  if (width.min > width.max || width.min < kMinCanvas || width.max > kMaxCanvas) {
    throw ConfigError("width: range must lie in [64, 2048] with min <= max");
  }
  if (height.min > height.max || height.min < kMinCanvas || height.max > kMaxCanvas) {
    throw ConfigError("height: range must lie in [64, 2048] with min <= max");
  }
}

ChartSpec sample_spec(const StylePools& pools, std::uint64_t seed, std::uint64_t index) {
  pools.validate();
  Rng rng(mix_seed(seed, index));
  ChartSpec spec;
  spec.chart_type = rng.pick(pools.chart_types);
  spec.orientation = rng.pick(pools.orientations);
  spec.palette = rng.pick(pools.palettes);
  spec.style_theme = rng.pick(pools.themes);
  spec.show_values = rng.pick(pools.show_values);
  spec.font_id = rng.pick(pools.fonts);
  spec.font_size = rng.pick(pools.font_sizes);
  spec.width_px = static_cast<int>(rng.uniform_int(pools.width.min, pools.width.max));
  spec.height_px = static_cast<int>(rng.uniform_int(pools.height.min, pools.height.max));
  spec.legend = rng.pick(pools.legend);
  spec.seed = mix_seed(seed, index);
  return spec.normalized();
}

void check_drawable(const DataTable& table, const ChartSpec& spec) {
  table.validate();
  if (spec.chart_type != ChartType::pie) return;
  if (table.cols() != 1) {
    throw UnsupportedChartError("pie charts need exactly one column, table has " +
                                std::to_string(table.cols()));
  }
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (table.values[r][0] <= Decimal::from_int(0)) {
      throw UnsupportedChartError("pie charts need positive values; row '" + table.row_labels[r] +
                                  "' is " + table.values[r][0].to_string());
    }
  }
}

}  // namespace chartsynth::chartrender
