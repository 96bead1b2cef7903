#include <doctest.h>

#include <map>

#include "chartrender.hpp"
#include "errors.hpp"
#include "tablegen.hpp"

using namespace chartsynth;
using namespace chartsynth::chartrender;

namespace {

DataTable three_bars(int a, int b, int c) {
  DataTable t;
  t.title = "Fixture";
  t.col_headers = {"value"};
  t.row_labels = {"first", "second", "third"};
  t.values = {{Decimal::from_int(a)}, {Decimal::from_int(b)}, {Decimal::from_int(c)}};
  return t;
}

struct Run {
  int start;
  int end;  // inclusive
  int extent;
};

// Scans for maximal runs of lines containing the mark color and measures,
// at the middle of each run, how many pixels of that color it spans.
std::vector<Run> scan_bars(const RasterImage& img, Rgb color, bool vertical) {
  const int outer = vertical ? img.width() : img.height();
  const int inner = vertical ? img.height() : img.width();
  auto at = [&](int o, int i) { return vertical ? img.at(o, i) : img.at(i, o); };
  std::vector<int> present(static_cast<std::size_t>(outer), 0);
  for (int o = 0; o < outer; ++o)
    for (int i = 0; i < inner; ++i)
      if (at(o, i) == color) {
        present[static_cast<std::size_t>(o)] = 1;
        break;
      }
  std::vector<Run> runs;
  for (int o = 0; o < outer;) {
    if (!present[static_cast<std::size_t>(o)]) {
      ++o;
      continue;
    }
    int s = o;
    while (o < outer && present[static_cast<std::size_t>(o)]) ++o;
    int mid = (s + o - 1) / 2;
    int count = 0;
    for (int i = 0; i < inner; ++i) count += at(mid, i) == color;
    runs.push_back({s, o - 1, count});
  }
  return runs;
}

ChartSpec plain_bar_spec(Orientation o) {
  ChartSpec s;
  s.orientation = o;
  s.legend = false;
  s.show_values = false;
  return s;
}

}  // namespace

TEST_CASE("bar extents are monotone in the values") {
  for (auto o : {Orientation::vertical, Orientation::horizontal}) {
    auto spec = plain_bar_spec(o);
    auto img = render(three_bars(10, 20, 30), spec);
    CHECK(img.width() == spec.width_px);
    CHECK(img.height() == spec.height_px);
    Rgb color = palette(spec.palette).front();
    auto runs = scan_bars(img, color, o == Orientation::vertical);
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].extent < runs[1].extent);
    CHECK(runs[1].extent < runs[2].extent);
    // Extents are proportional up to rounding of the pixel grid.
    CHECK(std::abs(runs[2].extent - 3 * runs[0].extent) <= 3);
  }
}

TEST_CASE("reordering values reorders the bars") {
  auto spec = plain_bar_spec(Orientation::vertical);
  auto img = render(three_bars(30, 10, 20), spec);
  auto runs = scan_bars(img, palette(spec.palette).front(), true);
  REQUIRE(runs.size() == 3);
  CHECK(runs[1].extent < runs[2].extent);
  CHECK(runs[2].extent < runs[0].extent);
}

TEST_CASE("rendering is byte deterministic") {
  tablegen::TableGenParams p;
  StylePools pools;
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto spec = sample_spec(pools, 5, i);
    p.pie_compatible = spec.chart_type == ChartType::pie;
    auto t = tablegen::generate_table(p, i);
    CHECK(encode_png(render(t, spec)) == encode_png(render(t, spec)));
  }
}

TEST_CASE("value labels add pixels") {
  for (auto type : {ChartType::bar, ChartType::line, ChartType::pie}) {
    ChartSpec off;
    off.chart_type = type;
    off = off.normalized();
    ChartSpec on = off;
    on.show_values = true;
    auto t = three_bars(10, 20, 30);
    CHECK_FALSE(render(t, off) == render(t, on));
  }
}

TEST_CASE("pie rejects negative and multi-column data") {
  ChartSpec pie;
  pie.chart_type = ChartType::pie;
  CHECK_THROWS_AS(render(three_bars(5, -3, 4), pie), UnsupportedChartError);
  auto two = three_bars(1, 2, 3);
  two.col_headers.push_back("other");
  for (auto& row : two.values) row.push_back(Decimal::from_int(1));
  CHECK_THROWS_AS(render(two, pie), UnsupportedChartError);
  CHECK_NOTHROW(render(three_bars(5, 3, 4), pie));
}

TEST_CASE("bar and line accept negative data") {
  ChartSpec s;
  CHECK_NOTHROW(render(three_bars(-5, 3, -4), s));
  s.chart_type = ChartType::line;
  CHECK_NOTHROW(render(three_bars(-5, 3, -4), s));
}

TEST_CASE("overflowing text is a layout error") {
  ChartSpec s;
  s.width_px = 64;
  s.height_px = 64;
  s.font_size = 14;
  auto t = three_bars(1, 2, 3);
  t.title = "An extremely long chart title that cannot possibly fit";
  CHECK_THROWS_AS(render(t, s), LayoutError);
}

TEST_CASE("spec validation") {
  ChartSpec s;
  s.width_px = 63;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.height_px = 2049;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.palette = "rainbow";
  CHECK_THROWS_AS(s.validate(), ConfigError);
  ChartSpec pie;
  pie.chart_type = ChartType::pie;
  pie.legend = false;
  pie.orientation = Orientation::horizontal;
  auto n = pie.normalized();
  CHECK(n.legend);
  CHECK(n.orientation == Orientation::vertical);
}

TEST_CASE("singleton pool and determinism of sampling") {
  StylePools pools;
  pools.chart_types = {ChartType::bar};
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(sample_spec(pools, 1, i).chart_type == ChartType::bar);
    CHECK(sample_spec(pools, 1, i) == sample_spec(pools, 1, i));
  }
  pools.palettes.clear();
  CHECK_THROWS_AS(sample_spec(pools, 1, 0), ConfigError);
}

TEST_CASE("chart type frequencies are near uniform") {
  StylePools pools;
  std::map<ChartType, int> counts;
  for (std::uint64_t i = 0; i < 10000; ++i) ++counts[sample_spec(pools, 99, i).chart_type];
  for (auto type : {ChartType::bar, ChartType::line, ChartType::pie}) {
    double f = counts[type] / 10000.0;
    CHECK(f > 1.0 / 3 - 0.03);
    CHECK(f < 1.0 / 3 + 0.03);
  }
}

TEST_CASE("1x1 bar script") {
  DataTable t;
  t.title = "T";
  t.col_headers = {"a"};
  t.row_labels = {"r"};
  t.values = {{Decimal::from_int(3)}};
  auto code = emit_code(t, ChartSpec{});
  CHECK(code == emit_code(t, ChartSpec{}));
  auto count = [&](const std::string& prefix) {
    int n = 0;
    std::size_t pos = 0;
    while (pos < code.size()) {
      auto eol = code.find('\n', pos);
      if (code.compare(pos, prefix.size(), prefix) == 0) ++n;
      pos = eol == std::string::npos ? code.size() : eol + 1;
    }
    return n;
  };
  CHECK(count("row ") == 1);
  CHECK(count("type ") == 1);
  CHECK(code.find("type bar\n") != std::string::npos);
  CHECK(code.find("row \"r\" 3\n") != std::string::npos);
}

TEST_CASE("emit and parse round trip for 500 pairs") {
  StylePools pools;
  tablegen::TableGenParams p;
  p.value_lo = Decimal(-9999, 2);
  p.value_hi = Decimal(9999, 2);
  p.value_precision = 2;
  p.label_vocabulary = "categories";
  for (std::uint64_t i = 0; i < 500; ++i) {
    auto spec = sample_spec(pools, 2024, i);
    p.pie_compatible = spec.chart_type == ChartType::pie;
    auto t = tablegen::generate_table(p, i);
    t.title = i % 7 == 0 ? "Quote \"x\" and back\\slash" : t.title;
    auto [t2, s2] = parse_code(emit_code(t, spec));
    CHECK(t2 == t);
    CHECK(same_rendering(s2, spec));
    CHECK(s2.seed == 0);
  }
}

TEST_CASE("parse errors") {
  try {
    parse_code("");
    FAIL("empty accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 1);
  }
  try {
    parse_code("title \"T\"\nbogus 1\n");
    FAIL("unknown keyword accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  std::string pie_negative =
      "title \"T\"\ntype pie\norient v\npalette tab10\ntheme classic\nfont dejavu-sans 12\n"
      "size 640 480\nvalues off\nlegend on\ncols \"a\"\nrow \"r\" -3\n";
  CHECK_THROWS_AS(parse_code(pie_negative), ValidationError);
}

TEST_CASE("png encoding round trips") {
  auto img = render(three_bars(1, 2, 3), ChartSpec{});
  auto bytes = encode_png(img);
  CHECK(decode_png(bytes) == img);
  CHECK(bytes == encode_png(decode_png(bytes)));
  std::vector<std::uint8_t> junk(bytes.begin(), bytes.begin() + 40);
  CHECK_THROWS_AS(decode_png(junk), ParseError);
}
