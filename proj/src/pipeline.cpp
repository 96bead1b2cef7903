#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "chartrender.hpp"
#include "dropingest.hpp"
#include "errors.hpp"
#include "image.hpp"
#include "linearizer.hpp"
#include "mathgen.hpp"
#include "nbingest.hpp"
#include "rng.hpp"
#include "tablegen.hpp"
#include "textraster.hpp"

namespace chartsynth::pipeline {

namespace fs = std::filesystem;
using mixture::CorpusRecord;
using nlohmann::ordered_json;

namespace {

// Typed access to one JSON object; finish() rejects keys nobody asked for.
class Fields {
 public:
  Fields(const ordered_json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return obj_.contains(key);
  }

  const ordered_json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError(where_ + " lacks required key '" + key + "'");
    return obj_.at(key);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    return integer_of(obj_.at(key), key);
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(where_ + "." + key + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(where_ + "." + key + " must be a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(where_ + "." + key + " must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(where_ + "." + key + " must be a string");
    return v.get<std::string>();
  }

  std::vector<std::string> texts(const std::string& key, std::vector<std::string> fallback) {
    if (!has(key)) return fallback;
    std::vector<std::string> out;
    for (const auto& v : list(key)) {
      if (!v.is_string()) throw ConfigError(where_ + "." + key + " must list strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    std::vector<int> out;
    for (const auto& v : list(key)) out.push_back(static_cast<int>(integer_of(v, key)));
    return out;
  }

  std::vector<bool> booleans(const std::string& key, std::vector<bool> fallback) {
    if (!has(key)) return fallback;
    std::vector<bool> out;
    for (const auto& v : list(key)) {
      if (!v.is_boolean()) throw ConfigError(where_ + "." + key + " must list booleans");
      out.push_back(v.get<bool>());
    }
    return out;
  }

  tablegen::IntRange range(const std::string& key, tablegen::IntRange fallback) {
    if (!has(key)) return fallback;
    const auto& v = list(key);
    if (v.size() != 2) throw ConfigError(where_ + "." + key + " must be [min, max]");
    return {static_cast<int>(integer_of(v[0], key)), static_cast<int>(integer_of(v[1], key))};
  }

  Decimal decimal(const std::string& key, Decimal fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    std::string text = v.is_string() ? v.get<std::string>() : v.is_number() ? v.dump() : "";
    auto d = Decimal::parse(text);
    if (!d) throw ConfigError(where_ + "." + key + " must be a decimal number");
    return *d;
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown key '" + key + "' in " + where_);
    }
  }

  const std::string& where() const { return where_; }

 private:
  const ordered_json& list(const std::string& key) {
    const auto& v = obj_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(where_ + "." + key + " must be a non-empty list");
    return v;
  }

  std::int64_t integer_of(const ordered_json& v, const std::string& key) const {
    if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + " must be an integer");
    return v.get<std::int64_t>();
  }

  const ordered_json& obj_;
  std::string where_;
  std::set<std::string> used_;
};

}  // namespace

chartrender::ChartSpec chart_spec(const ordered_json* doc, const std::string& where) {
  chartrender::ChartSpec spec;
  if (doc) {
    Fields f(*doc, where);
    if (f.has("chart_type")) spec.chart_type = chartrender::parse_chart_type(f.text("chart_type", ""));
    if (f.has("orientation")) spec.orientation = chartrender::parse_orientation(f.text("orientation", ""));
    spec.palette = f.text("palette", spec.palette);
    spec.style_theme = f.text("style_theme", spec.style_theme);
    spec.show_values = f.boolean("show_values", spec.show_values);
    spec.font_id = f.text("font_id", spec.font_id);
    spec.font_size = static_cast<int>(f.integer("font_size", spec.font_size));
    spec.width_px = static_cast<int>(f.integer("width_px", spec.width_px));
    spec.height_px = static_cast<int>(f.integer("height_px", spec.height_px));
    spec.legend = f.boolean("legend", spec.legend);
    if (f.has("seed")) spec.seed = f.unsigned_integer("seed");
    f.finish();
  }
  spec.validate();
  return spec.normalized();
}

ordered_json chart_spec_json(const chartrender::ChartSpec& spec) {
  return {{"chart_type", std::string(chartrender::to_string(spec.chart_type))},
          {"orientation", std::string(chartrender::to_string(spec.orientation))},
          {"palette", spec.palette},
          {"style_theme", spec.style_theme},
          {"show_values", spec.show_values},
          {"font_id", spec.font_id},
          {"font_size", spec.font_size},
          {"width_px", spec.width_px},
          {"height_px", spec.height_px},
          {"legend", spec.legend},
          {"seed", spec.seed}};
}

tablegen::TableGenParams table_params(const ordered_json* doc, const std::string& where) {
  tablegen::TableGenParams p;
  if (doc) {
    Fields f(*doc, where);
    p.rows = f.range("rows", p.rows);
    p.cols = f.range("cols", p.cols);
    p.value_lo = f.decimal("value_lo", p.value_lo);
    p.value_hi = f.decimal("value_hi", p.value_hi);
    p.value_precision = static_cast<int>(f.integer("value_precision", p.value_precision));
    p.label_vocabulary = f.text("label_vocabulary", p.label_vocabulary);
    p.pie_compatible = f.boolean("pie_compatible", p.pie_compatible);
    f.finish();
  }
  p.validate();
  return p;
}

chartrender::StylePools style_pools(const ordered_json* doc, const std::string& where) {
  chartrender::StylePools p;
  if (doc) {
    Fields f(*doc, where);
    if (f.has("chart_types")) {
      p.chart_types.clear();
      for (const auto& t : f.texts("chart_types", {})) p.chart_types.push_back(chartrender::parse_chart_type(t));
    }
    if (f.has("orientations")) {
      p.orientations.clear();
      for (const auto& o : f.texts("orientations", {})) p.orientations.push_back(chartrender::parse_orientation(o));
    }
    p.palettes = f.texts("palettes", p.palettes);
    p.themes = f.texts("themes", p.themes);
    p.fonts = f.texts("fonts", p.fonts);
    p.font_sizes = f.integers("font_sizes", p.font_sizes);
    p.width = f.range("width", p.width);
    p.height = f.range("height", p.height);
    p.show_values = f.booleans("show_values", p.show_values);
    p.legend = f.booleans("legend", p.legend);
    f.finish();
  }
  p.validate();
  return p;
}

textraster::RenderParams render_params(const ordered_json* doc, const std::string& where) {
  textraster::RenderParams p;
  if (doc) {
    Fields f(*doc, where);
    p.canvas_width = static_cast<int>(f.integer("canvas_width", p.canvas_width));
    p.max_height = static_cast<int>(f.integer("max_height", p.max_height));
    p.font_id = f.text("font_id", p.font_id);
    p.font_size = static_cast<int>(f.integer("font_size", p.font_size));
    p.margin = static_cast<int>(f.integer("margin", p.margin));
    p.line_spacing = f.number("line_spacing", p.line_spacing);
    f.finish();
  }
  p.validate();
  return p;
}

mathgen::MathGenParams math_params(const ordered_json* doc, const std::string& where, std::uint64_t seed) {
  mathgen::MathGenParams p;
  if (doc) {
    Fields f(*doc, where);
    p.max_operands = static_cast<int>(f.integer("max_operands", p.max_operands));
    p.max_abs = static_cast<int>(f.integer("max_abs", p.max_abs));
    p.max_decimals = static_cast<int>(f.integer("max_decimals", p.max_decimals));
    f.finish();
  }
  p.seed = seed;
  p.validate();
  return p;
}

nbingest::NotebookFilters notebook_filters(const ordered_json* doc, const std::string& where, int threads) {
  nbingest::NotebookFilters p;
  if (doc) {
    Fields f(*doc, where);
    p.min_lines = static_cast<int>(f.integer("min_lines", p.min_lines));
    p.min_code_chars = static_cast<std::size_t>(f.integer("min_code_chars", static_cast<std::int64_t>(p.min_code_chars)));
    p.max_code_chars = static_cast<std::size_t>(f.integer("max_code_chars", static_cast<std::int64_t>(p.max_code_chars)));
    p.min_image_side = static_cast<int>(f.integer("min_image_side", p.min_image_side));
    p.max_image_side = static_cast<int>(f.integer("max_image_side", p.max_image_side));
    f.finish();
  }
  p.threads = threads;
  p.validate();
  return p;
}

namespace {

std::string file_safe(std::string_view id) {
  std::string out(id);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

std::string record_id(std::string_view source_id, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%06zu", index);
  return file_safe(source_id) + buf;
}

CorpusRecord make_record(std::string_view source_id, std::size_t index, const RasterImage& image, std::string target) {
  CorpusRecord r;
  r.id = record_id(source_id, index);
  r.task = std::string(source_id);
  r.image_ref = "images/" + r.id + ".png";
  r.target = std::move(target);
  r.png = std::make_shared<const std::vector<std::uint8_t>>(encode_png(image));
  r.metadata["index"] = index;
  return r;
}

unsigned thread_count(int requested, std::size_t work) {
  unsigned n = requested > 0 ? static_cast<unsigned>(requested) : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, work)));
}

struct Slot {
  std::optional<CorpusRecord> record;
  bool layout_skip = false;
  bool input_skip = false;
};

// Runs make(i) for i in [0, n) on a worker pool. Output is in index order for
// any thread count. LayoutError marks the slot as skipped; other exceptions
// abort, lowest index first.
template <typename Make>
std::vector<Slot> run_indexed(std::size_t n, int threads, Make make) {
  std::vector<Slot> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        make(i, slots[i]);
      } catch (const LayoutError&) {
        slots[i].record.reset();
        slots[i].layout_skip = true;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = thread_count(threads, n);
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return slots;
}

void collect(std::vector<Slot>& slots, SourceCorpus& out) {
  for (auto& slot : slots) {
    if (slot.layout_skip) ++out.summary.skipped_layout;
    if (slot.input_skip) ++out.summary.skipped_input;
    if (slot.record) out.records.push_back(std::move(*slot.record));
  }
  out.summary.generated = out.records.size();
}

fs::path resolve(const fs::path& base, const std::string& path) {
  fs::path p(path);
  return p.is_absolute() ? p : base / p;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void synthetic_charts(const std::string& id, Fields& f, std::uint64_t seed, int threads, bool code_target,
                      SourceCorpus& out) {
  const std::size_t count = static_cast<std::size_t>(f.integer("count", 0));
  const ordered_json* table_doc = f.has("table") ? &f.raw("table") : nullptr;
  const ordered_json* style_doc = f.has("style") ? &f.raw("style") : nullptr;
  f.finish();
  auto tp = table_params(table_doc, f.where() + ".table");
  auto pools = style_pools(style_doc, f.where() + ".style");
  tp.seed = derive_seed(seed, "table");
  const std::uint64_t style_seed = derive_seed(seed, "style");

  auto slots = run_indexed(count, threads, [&](std::size_t i, Slot& slot) {
    auto spec = chartrender::sample_spec(pools, style_seed, i);
    auto params = tp;
    params.pie_compatible = spec.chart_type == chartrender::ChartType::pie;
    DataTable table = tablegen::generate_table(params, i);
    RasterImage image = chartrender::render(table, spec);
    std::string target = code_target ? chartrender::emit_code(table, spec) : linearizer::linearize(table);
    CorpusRecord r = make_record(id, i, image, std::move(target));
    r.metadata["seed"] = spec.seed;
    r.metadata["chart_type"] = std::string(chartrender::to_string(spec.chart_type));
    slot.record = std::move(r);
  });
  collect(slots, out);
}

void imported_tables(const std::string& id, Fields& f, std::uint64_t seed, int threads, const fs::path& base,
                     SourceCorpus& out) {
  const fs::path path = resolve(base, f.text("path", ""));
  const std::string format_name = f.text("format", "");
  const ordered_json* style_doc = f.has("style") ? &f.raw("style") : nullptr;
  f.finish();
  auto pools = style_pools(style_doc, f.where() + ".style");
  const std::uint64_t style_seed = derive_seed(seed, "style");

  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".csv" || ext == ".tsv")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path, ec)) {
    files.push_back(path);
  } else {
    throw IoError("table source '" + id + "': no such file or directory '" + path.string() + "'");
  }

  auto slots = run_indexed(files.size(), threads, [&](std::size_t i, Slot& slot) {
    auto format = tablegen::parse_delimited_format(
        !format_name.empty() ? format_name : files[i].extension() == ".tsv" ? "tsv" : "csv");
    DataTable table;
    try {
      table = tablegen::import_table(files[i], format);
    } catch (const ParseError&) {
      slot.input_skip = true;
      return;
    } catch (const ValidationError&) {
      slot.input_skip = true;
      return;
    }
    auto spec = chartrender::sample_spec(pools, style_seed, i);
    try {
      chartrender::check_drawable(table, spec);
    } catch (const UnsupportedChartError&) {
      spec.chart_type = chartrender::ChartType::bar;
      spec = spec.normalized();
    }
    RasterImage image = chartrender::render(table, spec);
    CorpusRecord r = make_record(id, i, image, linearizer::linearize(table));
    r.metadata["file"] = files[i].filename().string();
    r.metadata["chart_type"] = std::string(chartrender::to_string(spec.chart_type));
    slot.record = std::move(r);
  });
  collect(slots, out);
}

void math_items(const std::string& id, Fields& f, std::uint64_t seed, int threads, SourceCorpus& out) {
  const std::size_t count = static_cast<std::size_t>(f.integer("count", 0));
  std::vector<mathgen::Module> modules;
  if (f.has("modules")) {
    for (const auto& m : f.texts("modules", {})) modules.push_back(mathgen::parse_module(m));
  } else {
    modules = mathgen::all_modules();
  }
  const ordered_json* gen_doc = f.has("gen") ? &f.raw("gen") : nullptr;
  const ordered_json* render_doc = f.has("render") ? &f.raw("render") : nullptr;
  f.finish();
  auto gen = math_params(gen_doc, f.where() + ".gen", seed);
  auto render = render_params(render_doc, f.where() + ".render");

  auto slots = run_indexed(count, threads, [&](std::size_t i, Slot& slot) {
    const auto module = modules[i % modules.size()];
    auto item = mathgen::generate_math(module, gen, i / modules.size());
    CorpusRecord r = make_record(id, i, mathgen::render_math(item, render), item.answer);
    r.metadata["seed"] = item.seed;
    r.metadata["module"] = std::string(mathgen::to_string(module));
    r.metadata["question"] = item.question;
    slot.record = std::move(r);
  });
  collect(slots, out);
}

void drop_records(const std::string& id, Fields& f, int threads, const fs::path& base, SourceCorpus& out) {
  const fs::path path = resolve(base, f.text("path", ""));
  const auto limit = f.integer("limit", -1);
  const ordered_json* render_doc = f.has("render") ? &f.raw("render") : nullptr;
  f.finish();
  auto render = render_params(render_doc, f.where() + ".render");
  auto loaded = dropingest::load_drop(path);
  out.summary.skipped_input += loaded.skipped.total();
  if (limit >= 0 && static_cast<std::size_t>(limit) < loaded.records.size()) {
    loaded.records.resize(static_cast<std::size_t>(limit));
  }

  auto slots = run_indexed(loaded.records.size(), threads, [&](std::size_t i, Slot& slot) {
    const auto& rec = loaded.records[i];
    auto image = dropingest::render_drop(rec, render);
    CorpusRecord r = make_record(id, i, image.image, rec.answer);
    r.metadata["source_id"] = rec.source_id;
    r.metadata["truncated"] = image.truncated;
    slot.record = std::move(r);
  });
  collect(slots, out);
}

void notebook_pairs(const std::string& id, Fields& f, int threads, const fs::path& base, SourceCorpus& out) {
  const fs::path path = resolve(base, f.text("path", ""));
  const ordered_json* filter_doc = f.has("filters") ? &f.raw("filters") : nullptr;
  f.finish();
  auto result = nbingest::ingest_notebooks(path, notebook_filters(filter_doc, f.where() + ".filters", threads));
  const auto& s = result.stats;
  out.summary.skipped_input += s.non_notebook + s.unparseable + s.corrupt + s.filtered;

  auto slots = run_indexed(result.pairs.size(), threads, [&](std::size_t i, Slot& slot) {
    const auto& pair = result.pairs[i];
    CorpusRecord r = make_record(id, i, pair.image, pair.code);
    r.metadata["notebook_path"] = pair.notebook_path;
    r.metadata["cell_index"] = pair.cell_index;
    r.metadata["output_index"] = pair.output_index;
    slot.record = std::move(r);
  });
  collect(slots, out);
}

void manifest_records(const std::string& id, Fields& f, const fs::path& base, SourceCorpus& out) {
  const fs::path root = resolve(base, f.text("path", ""));
  f.finish();
  auto records = mixture::read_shards(root);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CorpusRecord r;
    r.id = record_id(id, i);
    r.task = id;
    r.target = records[i].target;
    r.metadata = records[i].metadata;
    r.metadata["origin_id"] = records[i].id;
    if (!records[i].image_ref.empty()) {
      std::string bytes = read_text(root / records[i].image_ref);
      r.png = std::make_shared<const std::vector<std::uint8_t>>(bytes.begin(), bytes.end());
      r.image_ref = "images/" + r.id + ".png";
    }
    out.records.push_back(std::move(r));
  }
  out.summary.generated = out.records.size();
}

}  // namespace

void apply_override(ordered_json& doc, std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like key.path=value");
  }
  std::string_view path = assignment.substr(0, eq);
  std::string value_text(assignment.substr(eq + 1));
  ordered_json value = ordered_json::parse(value_text, nullptr, false);
  if (value.is_discarded()) value = value_text;

  ordered_json* node = &doc;
  while (true) {
    auto dot = path.find('.');
    std::string key(path.substr(0, dot));
    if (key.empty()) throw ConfigError("override '" + std::string(assignment) + "' has an empty key");
    if (!node->is_object()) throw ConfigError("override '" + std::string(assignment) + "' descends into a non-object");
    if (dot == std::string_view::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = ordered_json::object();
    path.remove_prefix(dot + 1);
  }
}

BuildConfig parse_build_config(const ordered_json& doc, const fs::path& base_dir) {
  Fields f(doc, "build config");
  BuildConfig config;
  config.base_dir = base_dir;
  if (f.integer("schema_version", -1) != kSchemaVersion) {
    throw ConfigError("build config needs \"schema_version\": " + std::to_string(kSchemaVersion));
  }
  config.seed = f.unsigned_integer("seed");
  std::string output = f.text("output_dir", "");
  if (output.empty()) throw ConfigError("build config lacks required key 'output_dir'");
  config.output_dir = resolve(base_dir, output);
  config.shard_size = static_cast<std::size_t>(f.integer("shard_size", 1000));
  if (config.shard_size == 0) throw ConfigError("shard_size must be positive");
  const auto length = f.integer("stream_length", 0);
  if (length < 0) throw ConfigError("stream_length must be >= 0");
  config.stream_length = static_cast<std::size_t>(length);
  config.threads = static_cast<int>(f.integer("threads", 0));
  if (config.threads < 0) throw ConfigError("threads must be >= 0");
  config.mixture = mixture::mixture_from_json(f.raw("mixture"));
  config.sources = f.raw("sources");
  f.finish();
  if (!config.sources.is_object()) throw ConfigError("sources must be an object keyed by source id");

  std::set<std::string> defined;
  for (const auto& [id, _] : config.sources.items()) defined.insert(id);
  mixture::validate_config(config.mixture, &defined);
  for (const auto& id : defined) {
    if (!config.mixture.find(id)) throw ConfigError("source '" + id + "' is defined but not in the mixture");
  }
  return config;
}

BuildConfig load_build_config(const fs::path& path, const std::vector<std::string>& overrides) {
  std::string text = read_text(path);
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError(1, 0, "build config '" + path.string() + "' is not valid JSON");
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_build_config(doc, path.parent_path());
}

SourceCorpus generate_source(const std::string& source_id, const ordered_json& definition, std::uint64_t seed,
                             int threads, const fs::path& base_dir) {
  Fields f(definition, "sources." + source_id);
  SourceCorpus out;
  out.summary.source_id = source_id;
  out.summary.kind = f.text("kind", "");
  const std::string& kind = out.summary.kind;
  if (kind == "chart_table" || kind == "chart_code") {
    synthetic_charts(source_id, f, seed, threads, kind == "chart_code", out);
  } else if (kind == "table_import") {
    imported_tables(source_id, f, seed, threads, base_dir, out);
  } else if (kind == "math") {
    math_items(source_id, f, seed, threads, out);
  } else if (kind == "drop") {
    drop_records(source_id, f, threads, base_dir, out);
  } else if (kind == "notebooks") {
    notebook_pairs(source_id, f, threads, base_dir, out);
  } else if (kind == "manifest") {
    manifest_records(source_id, f, base_dir, out);
  } else {
    throw ConfigError("sources." + source_id + " has unknown kind '" + kind +
                      "' (chart_table, chart_code, table_import, math, drop, notebooks, manifest)");
  }
  return out;
}

BuildSummary build_corpus(const BuildConfig& config) {
  const auto flat = config.mixture.flattened();
  std::map<std::string, SourceCorpus> corpora;
  std::map<std::string, std::size_t> sizes;
  std::size_t total = 0;
  for (const auto& source : flat) {
    SourceCorpus corpus;
    corpus.summary.source_id = source.source_id;
    auto def = config.sources.find(source.source_id);
    if (def != config.sources.end()) {
      corpus = generate_source(source.source_id, *def, derive_seed(config.seed, source.source_id), config.threads,
                               config.base_dir);
    } else {
      corpus.summary.kind = "placeholder";
    }
    sizes[source.source_id] = corpus.records.size();
    total += corpus.records.size();
    corpora.emplace(source.source_id, std::move(corpus));
  }

  BuildSummary summary;
  summary.stream_length = config.stream_length > 0 ? config.stream_length : total;
  auto slots = mixture::sample_stream(config.mixture, sizes, derive_seed(config.seed, "mixture"), summary.stream_length);

  std::vector<CorpusRecord> stream;
  stream.reserve(slots.size());
  for (std::size_t pos = 0; pos < slots.size(); ++pos) {
    const auto& slot = slots[pos];
    const std::string& id = flat[slot.source].source_id;
    SourceCorpus& corpus = corpora.at(id);
    ++corpus.summary.drawn;
    CorpusRecord r;
    if (corpus.records.empty()) {
      r.id = record_id(id, slot.record);
      r.task = id;
      r.metadata["placeholder"] = true;
      r.metadata["ordinal"] = slot.record;
    } else {
      r = corpus.records[slot.record];
      r.metadata["epoch"] = slot.epoch;
    }
    r.metadata["position"] = pos;
    stream.push_back(std::move(r));
  }

  summary.shards = mixture::write_shards(stream, config.output_dir, config.shard_size);
  for (const auto& source : flat) summary.sources.push_back(corpora.at(source.source_id).summary);
  return summary;
}

ordered_json BuildSummary::to_json() const {
  ordered_json out;
  out["stream_length"] = stream_length;
  ordered_json per_source = ordered_json::array();
  for (const auto& s : sources) {
    per_source.push_back({{"source_id", s.source_id},
                          {"kind", s.kind},
                          {"generated", s.generated},
                          {"skipped_layout", s.skipped_layout},
                          {"skipped_input", s.skipped_input},
                          {"drawn", s.drawn}});
  }
  out["sources"] = std::move(per_source);
  out["shards"] = shards.shards;
  out["images"] = shards.images;
  out["checksum_file"] = shards.checksum_file;
  return out;
}

IngestKind parse_ingest_kind(std::string_view name) {
  if (name == "notebooks") return IngestKind::notebooks;
  if (name == "drop") return IngestKind::drop;
  throw ConfigError("unknown ingest kind '" + std::string(name) + "' (expected notebooks or drop)");
}

IngestSummary ingest(IngestKind kind, const fs::path& input, const fs::path& out_dir, std::size_t shard_size,
                     int threads) {
  SourceCorpus corpus;
  IngestSummary summary;
  if (kind == IngestKind::notebooks) {
    auto result = nbingest::ingest_notebooks(input, nbingest::NotebookFilters{.threads = threads});
    const auto& s = result.stats;
    summary.skipped = {{"files_scanned", s.files_scanned}, {"notebooks", s.notebooks},
                       {"non_notebook", s.non_notebook},   {"unparseable", s.unparseable},
                       {"png_outputs", s.png_outputs},     {"corrupt", s.corrupt},
                       {"filtered", s.filtered}};
    auto slots = run_indexed(result.pairs.size(), threads, [&](std::size_t i, Slot& slot) {
      const auto& pair = result.pairs[i];
      CorpusRecord r = make_record("chart_to_code_real", i, pair.image, pair.code);
      r.metadata["notebook_path"] = pair.notebook_path;
      r.metadata["cell_index"] = pair.cell_index;
      r.metadata["output_index"] = pair.output_index;
      slot.record = std::move(r);
    });
    collect(slots, corpus);
  } else {
    auto loaded = dropingest::load_drop(input);
    textraster::RenderParams render;
    auto slots = run_indexed(loaded.records.size(), threads, [&](std::size_t i, Slot& slot) {
      const auto& rec = loaded.records[i];
      auto image = dropingest::render_drop(rec, render);
      CorpusRecord r = make_record("drop", i, image.image, rec.answer);
      r.metadata["source_id"] = rec.source_id;
      r.metadata["truncated"] = image.truncated;
      slot.record = std::move(r);
    });
    collect(slots, corpus);
    summary.skipped = {{"qa_pairs", loaded.qa_pairs},
                       {"empty_answer", loaded.skipped.empty_answer},
                       {"empty_text", loaded.skipped.empty_text},
                       {"layout", corpus.summary.skipped_layout}};
  }
  summary.records = corpus.records.size();
  summary.shards = mixture::write_shards(corpus.records, out_dir, shard_size);
  return summary;
}

ordered_json IngestSummary::to_json() const {
  return {{"records", records}, {"skipped", skipped}, {"shards", shards.shards}, {"images", shards.images}};
}

ordered_json corpus_stats(const fs::path& corpus_dir) {
  auto records = mixture::read_shards(corpus_dir);
  std::map<std::string, std::size_t> per_task;
  std::size_t placeholders = 0;
  std::set<std::string> images;
  for (const auto& r : records) {
    ++per_task[r.task];
    if (r.image_ref.empty()) ++placeholders;
    else images.insert(r.image_ref);
  }
  ordered_json tasks = ordered_json::object();
  for (const auto& [task, n] : per_task) tasks[task] = n;

  ordered_json out;
  out["records"] = records.size();
  out["tasks"] = std::move(tasks);
  out["placeholders"] = placeholders;
  out["distinct_images"] = images.size();
  std::error_code ec;
  if (fs::exists(corpus_dir / mixture::kChecksumFile, ec)) {
    auto bad = mixture::verify_checksums(corpus_dir);
    out["checksums"] = bad.empty() ? "ok" : "mismatch";
    if (!bad.empty()) out["mismatched"] = bad;
  } else {
    out["checksums"] = "missing";
  }
  return out;
}

}  // namespace chartsynth::pipeline
