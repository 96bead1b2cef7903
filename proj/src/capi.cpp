#include "chartsynth/chartsynth.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "chartrender.hpp"
#include "errors.hpp"
#include "image.hpp"
#include "linearizer.hpp"
#include "mathgen.hpp"
#include "metrics.hpp"
#include "mixture.hpp"
#include "pipeline.hpp"
#include "tablegen.hpp"
#include "textraster.hpp"

struct cs_table {
  chartsynth::DataTable table;
};

struct cs_image {
  chartsynth::RasterImage image;
};

namespace {

using nlohmann::ordered_json;
namespace cs = chartsynth;

thread_local std::string g_last_error;

cs_status fail(cs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

cs_status status_of(cs::ErrorKind kind) {
  switch (kind) {
    case cs::ErrorKind::config: return CS_ERR_CONFIG;
    case cs::ErrorKind::parse: return CS_ERR_PARSE;
    case cs::ErrorKind::validation: return CS_ERR_VALIDATION;
    case cs::ErrorKind::layout: return CS_ERR_LAYOUT;
    case cs::ErrorKind::unsupported: return CS_ERR_UNSUPPORTED;
    case cs::ErrorKind::io: return CS_ERR_IO;
  }
  return CS_ERR_INTERNAL;
}

template <typename Body>
cs_status guarded(Body body) {
  g_last_error.clear();
  try {
    body();
    return CS_OK;
  } catch (const cs::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CS_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CS_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void require(const void* p, const char* name) {
  if (!p) throw std::invalid_argument(std::string(name) + " must not be NULL");
}

// Null or empty text means defaults.
std::optional<ordered_json> parse_json(const char* text, const char* what) {
  if (!text || !*text) return std::nullopt;
  ordered_json doc = ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw cs::ParseError(1, 0, std::string(what) + " is not valid JSON");
  return doc;
}

const ordered_json* ptr(const std::optional<ordered_json>& doc) { return doc ? &*doc : nullptr; }

}  // namespace

extern "C" {

const char* cs_version(void) { return "0.1.0"; }

const char* cs_status_name(cs_status status) {
  switch (status) {
    case CS_OK: return "ok";
    case CS_ERR_CONFIG: return "config";
    case CS_ERR_PARSE: return "parse";
    case CS_ERR_VALIDATION: return "validation";
    case CS_ERR_LAYOUT: return "layout";
    case CS_ERR_UNSUPPORTED: return "unsupported";
    case CS_ERR_IO: return "io";
    case CS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cs_last_error(void) { return g_last_error.c_str(); }

void cs_string_free(char* text) { std::free(text); }
void cs_bytes_free(uint8_t* bytes) { std::free(bytes); }

cs_status cs_table_generate(const char* params_json, uint64_t seed, uint64_t index, cs_table** out) {
  if (!out) return fail(CS_ERR_INVALID_ARGUMENT, "out must not be NULL");
  return guarded([&] {
    auto doc = parse_json(params_json, "table params");
    auto params = cs::pipeline::table_params(ptr(doc), "table params");
    params.seed = seed;
    *out = new cs_table{cs::tablegen::generate_table(params, index)};
  });
}

cs_status cs_table_delinearize(const char* text, cs_table** out) {
  if (!text || !out) return fail(CS_ERR_INVALID_ARGUMENT, "text and out must not be NULL");
  return guarded([&] { *out = new cs_table{cs::linearizer::delinearize(text)}; });
}

cs_status cs_table_import(const char* path, const char* format, cs_table** out) {
  if (!path || !out) return fail(CS_ERR_INVALID_ARGUMENT, "path and out must not be NULL");
  return guarded([&] {
    auto f = cs::tablegen::parse_delimited_format(format && *format ? format : "csv");
    *out = new cs_table{cs::tablegen::import_table(path, f)};
  });
}

cs_status cs_table_linearize(const cs_table* table, char** out) {
  if (!table || !out) return fail(CS_ERR_INVALID_ARGUMENT, "table and out must not be NULL");
  return guarded([&] { *out = copy_string(cs::linearizer::linearize(table->table)); });
}

cs_status cs_table_export(const cs_table* table, const char* format, char** out) {
  if (!table || !out) return fail(CS_ERR_INVALID_ARGUMENT, "table and out must not be NULL");
  return guarded([&] {
    auto f = cs::tablegen::parse_delimited_format(format && *format ? format : "csv");
    *out = copy_string(cs::tablegen::export_delimited(table->table, f));
  });
}

size_t cs_table_rows(const cs_table* table) { return table ? table->table.rows() : 0; }
size_t cs_table_cols(const cs_table* table) { return table ? table->table.cols() : 0; }

int cs_table_equal(const cs_table* a, const cs_table* b) { return a && b && a->table == b->table ? 1 : 0; }

void cs_table_free(cs_table* table) { delete table; }

cs_status cs_chart_render(const cs_table* table, const char* spec_json, cs_image** out) {
  if (!table || !out) return fail(CS_ERR_INVALID_ARGUMENT, "table and out must not be NULL");
  return guarded([&] {
    auto doc = parse_json(spec_json, "chart spec");
    auto spec = cs::pipeline::chart_spec(ptr(doc), "chart spec");
    *out = new cs_image{cs::chartrender::render(table->table, spec)};
  });
}

cs_status cs_chart_emit_code(const cs_table* table, const char* spec_json, char** out) {
  if (!table || !out) return fail(CS_ERR_INVALID_ARGUMENT, "table and out must not be NULL");
  return guarded([&] {
    auto doc = parse_json(spec_json, "chart spec");
    auto spec = cs::pipeline::chart_spec(ptr(doc), "chart spec");
    *out = copy_string(cs::chartrender::emit_code(table->table, spec));
  });
}

cs_status cs_chart_parse_code(const char* script, cs_table** table, char** spec_json) {
  if (!script) return fail(CS_ERR_INVALID_ARGUMENT, "script must not be NULL");
  return guarded([&] {
    auto [parsed, spec] = cs::chartrender::parse_code(script);
    char* spec_text = spec_json ? copy_string(cs::pipeline::chart_spec_json(spec).dump()) : nullptr;
    if (table) *table = new cs_table{std::move(parsed)};
    if (spec_json) *spec_json = spec_text;
  });
}

cs_status cs_text_render(const char* text, const char* params_json, cs_image** out) {
  if (!text || !out) return fail(CS_ERR_INVALID_ARGUMENT, "text and out must not be NULL");
  return guarded([&] {
    auto doc = parse_json(params_json, "render params");
    auto params = cs::pipeline::render_params(ptr(doc), "render params");
    *out = new cs_image{cs::textraster::rasterize_text(text, params).image};
  });
}

cs_status cs_image_compose_header(const char* question, const cs_image* chart, const char* params_json,
                                  cs_image** out) {
  if (!question || !chart || !out) return fail(CS_ERR_INVALID_ARGUMENT, "question, chart and out must not be NULL");
  return guarded([&] {
    auto doc = parse_json(params_json, "render params");
    auto params = cs::pipeline::render_params(ptr(doc), "render params");
    *out = new cs_image{cs::textraster::compose_question_header(question, chart->image, params)};
  });
}

cs_status cs_image_decode_png(const uint8_t* data, size_t size, cs_image** out) {
  if (!data || !out) return fail(CS_ERR_INVALID_ARGUMENT, "data and out must not be NULL");
  return guarded([&] { *out = new cs_image{cs::decode_png({data, size})}; });
}

cs_status cs_image_encode_png(const cs_image* image, uint8_t** data, size_t* size) {
  if (!image || !data || !size) return fail(CS_ERR_INVALID_ARGUMENT, "image, data and size must not be NULL");
  return guarded([&] {
    auto bytes = cs::encode_png(image->image);
    auto* buffer = static_cast<uint8_t*>(std::malloc(bytes.size()));
    if (!buffer) throw std::bad_alloc();
    std::memcpy(buffer, bytes.data(), bytes.size());
    *data = buffer;
    *size = bytes.size();
  });
}

int cs_image_width(const cs_image* image) { return image ? image->image.width() : 0; }
int cs_image_height(const cs_image* image) { return image ? image->image.height() : 0; }
const uint8_t* cs_image_pixels(const cs_image* image) { return image ? image->image.pixels().data() : nullptr; }
void cs_image_free(cs_image* image) { delete image; }

cs_status cs_math_generate(const char* module, const char* params_json, uint64_t seed, uint64_t index,
                           char** item_json) {
  if (!module || !item_json) return fail(CS_ERR_INVALID_ARGUMENT, "module and item_json must not be NULL");
  return guarded([&] {
    auto doc = parse_json(params_json, "math params");
    auto params = cs::pipeline::math_params(ptr(doc), "math params", seed);
    auto item = cs::mathgen::generate_math(cs::mathgen::parse_module(module), params, index);
    *item_json = copy_string(cs::mathgen::to_jsonl(item));
  });
}

cs_status cs_mixture_default(char** mixture_json) {
  if (!mixture_json) return fail(CS_ERR_INVALID_ARGUMENT, "mixture_json must not be NULL");
  return guarded([&] {
    *mixture_json = copy_string(cs::mixture::mixture_to_json(cs::mixture::default_mixture()).dump(2) + "\n");
  });
}

cs_status cs_mixture_validate(const char* mixture_json, char** normalized_json) {
  if (!mixture_json) return fail(CS_ERR_INVALID_ARGUMENT, "mixture_json must not be NULL");
  return guarded([&] {
    auto config = cs::mixture::validate_config(cs::mixture::parse_mixture(mixture_json));
    if (normalized_json) *normalized_json = copy_string(cs::mixture::mixture_to_json(config).dump(2) + "\n");
  });
}

cs_status cs_mixture_ablate(const char* mixture_json, const char* target, char** out_json) {
  if (!mixture_json || !target || !out_json) {
    return fail(CS_ERR_INVALID_ARGUMENT, "mixture_json, target and out_json must not be NULL");
  }
  return guarded([&] {
    auto config = cs::mixture::validate_config(cs::mixture::parse_mixture(mixture_json));
    auto ablated = cs::mixture::validate_config(cs::mixture::ablate(config, target));
    *out_json = copy_string(cs::mixture::mixture_to_json(ablated).dump(2) + "\n");
  });
}

cs_status cs_relaxed_match(const char* prediction, const char* gold, int* match) {
  if (!prediction || !gold || !match) return fail(CS_ERR_INVALID_ARGUMENT, "arguments must not be NULL");
  return guarded([&] { *match = cs::metrics::relaxed_match(prediction, gold) ? 1 : 0; });
}

cs_status cs_bleu4(const char* const* predictions, const char* const* references, size_t n, double* score) {
  if (!score || (n > 0 && (!predictions || !references))) {
    return fail(CS_ERR_INVALID_ARGUMENT, "arguments must not be NULL");
  }
  return guarded([&] {
    std::vector<std::string> preds, refs;
    for (size_t i = 0; i < n; ++i) {
      require(predictions[i], "prediction");
      require(references[i], "reference");
      preds.emplace_back(predictions[i]);
      refs.emplace_back(references[i]);
    }
    *score = cs::metrics::bleu4(preds, refs);
  });
}

cs_status cs_score_files(const char* predictions_path, const char* gold_path, const char* metric, int by_category,
                         char** report_json) {
  if (!predictions_path || !gold_path || !metric || !report_json) {
    return fail(CS_ERR_INVALID_ARGUMENT, "arguments must not be NULL");
  }
  return guarded([&] {
    auto m = cs::metrics::parse_metric(metric);
    auto report = cs::metrics::score_file(cs::metrics::load_eval_pairs(predictions_path, gold_path), m);
    *report_json = copy_string(report.to_json(by_category != 0));
  });
}

cs_status cs_build(const char* config_path, const char* const* overrides, size_t n_overrides, char** summary_json) {
  if (!config_path || (n_overrides > 0 && !overrides)) return fail(CS_ERR_INVALID_ARGUMENT, "arguments must not be NULL");
  return guarded([&] {
    std::vector<std::string> sets;
    for (size_t i = 0; i < n_overrides; ++i) {
      require(overrides[i], "override");
      sets.emplace_back(overrides[i]);
    }
    auto config = cs::pipeline::load_build_config(config_path, sets);
    auto summary = cs::pipeline::build_corpus(config);
    if (summary_json) *summary_json = copy_string(summary.to_json().dump(2) + "\n");
  });
}

cs_status cs_ingest(const char* kind, const char* input_path, const char* out_dir, int threads, char** summary_json) {
  if (!kind || !input_path || !out_dir) return fail(CS_ERR_INVALID_ARGUMENT, "arguments must not be NULL");
  return guarded([&] {
    auto summary = cs::pipeline::ingest(cs::pipeline::parse_ingest_kind(kind), input_path, out_dir, 1000, threads);
    if (summary_json) *summary_json = copy_string(summary.to_json().dump(2) + "\n");
  });
}

cs_status cs_corpus_stats(const char* corpus_dir, char** stats_json) {
  if (!corpus_dir || !stats_json) return fail(CS_ERR_INVALID_ARGUMENT, "arguments must not be NULL");
  return guarded([&] { *stats_json = copy_string(cs::pipeline::corpus_stats(corpus_dir).dump(2) + "\n"); });
}

}  // extern "C"
