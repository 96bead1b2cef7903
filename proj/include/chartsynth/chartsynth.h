/* C interface to the chartsynth corpus toolkit.
 *
 * Every fallible call returns a cs_status. On failure the message is
 * available from cs_last_error() on the same thread until the next call.
 * Strings returned through char** are owned by the caller and released with
 * cs_string_free(); byte buffers with cs_bytes_free(). JSON arguments may be
 * NULL to mean "all defaults".
 */
#ifndef CHARTSYNTH_CHARTSYNTH_H
#define CHARTSYNTH_CHARTSYNTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CS_API __declspec(dllexport)
#else
#define CS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cs_status {
  CS_OK = 0,
  CS_ERR_CONFIG = 1,
  CS_ERR_PARSE = 2,
  CS_ERR_VALIDATION = 3,
  CS_ERR_LAYOUT = 4,
  CS_ERR_UNSUPPORTED = 5,
  CS_ERR_IO = 6,
  CS_ERR_INVALID_ARGUMENT = 7,
  CS_ERR_INTERNAL = 8
} cs_status;

CS_API const char* cs_version(void);
CS_API const char* cs_status_name(cs_status status);
CS_API const char* cs_last_error(void);

CS_API void cs_string_free(char* text);
CS_API void cs_bytes_free(uint8_t* bytes);

/* Tables */
typedef struct cs_table cs_table;

CS_API cs_status cs_table_generate(const char* params_json, uint64_t seed, uint64_t index, cs_table** out);
CS_API cs_status cs_table_delinearize(const char* text, cs_table** out);
CS_API cs_status cs_table_import(const char* path, const char* format, cs_table** out);
CS_API cs_status cs_table_linearize(const cs_table* table, char** out);
CS_API cs_status cs_table_export(const cs_table* table, const char* format, char** out);
CS_API size_t cs_table_rows(const cs_table* table);
CS_API size_t cs_table_cols(const cs_table* table);
CS_API int cs_table_equal(const cs_table* a, const cs_table* b);
CS_API void cs_table_free(cs_table* table);

/* Images (RGB8, row-major) */
typedef struct cs_image cs_image;

CS_API cs_status cs_chart_render(const cs_table* table, const char* spec_json, cs_image** out);
CS_API cs_status cs_chart_emit_code(const cs_table* table, const char* spec_json, char** out);
/* spec_json receives the parsed chart settings; either output may be NULL. */
CS_API cs_status cs_chart_parse_code(const char* script, cs_table** table, char** spec_json);
CS_API cs_status cs_text_render(const char* text, const char* params_json, cs_image** out);
CS_API cs_status cs_image_compose_header(const char* question, const cs_image* chart, const char* params_json,
                                         cs_image** out);
CS_API cs_status cs_image_decode_png(const uint8_t* data, size_t size, cs_image** out);
CS_API cs_status cs_image_encode_png(const cs_image* image, uint8_t** data, size_t* size);
CS_API int cs_image_width(const cs_image* image);
CS_API int cs_image_height(const cs_image* image);
CS_API const uint8_t* cs_image_pixels(const cs_image* image);
CS_API void cs_image_free(cs_image* image);

/* Math questions: item_json is {"module", "question", "answer"}. */
CS_API cs_status cs_math_generate(const char* module, const char* params_json, uint64_t seed, uint64_t index,
                                  char** item_json);

/* Mixtures */
CS_API cs_status cs_mixture_default(char** mixture_json);
CS_API cs_status cs_mixture_validate(const char* mixture_json, char** normalized_json);
/* target: "component:<name>", "source:<id>" or an unambiguous bare name. */
CS_API cs_status cs_mixture_ablate(const char* mixture_json, const char* target, char** out_json);

/* Metrics */
CS_API cs_status cs_relaxed_match(const char* prediction, const char* gold, int* match);
CS_API cs_status cs_bleu4(const char* const* predictions, const char* const* references, size_t n, double* score);
CS_API cs_status cs_score_files(const char* predictions_path, const char* gold_path, const char* metric,
                                int by_category, char** report_json);

/* Corpus workflows; results are JSON summaries. */
CS_API cs_status cs_build(const char* config_path, const char* const* overrides, size_t n_overrides,
                          char** summary_json);
CS_API cs_status cs_ingest(const char* kind, const char* input_path, const char* out_dir, int threads,
                           char** summary_json);
CS_API cs_status cs_corpus_stats(const char* corpus_dir, char** stats_json);

#ifdef __cplusplus
}
#endif

#endif
