#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rational.hpp"

namespace chartsynth::metrics {

enum class Category { data_extraction, math_reasoning, plot_attributes };
inline constexpr Category kAllCategories[] = {Category::data_extraction, Category::math_reasoning,
                                              Category::plot_attributes};

const char* to_string(Category category);
std::optional<Category> parse_category(std::string_view name);

enum class Metric { relaxed, bleu4 };
const char* to_string(Metric metric);
Metric parse_metric(std::string_view name);  // throws ConfigError

struct EvalPair {
  std::string id;
  std::string prediction;
  std::string gold;
  std::vector<Category> categories;  // empty when untagged
};

/// Strips whitespace, one leading currency sign ($ € £ ¥), a trailing '%',
/// and ',' thousands separators between well-formed digit groups.
std::optional<Rational> parse_number(std::string_view text);

/// Numeric gold: |p - g| <= |g| / 20 exactly (p == 0 when g == 0). Otherwise
/// case-insensitive equality after trimming.
bool relaxed_match(std::string_view prediction, std::string_view gold);

/// Corpus BLEU-4 over lowercased whitespace tokens, uniform weights, no
/// smoothing. Throws ValidationError on empty or mismatched inputs.
double bleu4(const std::vector<std::string>& predictions, const std::vector<std::string>& references);

struct Bucket {
  Category category;
  double score = 0.0;  // 0 when n == 0
  std::size_t n = 0;
};

struct MetricReport {
  Metric metric = Metric::relaxed;
  double overall = 0.0;
  std::size_t n = 0;
  std::vector<Bucket> buckets;  // one per category, in kAllCategories order

  /// JSON text; buckets are included only when `by_category` is set.
  std::string to_json(bool by_category = true) const;
};

/// Throws ValidationError on duplicate ids or an empty list.
MetricReport score_file(const std::vector<EvalPair>& pairs, Metric metric);

/// Joins a prediction JSONL file ({id, prediction}) with a gold JSONL file
/// ({id, gold, categories?}) in gold order. A gold id without a prediction
/// is scored against an empty prediction; a prediction id absent from gold,
/// duplicate ids, and unknown categories throw ValidationError.
std::vector<EvalPair> load_eval_pairs(const std::filesystem::path& predictions,
                                      const std::filesystem::path& gold);

}  // namespace chartsynth::metrics
