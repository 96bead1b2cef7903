#include "metrics.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "errors.hpp"

namespace chartsynth::metrics {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(Category category) {
  switch (category) {
    case Category::data_extraction: return "data_extraction";
    case Category::math_reasoning: return "math_reasoning";
    case Category::plot_attributes: return "plot_attributes";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view name) {
  for (Category c : kAllCategories) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

const char* to_string(Metric metric) { return metric == Metric::relaxed ? "relaxed" : "bleu4"; }

Metric parse_metric(std::string_view name) {
  if (name == "relaxed") return Metric::relaxed;
  if (name == "bleu4") return Metric::bleu4;
  throw ConfigError("unknown metric '" + std::string(name) + "' (expected relaxed or bleu4)");
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool strip_prefix(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

bool strip_currency(std::string_view& s) {
  for (std::string_view sign : {"$", "\xE2\x82\xAC", "\xC2\xA3", "\xC2\xA5"}) {
    if (strip_prefix(s, sign)) return true;
  }
  return false;
}

// Integer part with optional thousands grouping: 1-3 digits then ",ddd" groups.
std::optional<std::string> ungroup(std::string_view digits) {
  if (digits.find(',') == std::string_view::npos) return std::string(digits);
  std::string out;
  std::size_t first = digits.find(',');
  if (first == 0 || first > 3) return std::nullopt;
  out.append(digits.substr(0, first));
  std::size_t pos = first;
  while (pos < digits.size()) {
    if (digits[pos] != ',' || pos + 4 > digits.size()) return std::nullopt;
    std::string_view group = digits.substr(pos + 1, 3);
    if (group.find(',') != std::string_view::npos) return std::nullopt;
    out.append(group);
    pos += 4;
  }
  return out;
}

}  // namespace

std::optional<Rational> parse_number(std::string_view text) {
  std::string_view s = trim(text);
  char sign = 0;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    sign = s.front();
    s.remove_prefix(1);
  }
  if (strip_currency(s) && sign == 0 && !s.empty() && (s.front() == '-' || s.front() == '+')) {
    sign = s.front();
    s.remove_prefix(1);
  }
  if (!s.empty() && s.back() == '%') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;

  std::size_t point = s.find('.');
  std::string_view int_part = s.substr(0, point);
  std::string_view frac_part = point == std::string_view::npos ? std::string_view{} : s.substr(point + 1);
  for (char c : int_part) {
    if (!is_digit(c) && c != ',') return std::nullopt;
  }
  for (char c : frac_part) {
    if (!is_digit(c)) return std::nullopt;
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  auto digits = ungroup(int_part);
  if (!digits) return std::nullopt;

  std::string plain;
  if (sign == '-') plain.push_back('-');
  plain += digits->empty() ? "0" : *digits;
  if (!frac_part.empty()) {
    plain.push_back('.');
    plain.append(frac_part);
  }
  return Rational::parse(plain);
}

bool relaxed_match(std::string_view prediction, std::string_view gold) {
  if (auto g = parse_number(gold)) {
    auto p = parse_number(prediction);
    if (!p) return false;
    if (g->is_zero()) return p->is_zero();
    try {
      return (*p - *g).abs() * Rational(20) <= g->abs();
    } catch (const std::overflow_error&) {
      return std::abs(p->to_double() - g->to_double()) * 20.0 <= std::abs(g->to_double());
    }
  }
  return lower(trim(prediction)) == lower(trim(gold));
}

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(lower(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(lower(current));
  return tokens;
}

std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

double bleu4(const std::vector<std::string>& predictions, const std::vector<std::string>& references) {
  if (predictions.size() != references.size()) {
    throw ValidationError("bleu4 needs equal-length lists (got " + std::to_string(predictions.size()) + " and " +
                          std::to_string(references.size()) + ")");
  }
  if (predictions.empty()) throw ValidationError("bleu4 needs at least one pair");

  std::size_t matches[4] = {0, 0, 0, 0};
  std::size_t totals[4] = {0, 0, 0, 0};
  std::size_t cand_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    auto cand = tokenize(predictions[i]);
    auto ref = tokenize(references[i]);
    cand_len += cand.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      auto cand_counts = ngram_counts(cand, n);
      auto ref_counts = ngram_counts(ref, n);
      for (const auto& [gram, count] : cand_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matches[n - 1] += std::min(count, it->second);
      }
      if (cand.size() >= n) totals[n - 1] += cand.size() - n + 1;
    }
  }
  if (cand_len == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < 4; ++n) {
    if (matches[n] == 0 || totals[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n]));
  }
  double bp = std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len)));
  return bp * std::exp(log_sum / 4.0);
}

namespace {

double score_subset(const std::vector<const EvalPair*>& subset, Metric metric) {
  if (subset.empty()) return 0.0;
  if (metric == Metric::relaxed) {
    std::size_t correct = 0;
    for (const EvalPair* p : subset) correct += relaxed_match(p->prediction, p->gold) ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(subset.size());
  }
  std::vector<std::string> preds, refs;
  for (const EvalPair* p : subset) {
    preds.push_back(p->prediction);
    refs.push_back(p->gold);
  }
  return bleu4(preds, refs);
}

}  // namespace

MetricReport score_file(const std::vector<EvalPair>& pairs, Metric metric) {
  if (pairs.empty()) throw ValidationError("no pairs to score");
  std::set<std::string> ids;
  std::vector<const EvalPair*> all;
  for (const auto& pair : pairs) {
    if (!ids.insert(pair.id).second) throw ValidationError("duplicate id '" + pair.id + "'");
    all.push_back(&pair);
  }

  MetricReport report;
  report.metric = metric;
  report.n = pairs.size();
  report.overall = score_subset(all, metric);
  for (Category c : kAllCategories) {
    std::vector<const EvalPair*> members;
    for (const auto& pair : pairs) {
      for (Category pc : pair.categories) {
        if (pc == c) {
          members.push_back(&pair);
          break;
        }
      }
    }
    report.buckets.push_back({c, score_subset(members, metric), members.size()});
  }
  return report;
}

std::string MetricReport::to_json(bool by_category) const {
  ordered_json out;
  out["metric"] = metrics::to_string(metric);
  out["overall"] = overall;
  out["n"] = n;
  if (by_category) {
    ordered_json cats = ordered_json::object();
    for (const auto& b : buckets) {
      cats[metrics::to_string(b.category)] = {{"score", b.score}, {"n", b.n}};
    }
    out["categories"] = std::move(cats);
  }
  return out.dump(2) + "\n";
}

namespace {

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.is_object()) {
      throw ParseError(line_no, 0, path.filename().string() + ": not a JSON object");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string text_of(const json& row, const char* key, const std::filesystem::path& path) {
  auto it = row.find(key);
  if (it == row.end()) throw ValidationError(path.filename().string() + ": record lacks '" + key + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number()) return it->dump();
  throw ValidationError(path.filename().string() + ": '" + key + "' must be a string or number");
}

}  // namespace

std::vector<EvalPair> load_eval_pairs(const std::filesystem::path& predictions, const std::filesystem::path& gold) {
  std::unordered_map<std::string, std::string> pred_by_id;
  for (const auto& row : read_jsonl(predictions)) {
    std::string id = text_of(row, "id", predictions);
    if (!pred_by_id.emplace(id, text_of(row, "prediction", predictions)).second) {
      throw ValidationError("duplicate prediction id '" + id + "'");
    }
  }

  std::vector<EvalPair> pairs;
  std::set<std::string> gold_ids;
  for (const auto& row : read_jsonl(gold)) {
    EvalPair pair;
    pair.id = text_of(row, "id", gold);
    if (!gold_ids.insert(pair.id).second) throw ValidationError("duplicate gold id '" + pair.id + "'");
    pair.gold = text_of(row, "gold", gold);
    if (auto it = pred_by_id.find(pair.id); it != pred_by_id.end()) pair.prediction = it->second;
    if (auto cats = row.find("categories"); cats != row.end() && !cats->is_null()) {
      if (!cats->is_array() || cats->empty()) {
        throw ValidationError("categories of '" + pair.id + "' must be a non-empty list");
      }
      for (const auto& c : *cats) {
        auto parsed = c.is_string() ? parse_category(c.get<std::string>()) : std::nullopt;
        if (!parsed) throw ValidationError("unknown category " + c.dump() + " on '" + pair.id + "'");
        bool seen = false;
        for (Category existing : pair.categories) seen = seen || existing == *parsed;
        if (!seen) pair.categories.push_back(*parsed);
      }
    }
    pairs.push_back(std::move(pair));
  }
  for (const auto& [id, _] : pred_by_id) {
    if (!gold_ids.count(id)) throw ValidationError("prediction id '" + id + "' has no gold record");
  }
  return pairs;
}

}  // namespace chartsynth::metrics
