#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "image.hpp"
#include "rational.hpp"
#include "textraster.hpp"

namespace chartsynth::mathgen {

/// Arithmetic and comparison modules, named as in the Mathematics Dataset.
enum class Module {
  add_or_sub,
  add_sub_multiple,
  div,
  mixed,
  mul,
  mul_div_multiple,
  closest,
  closest_composed,
  kth_biggest,
  kth_biggest_composed,
  pair,
  pair_composed,
  sort,
  sort_composed,
};

inline constexpr int kModuleCount = 14;

std::string_view to_string(Module module);
/// Throws ConfigError for an unknown id.
Module parse_module(std::string_view id);
std::vector<Module> all_modules();
bool is_composed(Module module);

struct MathGenParams {
  std::uint64_t seed = 0;
  /// Upper bound on operands per question (2..4); list questions use up to
  /// max(3, max_operands) entries.
  int max_operands = 4;
  /// Bound on |operand| for integer operands.
  int max_abs = 1000;
  /// Decimal places allowed on non-integer operands (0 disables decimals).
  int max_decimals = 1;

  void validate() const;
};

struct MathItem {
  Module module = Module::add_or_sub;
  std::string question;
  std::string answer;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  friend bool operator==(const MathItem&, const MathItem&) = default;
};

/// Pure function of (module, params, index). Ties in comparison modules are
/// resampled, never emitted.
MathItem generate_math(Module module, const MathGenParams& params, std::uint64_t index);

/// JSONL line {"module": ..., "question": ..., "answer": ...}.
std::string to_jsonl(const MathItem& item);

/// Question text rasterized with word wrap. Falls back to smaller bundled
/// sizes when a word does not fit; throws LayoutError past the smallest size.
RasterImage render_math(const MathItem& item, const textraster::RenderParams& params);

// Building blocks of the sampler, for constructing fixed problems directly.

/// A number or a variable as it appears in question text, with its value.
struct Operand {
  std::string text;
  Rational value;
};

Operand number(const Rational& value);
/// `text` must be a plain decimal ("-0.5", "12").
Operand number(std::string_view text);

/// The "Let v = a op b." sentence of a composed question.
struct Definition {
  std::string name;
  Operand lhs;
  char op = '+';  // '+', '-' or '*'
  Operand rhs;

  Rational value() const;
  std::string sentence() const;
  Operand as_operand() const { return {name, value()}; }
};

/// Arithmetic expression tree with exact evaluation.
class Expr {
 public:
  static Expr leaf(Operand operand);
  static Expr binary(char op, Expr lhs, Expr rhs);

  /// Throws std::domain_error on division by zero.
  Rational evaluate() const;
  /// Minimal parentheses; unary minus stays attached to literals ("3 - -5").
  std::string text() const;
  std::size_t leaf_count() const;

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
};

MathItem build_arithmetic(Module module, const Expr& expr, int template_id);
MathItem build_closest(const Operand& target, const std::vector<Operand>& candidates, int template_id,
                       const std::optional<Definition>& definition = std::nullopt);
/// Templates 0-1 ask for the k-th biggest, 2-3 for the k-th smallest.
MathItem build_kth_biggest(const std::vector<Operand>& operands, int k, int template_id,
                           const std::optional<Definition>& definition = std::nullopt);
MathItem build_pair(const Operand& a, const Operand& b, int template_id,
                    const std::optional<Definition>& definition = std::nullopt);
MathItem build_sort(const std::vector<Operand>& operands, int template_id,
                    const std::optional<Definition>& definition = std::nullopt);

int template_count(Module module);

}  // namespace chartsynth::mathgen
