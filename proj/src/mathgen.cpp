#include "mathgen.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "decimal.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace chartsynth::mathgen {

namespace {

using namespace std::string_view_literals;

constexpr std::array kModuleNames = {
    "add_or_sub"sv,  "add_sub_multiple"sv,     "div"sv,         "mixed"sv,
    "mul"sv,         "mul_div_multiple"sv,     "closest"sv,     "closest_composed"sv,
    "kth_biggest"sv, "kth_biggest_composed"sv, "pair"sv,        "pair_composed"sv,
    "sort"sv,        "sort_composed"sv,
};

constexpr std::array kVariableNames = {"v"sv, "w"sv, "x"sv, "y"sv, "z"sv, "t"sv, "u"sv, "q"sv,
                                       "r"sv, "s"sv, "k"sv, "m"sv, "n"sv, "p"sv, "c"sv, "d"sv,
                                       "f"sv, "g"sv, "h"sv, "j"sv};

constexpr std::array kOrdinals = {""sv, "second "sv, "third "sv, "fourth "sv, "fifth "sv, "sixth "sv};

constexpr int kMaxAttempts = 10000;

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

std::string join(const std::vector<Operand>& operands) {
  std::string out;
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (i > 0) out += ", ";
    out += operands[i].text;
  }
  return out;
}

std::string with_definition(const std::optional<Definition>& definition, std::string question) {
  if (!definition) return question;
  return definition->sentence() + " " + question;
}

void require_distinct(const std::vector<Operand>& operands) {
  for (std::size_t i = 0; i < operands.size(); ++i) {
    for (std::size_t j = i + 1; j < operands.size(); ++j) {
      if (operands[i].value == operands[j].value) throw std::invalid_argument("tied operands");
    }
  }
}

Module composed_or_plain(Module plain, Module composed, const std::optional<Definition>& definition) {
  return definition ? composed : plain;
}

int binary_precedence(char op) { return (op == '+' || op == '-') ? 1 : 2; }

}  // namespace

std::string_view to_string(Module module) { return kModuleNames[static_cast<std::size_t>(module)]; }

Module parse_module(std::string_view id) {
  for (std::size_t i = 0; i < kModuleNames.size(); ++i) {
    if (kModuleNames[i] == id) return static_cast<Module>(i);
  }
  throw ConfigError("unknown math module '" + std::string(id) + "'");
}

std::vector<Module> all_modules() {
  std::vector<Module> out;
  for (int i = 0; i < kModuleCount; ++i) out.push_back(static_cast<Module>(i));
  return out;
}

bool is_composed(Module module) {
  return module == Module::closest_composed || module == Module::kth_biggest_composed ||
         module == Module::pair_composed || module == Module::sort_composed;
}

void MathGenParams::validate() const {
  if (max_operands < 2 || max_operands > 4) throw ConfigError("max_operands must be in [2, 4]");
  if (max_abs < 10 || max_abs > 1000000) throw ConfigError("max_abs must be in [10, 1000000]");
  if (max_decimals < 0 || max_decimals > 2) throw ConfigError("max_decimals must be 0, 1 or 2");
}

Operand number(const Rational& value) { return {value.to_string(), value}; }

Operand number(std::string_view text) {
  auto d = Decimal::parse(text);
  if (!d) throw std::invalid_argument("not a plain decimal: " + std::string(text));
  return {d->to_string(d->min_scale()), d->to_rational()};
}

Rational Definition::value() const {
  switch (op) {
    case '+': return lhs.value + rhs.value;
    case '-': return lhs.value - rhs.value;
    case '*': return lhs.value * rhs.value;
  }
  throw std::invalid_argument("definition operator must be +, - or *");
}

std::string Definition::sentence() const {
  return "Let " + name + " = " + lhs.text + " " + op + " " + rhs.text + ".";
}

struct Expr::Node {
  char op = 0;  // 0 for a leaf
  Operand operand;
  Expr lhs;
  Expr rhs;
};

Expr Expr::leaf(Operand operand) {
  auto node = std::make_shared<Node>();
  node->operand = std::move(operand);
  Expr e;
  e.node_ = std::move(node);
  return e;
}

Expr Expr::binary(char op, Expr lhs, Expr rhs) {
  if (op != '+' && op != '-' && op != '*' && op != '/') throw std::invalid_argument("unknown operator");
  auto node = std::make_shared<Node>();
  node->op = op;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  Expr e;
  e.node_ = std::move(node);
  return e;
}

Rational Expr::evaluate() const {
  const Node& n = *node_;
  if (n.op == 0) return n.operand.value;
  Rational a = n.lhs.evaluate();
  Rational b = n.rhs.evaluate();
  switch (n.op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    default: return a / b;
  }
}

std::string Expr::text() const {
  const Node& n = *node_;
  if (n.op == 0) return n.operand.text;
  const int prec = binary_precedence(n.op);
  auto side = [&](const Expr& child, bool right) {
    const Node& c = *child.node_;
    std::string t = child.text();
    if (c.op == 0) return t;
    const int child_prec = binary_precedence(c.op);
    // Same-precedence right operands only need grouping under - and /.
    bool parens = child_prec < prec || (right && child_prec == prec && (n.op == '-' || n.op == '/'));
    return parens ? "(" + t + ")" : t;
  };
  return side(n.lhs, false) + " " + n.op + " " + side(n.rhs, true);
}

std::size_t Expr::leaf_count() const {
  const Node& n = *node_;
  return n.op == 0 ? 1 : n.lhs.leaf_count() + n.rhs.leaf_count();
}

namespace {

const std::vector<std::string_view>& arithmetic_templates(Module module, char op) {
  static const std::vector<std::string_view> add = {
      "What is {a} + {b}?", "Calculate {a} + {b}.", "Add {a} and {b}.", "Sum {a} and {b}.",
      "What is {a} plus {b}?"};
  static const std::vector<std::string_view> sub = {
      "What is {a} - {b}?", "Calculate {a} - {b}.", "Subtract {b} from {a}.",
      "What is {a} take away {b}?", "What is {a} minus {b}?"};
  static const std::vector<std::string_view> mul = {
      "What is {a} * {b}?", "Calculate {a} * {b}.", "Multiply {a} and {b}.",
      "What is the product of {a} and {b}?", "What is {a} times {b}?"};
  static const std::vector<std::string_view> div = {
      "What is {a} / {b}?", "Calculate {a} / {b}.", "Divide {a} by {b}.", "What is {a} divided by {b}?"};
  static const std::vector<std::string_view> multiple = {
      "What is {e}?", "Evaluate {e}.", "Calculate {e}.", "What is the value of {e}?"};
  switch (module) {
    case Module::add_or_sub: return op == '-' ? sub : add;
    case Module::mul: return mul;
    case Module::div: return div;
    default: return multiple;
  }
}

const std::vector<std::string_view>& comparison_templates(Module module) {
  static const std::vector<std::string_view> closest = {
      "What is the closest to {t} in {list}?", "Which is the nearest to {t} in {list}?",
      "Find the number closest to {t} among {list}.", "What is the nearest to {t} among {list}?"};
  static const std::vector<std::string_view> kth = {
      "What is the {k}biggest value in {list}?", "Which is the {k}largest value among {list}?",
      "What is the {k}smallest value in {list}?", "Which is the {k}smallest value among {list}?"};
  static const std::vector<std::string_view> pair = {
      "Which is bigger: {a} or {b}?", "Which is greater: {a} or {b}?", "Which is smaller: {a} or {b}?",
      "What is the smaller of {a} and {b}?", "What is the larger of {a} and {b}?"};
  static const std::vector<std::string_view> sort = {
      "Sort {list} in ascending order.", "Sort {list} in descending order.", "Put {list} in increasing order.",
      "Put {list} in decreasing order.", "Sort {list}."};
  switch (module) {
    case Module::closest:
    case Module::closest_composed: return closest;
    case Module::kth_biggest:
    case Module::kth_biggest_composed: return kth;
    case Module::pair:
    case Module::pair_composed: return pair;
    default: return sort;
  }
}

std::string_view pick_template(const std::vector<std::string_view>& templates, int template_id) {
  if (template_id < 0 || static_cast<std::size_t>(template_id) >= templates.size()) {
    throw std::invalid_argument("template id out of range");
  }
  return templates[static_cast<std::size_t>(template_id)];
}

MathItem make_item(Module module, std::string question, const Rational& answer) {
  MathItem item;
  item.module = module;
  item.question = std::move(question);
  item.answer = answer.to_string();
  return item;
}

}  // namespace

int template_count(Module module) {
  switch (module) {
    case Module::add_or_sub:
    case Module::mul:
    case Module::div:
    case Module::add_sub_multiple:
    case Module::mixed:
    case Module::mul_div_multiple: return static_cast<int>(arithmetic_templates(module, '+').size());
    default: return static_cast<int>(comparison_templates(module).size());
  }
}

MathItem build_arithmetic(Module module, const Expr& expr, int template_id) {
  const Rational answer = expr.evaluate();
  const std::string text = expr.text();
  std::string question;
  if (module == Module::add_or_sub || module == Module::mul || module == Module::div) {
    // Two-operand wording: split the expression back into its operands.
    if (expr.leaf_count() != 2) throw std::invalid_argument("binary module needs exactly two operands");
    const char* ops = "+-*/";
    std::size_t at = std::string::npos;
    char op = 0;
    for (std::size_t i = 1; i + 2 < text.size(); ++i) {
      if (text[i] == ' ' && std::strchr(ops, text[i + 1]) && text[i + 2] == ' ') {
        at = i;
        op = text[i + 1];
        break;
      }
    }
    if (at == std::string::npos) throw std::invalid_argument("malformed binary expression");
    if ((module == Module::add_or_sub && op != '+' && op != '-') || (module == Module::mul && op != '*') ||
        (module == Module::div && op != '/')) {
      throw std::invalid_argument("operator does not match module");
    }
    question = std::string(pick_template(arithmetic_templates(module, op), template_id));
    question = replace_all(question, "{a}", text.substr(0, at));
    question = replace_all(question, "{b}", text.substr(at + 3));
  } else {
    question = replace_all(std::string(pick_template(arithmetic_templates(module, '+'), template_id)), "{e}", text);
  }
  return make_item(module, std::move(question), answer);
}

MathItem build_closest(const Operand& target, const std::vector<Operand>& candidates, int template_id,
                       const std::optional<Definition>& definition) {
  if (candidates.size() < 2) throw std::invalid_argument("closest needs at least two candidates");
  require_distinct(candidates);
  std::size_t best = 0;
  bool tied = false;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    auto d = (candidates[i].value - target.value).abs();
    auto b = (candidates[best].value - target.value).abs();
    if (d < b) {
      best = i;
      tied = false;
    } else if (d == b) {
      tied = true;
    }
  }
  if (tied) throw std::invalid_argument("two candidates are equally close");
  Module module = composed_or_plain(Module::closest, Module::closest_composed, definition);
  std::string q = std::string(pick_template(comparison_templates(module), template_id));
  q = replace_all(replace_all(q, "{t}", target.text), "{list}", join(candidates));
  return make_item(module, with_definition(definition, std::move(q)), candidates[best].value);
}

MathItem build_kth_biggest(const std::vector<Operand>& operands, int k, int template_id,
                           const std::optional<Definition>& definition) {
  if (operands.size() < 2) throw std::invalid_argument("kth_biggest needs at least two operands");
  if (k < 1 || static_cast<std::size_t>(k) > operands.size() || static_cast<std::size_t>(k) > kOrdinals.size()) {
    throw std::invalid_argument("k out of range");
  }
  require_distinct(operands);
  const bool biggest = template_id < 2;
  std::vector<Rational> values;
  for (const auto& o : operands) values.push_back(o.value);
  std::sort(values.begin(), values.end());
  if (biggest) std::reverse(values.begin(), values.end());
  Module module = composed_or_plain(Module::kth_biggest, Module::kth_biggest_composed, definition);
  std::string q = std::string(pick_template(comparison_templates(module), template_id));
  q = replace_all(replace_all(q, "{k}", kOrdinals[static_cast<std::size_t>(k - 1)]), "{list}", join(operands));
  return make_item(module, with_definition(definition, std::move(q)), values[static_cast<std::size_t>(k - 1)]);
}

MathItem build_pair(const Operand& a, const Operand& b, int template_id, const std::optional<Definition>& definition) {
  if (a.value == b.value) throw std::invalid_argument("pair operands are equal");
  Module module = composed_or_plain(Module::pair, Module::pair_composed, definition);
  std::string q = std::string(pick_template(comparison_templates(module), template_id));
  const bool want_max = template_id == 0 || template_id == 1 || template_id == 4;
  const Rational& answer = want_max ? std::max(a.value, b.value) : std::min(a.value, b.value);
  q = replace_all(replace_all(q, "{a}", a.text), "{b}", b.text);
  return make_item(module, with_definition(definition, std::move(q)), answer);
}

MathItem build_sort(const std::vector<Operand>& operands, int template_id, const std::optional<Definition>& definition) {
  if (operands.size() < 2) throw std::invalid_argument("sort needs at least two operands");
  require_distinct(operands);
  Module module = composed_or_plain(Module::sort, Module::sort_composed, definition);
  std::string q = std::string(pick_template(comparison_templates(module), template_id));
  q = replace_all(q, "{list}", join(operands));
  std::vector<Rational> values;
  for (const auto& o : operands) values.push_back(o.value);
  std::sort(values.begin(), values.end());
  const bool descending = template_id == 1 || template_id == 3;
  if (descending) std::reverse(values.begin(), values.end());
  MathItem item;
  item.module = module;
  item.question = with_definition(definition, std::move(q));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) item.answer += ", ";
    item.answer += values[i].to_string();
  }
  return item;
}

namespace {

class Sampler {
 public:
  Sampler(const MathGenParams& params, Rng& rng) : params_(params), rng_(rng) {}

  Operand integer(int bound) {
    bound = std::min(bound, params_.max_abs);
    return number(Rational(rng_.uniform_int(-bound, bound)));
  }

  Operand nonzero_integer(int bound) {
    while (true) {
      Operand o = integer(bound);
      if (!o.value.is_zero()) return o;
    }
  }

  // Integers most of the time; otherwise a decimal below 100 in magnitude.
  Operand mixed_number() {
    if (params_.max_decimals > 0 && rng_.below(3) == 0) {
      int places = static_cast<int>(rng_.uniform_int(1, params_.max_decimals));
      std::int64_t bound = std::min<std::int64_t>(params_.max_abs, 100) * pow10_i64(places);
      Decimal d(rng_.uniform_int(-bound, bound), places);
      return number(d.to_string(d.min_scale()));
    }
    return integer(params_.max_abs);
  }

  int operand_count(int at_least, int at_most) {
    at_most = std::max(at_least, at_most);
    return static_cast<int>(rng_.uniform_int(at_least, at_most));
  }

  int list_length() { return operand_count(3, std::max(3, params_.max_operands)); }

  int multi_count() {
    int hi = params_.max_operands;
    return operand_count(std::min(3, hi), hi);
  }

  Expr tree(int leaves, const std::vector<char>& ops, int bound, bool nonzero_leaves) {
    if (leaves == 1) return Expr::leaf(nonzero_leaves ? nonzero_integer(bound) : integer(bound));
    int left = static_cast<int>(rng_.uniform_int(1, leaves - 1));
    char op = rng_.pick(ops);
    Expr lhs = tree(left, ops, bound, nonzero_leaves);
    Expr rhs = tree(leaves - left, ops, bound, nonzero_leaves);
    return Expr::binary(op, std::move(lhs), std::move(rhs));
  }

  Definition definition() {
    Definition d;
    d.name = std::string(rng_.pick(std::span<const std::string_view>(kVariableNames)));
    d.lhs = integer(20);
    d.rhs = integer(20);
    static const std::vector<char> ops{'+', '-', '*'};
    d.op = rng_.pick(ops);
    return d;
  }

  int template_for(Module module) { return static_cast<int>(rng_.below(static_cast<std::uint64_t>(template_count(module)))); }

  Rng& rng() { return rng_; }

 private:
  const MathGenParams& params_;
  Rng& rng_;
};

MathItem sample_once(Module module, Sampler& s) {
  const int tpl = s.template_for(module);
  std::optional<Definition> def;
  if (is_composed(module)) def = s.definition();

  // Places the defined variable at a random slot of `operands`.
  auto substitute = [&](std::vector<Operand>& operands) {
    auto slot = static_cast<std::size_t>(s.rng().below(operands.size()));
    operands[slot] = def->as_operand();
  };

  switch (module) {
    case Module::add_or_sub: {
      static const std::vector<char> ops{'+', '-'};
      char op = s.rng().pick(ops);
      return build_arithmetic(module, Expr::binary(op, Expr::leaf(s.mixed_number()), Expr::leaf(s.mixed_number())), tpl);
    }
    case Module::mul:
      return build_arithmetic(module, Expr::binary('*', Expr::leaf(s.mixed_number()), Expr::leaf(s.mixed_number())), tpl);
    case Module::div: {
      Operand divisor = s.nonzero_integer(100);
      Operand dividend = s.rng().below(2) == 0 ? number(s.integer(100).value * divisor.value) : s.integer(1000);
      return build_arithmetic(module, Expr::binary('/', Expr::leaf(dividend), Expr::leaf(divisor)), tpl);
    }
    case Module::add_sub_multiple:
      return build_arithmetic(module, s.tree(s.multi_count(), {'+', '-'}, 100, false), tpl);
    case Module::mixed:
      return build_arithmetic(module, s.tree(s.multi_count(), {'+', '-', '*', '/'}, 50, false), tpl);
    case Module::mul_div_multiple:
      return build_arithmetic(module, s.tree(s.multi_count(), {'*', '/'}, 20, true), tpl);
    case Module::closest:
    case Module::closest_composed: {
      std::vector<Operand> candidates;
      for (int i = s.list_length(); i > 0; --i) candidates.push_back(s.mixed_number());
      Operand target = s.mixed_number();
      if (def) {
        if (s.rng().below(2) == 0) {
          target = def->as_operand();
        } else {
          substitute(candidates);
        }
      }
      return build_closest(target, candidates, tpl, def);
    }
    case Module::kth_biggest:
    case Module::kth_biggest_composed: {
      std::vector<Operand> operands;
      for (int i = s.list_length(); i > 0; --i) operands.push_back(s.mixed_number());
      if (def) substitute(operands);
      int k = static_cast<int>(s.rng().uniform_int(1, static_cast<std::int64_t>(operands.size())));
      return build_kth_biggest(operands, k, tpl, def);
    }
    case Module::pair:
    case Module::pair_composed: {
      std::vector<Operand> operands{s.mixed_number(), s.mixed_number()};
      if (def) substitute(operands);
      return build_pair(operands[0], operands[1], tpl, def);
    }
    case Module::sort:
    case Module::sort_composed: {
      std::vector<Operand> operands;
      for (int i = s.list_length(); i > 0; --i) operands.push_back(s.mixed_number());
      if (def) substitute(operands);
      return build_sort(operands, tpl, def);
    }
  }
  throw std::logic_error("unhandled module");
}

}  // namespace

MathItem generate_math(Module module, const MathGenParams& params, std::uint64_t index) {
  params.validate();
  const std::uint64_t seed = derive_seed(params.seed, to_string(module));
  Rng rng(mix_seed(seed, index));
  Sampler sampler(params, rng);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    try {
      MathItem item = sample_once(module, sampler);
      item.seed = params.seed;
      item.index = index;
      return item;
    } catch (const std::invalid_argument&) {
      // Tie or degenerate draw: resample from the same stream.
    } catch (const std::domain_error&) {
      // Division by zero inside a random expression.
    }
  }
  throw std::runtime_error("math generation kept producing ties for " + std::string(to_string(module)));
}

std::string to_jsonl(const MathItem& item) {
  nlohmann::ordered_json j;
  j["module"] = std::string(to_string(item.module));
  j["question"] = item.question;
  j["answer"] = item.answer;
  return j.dump();
}

RasterImage render_math(const MathItem& item, const textraster::RenderParams& params) {
  if (item.question.empty()) throw ValidationError("math item has an empty question");
  params.validate();
  std::vector<int> sizes = textraster::Font::sizes(params.font_id);
  std::sort(sizes.rbegin(), sizes.rend());
  std::optional<LayoutError> last;
  for (int size : sizes) {
    if (size > params.font_size) continue;
    textraster::RenderParams attempt = params;
    attempt.font_size = size;
    try {
      return textraster::rasterize_text(item.question, attempt, textraster::Overflow::error).image;
    } catch (const LayoutError& e) {
      last = e;
    }
  }
  throw LayoutError("question does not fit at the smallest font size: " + std::string(last ? last->what() : ""));
}

}  // namespace chartsynth::mathgen
