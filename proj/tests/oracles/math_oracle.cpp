#include "math_oracle.hpp"

#include <map>
#include <optional>
#include <regex>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

namespace {

namespace mp = boost::multiprecision;
using Q = mp::number<mp::cpp_rational_backend, mp::et_off>;
using Z = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Vars = std::map<std::string, Q>;

struct Unparsed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string canonical(const Q& q) {
  Z num = boost::multiprecision::numerator(q);
  Z den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  Z rest = den;
  while (rest % 2 == 0) rest /= 2;
  while (rest % 5 == 0) rest /= 5;
  if (rest != 1) return num.str() + "/" + den.str();
  int places = 0;
  Z scale = 1;
  while (scale % den != 0) {
    scale *= 10;
    ++places;
  }
  bool negative = num < 0;
  Z digits = (negative ? -num : num) * (scale / den);
  std::string s = digits.str();
  while (static_cast<int>(s.size()) <= places) s.insert(s.begin(), '0');
  s.insert(s.end() - places, '.');
  return negative ? "-" + s : s;
}

Q literal(const std::string& text) {
  static const std::regex re(R"((-?)(\d+)(?:\.(\d+))?)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw Unparsed("not a number: '" + text + "'");
  Z whole(m[2].str());
  Q value(whole);
  if (m[3].matched) {
    std::string frac = m[3].str();
    Z den = boost::multiprecision::pow(Z(10), static_cast<unsigned>(frac.size()));
    value += Q(Z(frac), den);
  }
  return m[1].length() ? -value : value;
}

Q value_of(const std::string& token, const Vars& vars) {
  auto it = vars.find(token);
  if (it != vars.end()) return it->second;
  return literal(token);
}

// Recursive descent over + - * / and parentheses; a '-' glued to a digit is
// a sign.
class ExprParser {
 public:
  ExprParser(const std::string& text, const std::string& allowed_ops) : s_(text), allowed_(allowed_ops) {}

  Q parse() {
    Q v = expr();
    skip();
    if (pos_ != s_.size()) throw Unparsed("trailing text in expression '" + s_ + "'");
    if (ops_used_ == 0) throw Unparsed("expression without operators '" + s_ + "'");
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  bool take_op(char a, char b, char& out) {
    skip();
    if (pos_ < s_.size() && (s_[pos_] == a || s_[pos_] == b)) {
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] != ' ') return false;
      out = s_[pos_++];
      if (allowed_.find(out) == std::string::npos) throw Unparsed(std::string("operator not allowed: ") + out);
      ++ops_used_;
      return true;
    }
    return false;
  }

  Q expr() {
    Q v = term();
    char op;
    while (take_op('+', '-', op)) {
      Q rhs = term();
      v = op == '+' ? v + rhs : v - rhs;
    }
    return v;
  }

  Q term() {
    Q v = factor();
    char op;
    while (take_op('*', '/', op)) {
      Q rhs = factor();
      if (op == '*') {
        v *= rhs;
      } else {
        if (rhs == 0) throw Unparsed("division by zero in '" + s_ + "'");
        v /= rhs;
      }
    }
    return v;
  }

  Q factor() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      Q v = expr();
      skip();
      if (pos_ >= s_.size() || s_[pos_] != ')') throw Unparsed("unbalanced parentheses in '" + s_ + "'");
      ++pos_;
      return v;
    }
    std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ == start) throw Unparsed("expected a number in '" + s_ + "'");
    return literal(s_.substr(start, pos_ - start));
  }

  std::string s_;
  std::string allowed_;
  std::size_t pos_ = 0;
  int ops_used_ = 0;
};

std::vector<Q> list_values(const std::string& text, const Vars& vars) {
  std::vector<Q> out;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(", ", start);
    out.push_back(value_of(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start), vars));
    if (comma == std::string::npos) break;
    start = comma + 2;
  }
  if (out.size() < 2) throw Unparsed("list with fewer than two entries: '" + text + "'");
  return out;
}

bool all_distinct(const std::vector<Q>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) return false;
    }
  }
  return true;
}

int ordinal(const std::string& word) {
  static const std::map<std::string, int> words{{"", 1},      {"second", 2}, {"third", 3},
                                                {"fourth", 4}, {"fifth", 5},  {"sixth", 6}};
  auto it = words.find(word);
  if (it == words.end()) throw Unparsed("unknown ordinal '" + word + "'");
  return it->second;
}

struct Outcome {
  std::string answer;
  std::string tie;  // non-empty when the question is ambiguous
};

const char* kNum = R"((-?\d+(?:\.\d+)?))";

std::regex binary(const std::string& before, const std::string& middle, const std::string& after) {
  return std::regex("^" + before + kNum + middle + kNum + after + "$");
}

Outcome binary_module(const std::string& module, const std::string& q) {
  struct Form {
    std::regex re;
    char op;
    bool swapped;
  };
  static const std::map<std::string, std::vector<Form>> forms = [] {
    std::map<std::string, std::vector<Form>> f;
    f["add_or_sub"] = {
        {binary("What is ", R"( \+ )", R"(\?)"), '+', false}, {binary("Calculate ", R"( \+ )", R"(\.)"), '+', false},
        {binary("Add ", " and ", R"(\.)"), '+', false},        {binary("Sum ", " and ", R"(\.)"), '+', false},
        {binary("What is ", " plus ", R"(\?)"), '+', false},   {binary("What is ", " - ", R"(\?)"), '-', false},
        {binary("Calculate ", " - ", R"(\.)"), '-', false},    {binary("Subtract ", " from ", R"(\.)"), '-', true},
        {binary("What is ", " take away ", R"(\?)"), '-', false}, {binary("What is ", " minus ", R"(\?)"), '-', false}};
    f["mul"] = {{binary("What is ", R"( \* )", R"(\?)"), '*', false}, {binary("Calculate ", R"( \* )", R"(\.)"), '*', false},
                {binary("Multiply ", " and ", R"(\.)"), '*', false},
                {binary("What is the product of ", " and ", R"(\?)"), '*', false},
                {binary("What is ", " times ", R"(\?)"), '*', false}};
    f["div"] = {{binary("What is ", " / ", R"(\?)"), '/', false}, {binary("Calculate ", " / ", R"(\.)"), '/', false},
                {binary("Divide ", " by ", R"(\.)"), '/', false},
                {binary("What is ", " divided by ", R"(\?)"), '/', false}};
    return f;
  }();
  std::smatch m;
  for (const auto& form : forms.at(module)) {
    if (!std::regex_match(q, m, form.re)) continue;
    Q a = literal(m[1].str()), b = literal(m[2].str());
    if (form.swapped) std::swap(a, b);
    switch (form.op) {
      case '+': return {canonical(a + b), ""};
      case '-': return {canonical(a - b), ""};
      case '*': return {canonical(a * b), ""};
      default:
        if (b == 0) throw Unparsed("division by zero");
        return {canonical(a / b), ""};
    }
  }
  throw Unparsed("no " + module + " template matches");
}

Outcome multi_module(const std::string& module, const std::string& q) {
  static const std::vector<std::regex> forms{std::regex(R"(^What is the value of (.+)\?$)"),
                                             std::regex(R"(^What is (.+)\?$)"), std::regex(R"(^Evaluate (.+)\.$)"),
                                             std::regex(R"(^Calculate (.+)\.$)")};
  const std::string ops = module == "add_sub_multiple" ? "+-" : module == "mul_div_multiple" ? "*/" : "+-*/";
  std::smatch m;
  for (const auto& re : forms) {
    if (!std::regex_match(q, m, re)) continue;
    return {canonical(ExprParser(m[1].str(), ops).parse()), ""};
  }
  throw Unparsed("no expression template matches");
}

Outcome closest(const std::string& q, const Vars& vars) {
  static const std::vector<std::regex> forms{std::regex(R"(^What is the closest to (\S+) in (.+)\?$)"),
                                             std::regex(R"(^Which is the nearest to (\S+) in (.+)\?$)"),
                                             std::regex(R"(^Find the number closest to (\S+) among (.+)\.$)"),
                                             std::regex(R"(^What is the nearest to (\S+) among (.+)\?$)")};
  std::smatch m;
  for (const auto& re : forms) {
    if (!std::regex_match(q, m, re)) continue;
    Q target = value_of(m[1].str(), vars);
    auto values = list_values(m[2].str(), vars);
    std::optional<Q> best;
    Q best_distance;
    int at_best = 0;
    for (const auto& v : values) {
      Q d = abs(v - target);
      if (!best || d < best_distance) {
        best = v;
        best_distance = d;
        at_best = 1;
      } else if (d == best_distance) {
        ++at_best;
      }
    }
    return {canonical(*best), at_best > 1 ? "equally close candidates" : ""};
  }
  throw Unparsed("no closest template matches");
}

Outcome kth(const std::string& q, const Vars& vars) {
  struct Form {
    std::regex re;
    bool biggest;
  };
  static const std::vector<Form> forms{
      {std::regex(R"(^What is the (?:(\w+) )?biggest value in (.+)\?$)"), true},
      {std::regex(R"(^Which is the (?:(\w+) )?largest value among (.+)\?$)"), true},
      {std::regex(R"(^What is the (?:(\w+) )?smallest value in (.+)\?$)"), false},
      {std::regex(R"(^Which is the (?:(\w+) )?smallest value among (.+)\?$)"), false}};
  std::smatch m;
  for (const auto& form : forms) {
    if (!std::regex_match(q, m, form.re)) continue;
    const int k = ordinal(m[1].matched ? m[1].str() : "");
    auto values = list_values(m[2].str(), vars);
    if (k > static_cast<int>(values.size())) throw Unparsed("k exceeds list length");
    std::vector<Q> hits;
    for (const auto& v : values) {
      int beaten_by = 0;
      for (const auto& w : values) beaten_by += form.biggest ? (w > v) : (w < v);
      if (beaten_by == k - 1) hits.push_back(v);
    }
    if (hits.size() != 1 || !all_distinct(values)) return {hits.empty() ? "" : canonical(hits[0]), "repeated values"};
    return {canonical(hits[0]), ""};
  }
  throw Unparsed("no kth template matches");
}

Outcome pair(const std::string& q, const Vars& vars) {
  struct Form {
    std::regex re;
    bool larger;
  };
  static const std::vector<Form> forms{{std::regex(R"(^Which is bigger: (\S+) or (\S+)\?$)"), true},
                                       {std::regex(R"(^Which is greater: (\S+) or (\S+)\?$)"), true},
                                       {std::regex(R"(^Which is smaller: (\S+) or (\S+)\?$)"), false},
                                       {std::regex(R"(^What is the smaller of (\S+) and (\S+)\?$)"), false},
                                       {std::regex(R"(^What is the larger of (\S+) and (\S+)\?$)"), true}};
  std::smatch m;
  for (const auto& form : forms) {
    if (!std::regex_match(q, m, form.re)) continue;
    Q a = value_of(m[1].str(), vars), b = value_of(m[2].str(), vars);
    Q pick = form.larger ? (a > b ? a : b) : (a < b ? a : b);
    return {canonical(pick), a == b ? "equal operands" : ""};
  }
  throw Unparsed("no pair template matches");
}

Outcome sort(const std::string& q, const Vars& vars) {
  struct Form {
    std::regex re;
    bool descending;
  };
  static const std::vector<Form> forms{{std::regex(R"(^Sort (.+) in ascending order\.$)"), false},
                                       {std::regex(R"(^Sort (.+) in descending order\.$)"), true},
                                       {std::regex(R"(^Put (.+) in increasing order\.$)"), false},
                                       {std::regex(R"(^Put (.+) in decreasing order\.$)"), true},
                                       {std::regex(R"(^Sort (.+)\.$)"), false}};
  std::smatch m;
  for (const auto& form : forms) {
    if (!std::regex_match(q, m, form.re)) continue;
    std::vector<Q> values;
    try {
      values = list_values(m[1].str(), vars);
    } catch (const Unparsed&) {
      continue;
    }
    // Selection by repeated extremum search.
    std::string answer;
    std::vector<bool> used(values.size(), false);
    for (std::size_t round = 0; round < values.size(); ++round) {
      std::size_t pick = values.size();
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (used[i]) continue;
        if (pick == values.size() || (form.descending ? values[i] > values[pick] : values[i] < values[pick])) pick = i;
      }
      used[pick] = true;
      if (round > 0) answer += ", ";
      answer += canonical(values[pick]);
    }
    return {answer, all_distinct(values) ? "" : "repeated values"};
  }
  throw Unparsed("no sort template matches");
}

}  // namespace

MathVerdict check_math_item(std::string_view module_view, std::string_view question_view, std::string_view answer) {
  const std::string module(module_view);
  std::string q(question_view);
  MathVerdict verdict;
  try {
    Vars vars;
    const bool composed = module.size() > 9 && module.substr(module.size() - 9) == "_composed";
    if (composed) {
      static const std::regex let(R"(^Let ([a-z]) = (-?\d+) ([-+*]) (-?\d+)\. (.+)$)");
      std::smatch m;
      if (!std::regex_match(q, m, let)) throw Unparsed("composed question lacks a definition");
      Q a = literal(m[2].str()), b = literal(m[4].str());
      const char op = m[3].str()[0];
      vars[m[1].str()] = op == '+' ? a + b : op == '-' ? a - b : a * b;
      q = m[5].str();
    }
    const std::string base = composed ? module.substr(0, module.size() - 9) : module;
    Outcome out;
    if (base == "add_or_sub" || base == "mul" || base == "div") {
      out = binary_module(base, q);
    } else if (base == "add_sub_multiple" || base == "mixed" || base == "mul_div_multiple") {
      out = multi_module(base, q);
    } else if (base == "closest") {
      out = closest(q, vars);
    } else if (base == "kth_biggest") {
      out = kth(q, vars);
    } else if (base == "pair") {
      out = pair(q, vars);
    } else if (base == "sort") {
      out = sort(q, vars);
    } else {
      throw Unparsed("unknown module '" + module + "'");
    }
    if (composed) {
      const std::regex use("(^| )" + vars.begin()->first + "([,?.]| |$)");
      if (!std::regex_search(q, use)) throw Unparsed("definition is never used");
    }
    verdict.expected = out.answer;
    if (!out.tie.empty()) {
      verdict.reason = "ambiguous question (" + out.tie + ")";
    } else if (out.answer != answer) {
      verdict.reason = "answer '" + std::string(answer) + "' but oracle computed '" + out.answer + "'";
    } else {
      verdict.ok = true;
    }
  } catch (const Unparsed& e) {
    verdict.reason = e.what();
  }
  return verdict;
}

}  // namespace oracle
