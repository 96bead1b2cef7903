#include <doctest.h>

#include <algorithm>
#include <set>

#include "errors.hpp"
#include "math_oracle.hpp"
#include "mathgen.hpp"
#include "textraster.hpp"

using namespace chartsynth;
using namespace chartsynth::mathgen;

TEST_CASE("fixed arithmetic example") {
  auto item = build_arithmetic(Module::add_or_sub, Expr::binary('+', Expr::leaf(number("5")), Expr::leaf(number("7"))), 0);
  CHECK(item.question == "What is 5 + 7?");
  CHECK(item.answer == "12");
}

TEST_CASE("fixed comparison examples") {
  auto kth = build_kth_biggest({number("3"), number("9"), number("4")}, 2, 0);
  CHECK(kth.answer == "4");
  CHECK(kth.question == "What is the second biggest value in 3, 9, 4?");

  auto closest = build_closest(number("0"), {number("3"), number("-1"), number("7")}, 0);
  CHECK(closest.answer == "-1");
  CHECK(closest.question == "What is the closest to 0 in 3, -1, 7?");

  auto pair = build_pair(number("2.5"), number("-4"), 2);
  CHECK(pair.answer == "-4");

  auto sorted = build_sort({number("3"), number("-2"), number("0.5")}, 1);
  CHECK(sorted.answer == "3, 0.5, -2");
}

TEST_CASE("ties are rejected by the builders") {
  CHECK_THROWS_AS(build_closest(number("0"), {number("2"), number("-2")}, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_pair(number("1"), number("1.0"), 0), std::invalid_argument);
  CHECK_THROWS_AS(build_kth_biggest({number("1"), number("1"), number("2")}, 1, 0), std::invalid_argument);
}

TEST_CASE("division answers are exact") {
  auto item = build_arithmetic(Module::div, Expr::binary('/', Expr::leaf(number("-3")), Expr::leaf(number("7"))), 0);
  CHECK(item.answer == "-3/7");
  auto dec = build_arithmetic(Module::div, Expr::binary('/', Expr::leaf(number("1")), Expr::leaf(number("8"))), 2);
  CHECK(dec.question == "Divide 1 by 8.");
  CHECK(dec.answer == "0.125");
}

TEST_CASE("expression text uses minimal parentheses") {
  auto e = Expr::binary('-', Expr::leaf(number("5")),
                        Expr::binary('-', Expr::leaf(number("2")), Expr::leaf(number("-3"))));
  CHECK(e.text() == "5 - (2 - -3)");
  CHECK(e.evaluate() == Rational(0));
  auto f = Expr::binary('*', Expr::binary('+', Expr::leaf(number("1")), Expr::leaf(number("2"))), Expr::leaf(number("4")));
  CHECK(f.text() == "(1 + 2) * 4");
  auto g = Expr::binary('+', Expr::binary('*', Expr::leaf(number("1")), Expr::leaf(number("2"))), Expr::leaf(number("4")));
  CHECK(g.text() == "1 * 2 + 4");
}

TEST_CASE("composed questions carry one definition") {
  Definition d{"v", number("3"), '*', number("-2")};
  auto item = build_pair(d.as_operand(), number("5"), 0, d);
  CHECK(item.module == Module::pair_composed);
  CHECK(item.question == "Let v = 3 * -2. Which is bigger: v or 5?");
  CHECK(item.answer == "5");
}

TEST_CASE("every module agrees with the question-reparse oracle") {
  MathGenParams params;
  params.seed = 11;
  for (Module m : all_modules()) {
    CAPTURE(to_string(m));
    for (std::uint64_t i = 0; i < 500; ++i) {
      auto item = generate_math(m, params, i);
      auto verdict = oracle::check_math_item(to_string(m), item.question, item.answer);
      INFO(item.question << " => " << item.answer);
      REQUIRE_MESSAGE(verdict.ok, verdict.reason);
    }
  }
}

TEST_CASE("generation is deterministic and index-keyed") {
  MathGenParams params;
  params.seed = 5;
  CHECK(generate_math(Module::mixed, params, 3) == generate_math(Module::mixed, params, 3));
  CHECK(generate_math(Module::mixed, params, 3).question != generate_math(Module::mixed, params, 4).question);
}

TEST_CASE("structural properties of comparison answers") {
  MathGenParams params;
  params.seed = 2;
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto item = generate_math(Module::sort, params, i);
    std::size_t commas_q = static_cast<std::size_t>(std::count(item.question.begin(), item.question.end(), ','));
    std::size_t commas_a = static_cast<std::size_t>(std::count(item.answer.begin(), item.answer.end(), ','));
    CHECK(commas_q == commas_a);

    auto composed = generate_math(Module::kth_biggest_composed, params, i);
    CHECK(composed.question.rfind("Let ", 0) == 0);
    std::size_t lets = 0;
    for (std::size_t p = composed.question.find("Let "); p != std::string::npos; p = composed.question.find("Let ", p + 1)) ++lets;
    CHECK(lets == 1);
  }
}

TEST_CASE("unknown module is a configuration error") {
  CHECK_THROWS_AS(parse_module("calculus"), ConfigError);
  CHECK(parse_module("sort_composed") == Module::sort_composed);
  CHECK(all_modules().size() == 14);
}

TEST_CASE("rendering") {
  MathGenParams params;
  auto item = generate_math(Module::add_or_sub, params, 0);
  textraster::RenderParams rp;
  CHECK(render_math(item, rp) == render_math(item, rp));

  MathItem long_item = item;
  long_item.question = std::string("What is the closest to 12 in ") +
                       "101, 202, 303, 404, 505, 606, 707, 808, 909, 111, 222, 333, 444, 555, 666, 777, 888?";
  REQUIRE(long_item.question.size() >= 100);
  const auto& font = textraster::Font::get(rp.font_id, rp.font_size);
  auto image = render_math(long_item, rp);
  CHECK(image.width() == rp.canvas_width);
  CHECK(image.height() >= 2 * rp.margin + 2 * font.line_height());

  MathItem empty = item;
  empty.question.clear();
  CHECK_THROWS_AS(render_math(empty, rp), ValidationError);
}

TEST_CASE("jsonl export") {
  auto item = build_arithmetic(Module::add_or_sub, Expr::binary('+', Expr::leaf(number("5")), Expr::leaf(number("7"))), 0);
  CHECK(to_jsonl(item) == R"({"module":"add_or_sub","question":"What is 5 + 7?","answer":"12"})");
}
