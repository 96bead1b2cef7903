#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "metrics.hpp"

using namespace chartsynth;
using namespace chartsynth::metrics;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

json read_json(const std::string& name) {
  std::ifstream in(fixture(name));
  return json::parse(in);
}

std::vector<std::string> strings(const json& arr) { return arr.get<std::vector<std::string>>(); }

}  // namespace

TEST_CASE("hand built relaxed cases") {
  std::ifstream in(fixture("relaxed_cases.tsv"));
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    REQUIRE(t2 != std::string::npos);
    std::string pred = line.substr(0, t1);
    std::string gold = line.substr(t1 + 1, t2 - t1 - 1);
    bool expected = line.substr(t2 + 1) == "true";
    CHECK_MESSAGE(relaxed_match(pred, gold) == expected, "pred='", pred, "' gold='", gold, "'");
    ++cases;
  }
  CHECK(cases == 50);
}

TEST_CASE("number normalization") {
  CHECK(parse_number("1,234") == Rational(1234));
  CHECK(parse_number(" $20 ") == Rational(20));
  CHECK(parse_number("-$3.5") == Rational(-7, 2));
  CHECK(parse_number("45%") == Rational(45));
  CHECK_FALSE(parse_number("12,34").has_value());
  CHECK_FALSE(parse_number("1,2345").has_value());
  CHECK_FALSE(parse_number("seven").has_value());
  CHECK_FALSE(parse_number("").has_value());
}

TEST_CASE("bleu matches the frozen reference implementation") {
  auto doc = read_json("bleu_fixture.json");
  double score = bleu4(strings(doc["predictions"]), strings(doc["references"]));
  CHECK(score == doctest::Approx(doc["reference_score"].get<double>()).epsilon(1e-6));
}

TEST_CASE("bleu identity and disjoint") {
  std::vector<std::string> refs{"the tallest bar is red", "sales rose in every year shown"};
  CHECK(bleu4(refs, refs) == doctest::Approx(1.0));
  CHECK(bleu4({"alpha beta gamma delta", "epsilon zeta eta theta"}, refs) == 0.0);
  CHECK_THROWS_AS(bleu4({}, {}), ValidationError);
  CHECK_THROWS_AS(bleu4({"a"}, {"a", "b"}), ValidationError);
}

TEST_CASE("bleu is invariant under pair permutation") {
  auto doc = read_json("bleu_fixture.json");
  auto preds = strings(doc["predictions"]);
  auto refs = strings(doc["references"]);
  double base = bleu4(preds, refs);
  std::mt19937 gen(4);
  std::vector<std::size_t> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<std::string> p, r;
    for (auto i : order) {
      p.push_back(preds[i]);
      r.push_back(refs[i]);
    }
    CHECK(bleu4(p, r) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("relaxed match is scale invariant and reflexive") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> mant(-100000, 100000);
  std::uniform_int_distribution<int> pct(0, 10);
  const char* scales[] = {"1", "10", "1000", "0.01"};
  for (int i = 0; i < 500; ++i) {
    int g = mant(gen);
    if (g == 0) continue;
    int off = pct(gen) - 5;
    Rational gold(g);
    Rational pred = gold + gold * Rational(off, 100);
    for (const char* s : scales) {
      Rational k = Rational::parse(s).value();
      Rational gs = gold * k, ps = pred * k;
      CHECK(relaxed_match(ps.to_string(), gs.to_string()) == relaxed_match(pred.to_string(), gold.to_string()));
    }
    CHECK(relaxed_match(gold.to_string(), gold.to_string()));
    CHECK(relaxed_match(pred.to_string(), gold.to_string()));
  }
  CHECK(relaxed_match("Blue Bar", "blue bar"));
}

TEST_CASE("chartqa style fixture buckets") {
  auto pairs = load_eval_pairs(fixture("chartqa_pred.jsonl"), fixture("chartqa_gold.jsonl"));
  REQUIRE(pairs.size() == 20);
  auto report = score_file(pairs, Metric::relaxed);
  auto expected = read_json("chartqa_expected.json");
  CHECK(report.n == 20);
  CHECK(report.overall == doctest::Approx(expected["overall"].get<double>()));
  std::size_t total = 0;
  for (const auto& b : report.buckets) {
    const auto& e = expected["categories"][to_string(b.category)];
    CHECK(b.n == e["n"].get<std::size_t>());
    CHECK(b.score == doctest::Approx(e["correct"].get<double>() / e["n"].get<double>()));
    total += b.n;
  }
  CHECK(total >= 20);

  auto doc = json::parse(report.to_json(true));
  CHECK(doc["metric"] == "relaxed");
  CHECK(doc["categories"].size() == 3);
  CHECK_FALSE(json::parse(report.to_json(false)).contains("categories"));
}

TEST_CASE("duplicate ids and dangling predictions are rejected") {
  std::vector<EvalPair> dup{{"a", "1", "1", {}}, {"a", "2", "2", {}}};
  CHECK_THROWS_AS(score_file(dup, Metric::relaxed), ValidationError);
  CHECK_THROWS_AS(score_file({}, Metric::relaxed), ValidationError);

  auto dir = std::filesystem::temp_directory_path() / "chartsynth_metrics";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "gold.jsonl") << "{\"id\":\"a\",\"gold\":\"1\"}\n{\"id\":\"b\",\"gold\":\"x\"}\n";
    std::ofstream(dir / "pred.jsonl") << "{\"id\":\"a\",\"prediction\":\"1\"}\n";
    std::ofstream(dir / "extra.jsonl") << "{\"id\":\"z\",\"prediction\":\"1\"}\n";
    std::ofstream(dir / "dup.jsonl") << "{\"id\":\"a\",\"prediction\":\"1\"}\n{\"id\":\"a\",\"prediction\":\"2\"}\n";
  }
  auto pairs = load_eval_pairs(dir / "pred.jsonl", dir / "gold.jsonl");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[1].prediction.empty());
  CHECK(score_file(pairs, Metric::relaxed).overall == doctest::Approx(0.5));
  CHECK_THROWS_AS(load_eval_pairs(dir / "extra.jsonl", dir / "gold.jsonl"), ValidationError);
  CHECK_THROWS_AS(load_eval_pairs(dir / "dup.jsonl", dir / "gold.jsonl"), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("metric names") {
  CHECK(parse_metric("relaxed") == Metric::relaxed);
  CHECK(parse_metric("bleu4") == Metric::bleu4);
  CHECK_THROWS_AS(parse_metric("rouge"), ConfigError);
  CHECK(parse_category("math_reasoning") == Category::math_reasoning);
  CHECK_FALSE(parse_category("other").has_value());
}
