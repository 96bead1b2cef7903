#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

#include "errors.hpp"
#include "linearizer.hpp"
#include "mixture.hpp"
#include "pipeline.hpp"

using namespace chartsynth;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("chartsynth_pipeline_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

ordered_json every_kind(const fs::path& dir) {
  fs::create_directories(dir / "tables");
  std::ofstream(dir / "tables" / "a.csv") << "Fruit,count\napple,3\npear,5\n";
  std::ofstream(dir / "tables" / "b.tsv") << "Mix\tx\ty\nr1\t-1\t2\nr2\t3\t4\n";
  std::ofstream(dir / "tables" / "broken.csv") << "h,a,b\nr1,1\n";
  return ordered_json::parse(R"({
    "schema_version": 1,
    "seed": 77,
    "output_dir": "corpus",
    "shard_size": 7,
    "stream_length": 40,
    "threads": 2,
    "mixture": {"components": {
      "math": {"math_dataset": "1/5", "drop": "1/5"},
      "charts": {"synthetic": "1/10", "code": "1/10", "imported": "1/10", "notebook_code": "1/10"},
      "external": {"external:screenshot": "1/5"}
    }},
    "sources": {
      "math_dataset": {"kind": "math", "count": 12, "modules": ["add_or_sub", "sort"]},
      "drop": {"kind": "drop", "path": ")" + (fs::path(FIXTURE_DIR) / "drop_fixture.json").string() + R"("},
      "synthetic": {"kind": "chart_table", "count": 6, "style": {"chart_types": ["bar"]}},
      "code": {"kind": "chart_code", "count": 6},
      "imported": {"kind": "table_import", "path": "tables"},
      "notebook_code": {"kind": "notebooks", "path": ")" + (fs::path(FIXTURE_DIR) / "notebooks").string() + R"("}
    }
  })");
}

void write(const fs::path& p, const ordered_json& doc) { std::ofstream(p) << doc.dump(2); }

}  // namespace

TEST_CASE("every source kind in one build") {
  auto dir = scratch("all");
  auto doc = every_kind(dir);
  write(dir / "config.json", doc);
  auto config = pipeline::load_build_config(dir / "config.json", {});
  CHECK(config.output_dir == dir / "corpus");
  auto summary = pipeline::build_corpus(config);
  CHECK(summary.stream_length == 40);
  CHECK(summary.shards.shards.size() == 6);

  std::map<std::string, pipeline::SourceSummary> by_id;
  for (const auto& s : summary.sources) by_id[s.source_id] = s;
  CHECK(by_id["math_dataset"].generated == 12);
  CHECK(by_id["drop"].generated == 5);
  CHECK(by_id["drop"].skipped_input == 2);
  CHECK(by_id["imported"].generated == 2);
  CHECK(by_id["imported"].skipped_input == 1);
  CHECK(by_id["notebook_code"].generated == 8);

  auto records = mixture::read_shards(dir / "corpus");
  REQUIRE(records.size() == 40);
  std::size_t placeholders = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    CHECK(r.metadata["position"] == i);
    if (r.task == "external:screenshot") {
      ++placeholders;
      CHECK(r.image_ref.empty());
      CHECK(r.metadata["placeholder"] == true);
    } else {
      CHECK(fs::exists(dir / "corpus" / r.image_ref));
      CHECK_FALSE(r.target.empty());
    }
    if (r.task == "imported") CHECK_NOTHROW(linearizer::delinearize(r.target));
  }
  CHECK(placeholders > 0);
  CHECK(mixture::verify_checksums(dir / "corpus").empty());

  auto stats = pipeline::corpus_stats(dir / "corpus");
  CHECK(stats["records"] == 40);
  CHECK(stats["placeholders"] == placeholders);
  CHECK(stats["checksums"] == "ok");
}

TEST_CASE("a manifest source reuses an ingested corpus") {
  auto dir = scratch("manifest");
  auto ingest = pipeline::ingest(pipeline::IngestKind::drop, fs::path(FIXTURE_DIR) / "drop_fixture.json", dir / "drop",
                                 100, 1);
  CHECK(ingest.records == 5);
  ordered_json doc = ordered_json::parse(R"({
    "schema_version": 1, "seed": 1, "output_dir": "out",
    "mixture": {"components": {"qa": {"reading": "1"}}},
    "sources": {"reading": {"kind": "manifest", "path": "drop"}}
  })");
  write(dir / "config.json", doc);
  auto summary = pipeline::build_corpus(pipeline::load_build_config(dir / "config.json", {}));
  CHECK(summary.stream_length == 5);
  auto records = mixture::read_shards(dir / "out");
  std::set<std::string> answers;
  for (const auto& r : records) answers.insert(r.target);
  CHECK(answers == std::set<std::string>{"May 1999", "Alice, Bob", "3", "52", "7 2003"});
}

TEST_CASE("config errors") {
  auto dir = scratch("errors");
  auto base = every_kind(dir);
  auto expect = [&](ordered_json doc, const std::string& needle) {
    write(dir / "bad.json", doc);
    try {
      pipeline::load_build_config(dir / "bad.json", {});
      FAIL("accepted a config without ", needle);
    } catch (const Error& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  auto d = base;
  d.erase("schema_version");
  expect(d, "schema_version");
  d = base;
  d.erase("seed");
  expect(d, "seed");
  d = base;
  d["sources"]["extra"] = {{"kind", "math"}, {"count", 1}};
  expect(d, "extra");
  d = base;
  d["mixture"]["components"]["math"]["math_dataset"] = "1/10";
  expect(d, "deficit");
  d = base;
  d["bogus"] = 1;
  expect(d, "bogus");
  d = base;
  d["sources"]["synthetic"]["table"] = {{"rows", {4, 2}}};
  write(dir / "rows.json", d);
  auto config = pipeline::load_build_config(dir / "rows.json", {});
  CHECK_THROWS_AS(pipeline::build_corpus(config), ConfigError);
}

TEST_CASE("overrides") {
  ordered_json doc = {{"a", {{"b", 1}}}};
  pipeline::apply_override(doc, "a.b=5");
  pipeline::apply_override(doc, "a.c.d=text");
  pipeline::apply_override(doc, "e=[1,2]");
  CHECK(doc["a"]["b"] == 5);
  CHECK(doc["a"]["c"]["d"] == "text");
  CHECK(doc["e"].size() == 2);
  CHECK_THROWS_AS(pipeline::apply_override(doc, "novalue"), ConfigError);
  CHECK_THROWS_AS(pipeline::apply_override(doc, "a.b.x=1"), ConfigError);
}

TEST_CASE("parameter parsers reject unknown keys") {
  ordered_json t = {{"rows", {2, 3}}, {"colour", "red"}};
  CHECK_THROWS_WITH_AS(pipeline::table_params(&t, "table"), doctest::Contains("colour"), ConfigError);
  ordered_json s = {{"chart_types", {"radar"}}};
  CHECK_THROWS_AS(pipeline::style_pools(&s, "style"), ConfigError);
  CHECK(pipeline::table_params(nullptr, "table").rows.min == tablegen::TableGenParams{}.rows.min);
  auto spec = pipeline::chart_spec(nullptr, "spec");
  auto round = pipeline::chart_spec_json(spec);
  CHECK(pipeline::chart_spec(&round, "spec") == spec);
}
