// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chartrender.hpp"
#include "dropingest.hpp"
#include "linearizer.hpp"
#include "math_oracle.hpp"
#include "mathgen.hpp"
#include "metrics.hpp"
#include "mixture.hpp"
#include "nbingest.hpp"
#include "tablegen.hpp"
#include "textraster.hpp"

namespace fs = std::filesystem;
using namespace chartsynth;
using nlohmann::json;

namespace {

struct Paths {
  fs::path cli;
  fs::path fixtures;
  fs::path configs;
  fs::path work;
};

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run(const std::string& command) {
  int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome mixture_fidelity(const Paths& paths) {
  Outcome o;
  auto config = mixture::validate_config(mixture::load_mixture(paths.configs / "pretraining_mixture.json"));
  std::map<std::string, std::size_t> sizes;
  for (const auto& s : config.flattened()) sizes[s.source_id] = mixture::is_external(s.source_id) ? 0 : 5000;
  const std::size_t n = 100000;
  auto start = std::chrono::steady_clock::now();
  auto stream = mixture::sample_stream(config, sizes, 20240601, n);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto flat = config.flattened();
  std::vector<std::size_t> counts(flat.size(), 0);
  for (const auto& slot : stream) ++counts[slot.source];
  double worst = 0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    double dev = std::abs(static_cast<double>(counts[i]) / n - flat[i].rate.to_double());
    worst = std::max(worst, dev);
    if (dev > 0.01) o.fail(flat[i].source_id + " off by " + std::to_string(dev));
  }
  if (seconds >= 10) o.fail("took " + std::to_string(seconds) + " s");
  if (o.pass) {
    std::ostringstream d;
    d << "max deviation " << worst << " over " << n << " draws in " << seconds << " s";
    o.detail = d.str();
  }
  return o;
}

Outcome ablation(const Paths& paths) {
  Outcome o;
  auto out = paths.work / "ablate";
  fs::create_directories(out);
  auto mix_path = paths.configs / "pretraining_mixture.json";
  auto base = mixture::load_mixture(mix_path);
  if (run(q(paths.cli) + " ablate " + q(mix_path) + " --drop math -o " + q(out / "no_math.json")) != 0) {
    o.fail("--drop math exited nonzero");
    return o;
  }
  if (run(q(paths.cli) + " ablate " + q(mix_path) + " --drop math_dataset -o " + q(out / "no_math_dataset.json")) != 0) {
    o.fail("--drop math_dataset exited nonzero");
    return o;
  }
  auto no_math = mixture::load_mixture(out / "no_math.json");
  std::map<std::string, Rational> expected{{"math_dataset", Rational(0)},
                                           {"drop", Rational(0)},
                                           {"chart_to_code_real", Rational(1, 15)},
                                           {"chart_to_table_synthetic", Rational(1, 5)},
                                           {"chart_to_table_chartqa", Rational(1, 5)},
                                           {"chart_to_table_plotqa", Rational(1, 5)},
                                           {"external:screenshot", Rational(1, 3)}};
  for (const auto& [id, rate] : expected) {
    const auto* s = no_math.find(id);
    if (!s || s->rate != rate) o.fail("--drop math: " + id + " is " + (s ? s->rate.to_string() : "missing"));
  }
  if (no_math.total() != Rational(1)) o.fail("--drop math total " + no_math.total().to_string());

  auto no_dataset = mixture::load_mixture(out / "no_math_dataset.json");
  for (const auto& s : base.flattened()) {
    Rational want = s.rate;
    if (s.source_id == "math_dataset") want = Rational(0);
    if (s.source_id == "drop") want = Rational(2, 5);
    const auto* got = no_dataset.find(s.source_id);
    if (!got || got->rate != want) o.fail("--drop math_dataset: " + s.source_id + " changed");
  }
  if (o.pass) o.detail = "math -> {1/15, 1/5, 1/5, 1/5, 1/3}; math_dataset -> drop 2/5";
  return o;
}

Outcome round_trips(const Paths&) {
  Outcome o;
  tablegen::TableGenParams tp;
  tp.rows = {1, 12};
  tp.cols = {1, 6};
  tp.value_lo = Decimal(-100000, 2);
  tp.value_hi = Decimal(100000, 2);
  tp.seed = 1;
  std::size_t table_failures = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    tp.value_precision = static_cast<int>(i % 3);
    auto t = tablegen::generate_table(tp, i);
    try {
      if (!(linearizer::delinearize(linearizer::linearize(t)) == t)) ++table_failures;
    } catch (const std::exception&) {
      ++table_failures;
    }
  }
  chartrender::StylePools pools;
  tp.value_precision = 2;
  std::size_t code_failures = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    auto spec = chartrender::sample_spec(pools, 2, i);
    tp.pie_compatible = spec.chart_type == chartrender::ChartType::pie;
    tp.rows = {1, 8};
    auto t = tablegen::generate_table(tp, i);
    try {
      auto [t2, s2] = chartrender::parse_code(chartrender::emit_code(t, spec));
      if (!(t2 == t) || !chartrender::same_rendering(s2, spec)) ++code_failures;
    } catch (const std::exception&) {
      ++code_failures;
    }
  }
  if (table_failures) o.fail(std::to_string(table_failures) + " of 1000 table round trips failed");
  if (code_failures) o.fail(std::to_string(code_failures) + " of 500 chart code round trips failed");
  if (o.pass) o.detail = "1000 tables, 500 chart scripts, zero failures";
  return o;
}

Outcome math_oracle(const Paths&) {
  Outcome o;
  mathgen::MathGenParams params;
  params.seed = 20240601;
  auto modules = mathgen::all_modules();
  if (modules.size() != 14) o.fail("expected 14 modules, have " + std::to_string(modules.size()));
  std::size_t checked = 0;
  for (auto m : modules) {
    for (std::uint64_t i = 0; i < 10000; ++i) {
      auto item = mathgen::generate_math(m, params, i);
      auto verdict = oracle::check_math_item(mathgen::to_string(m), item.question, item.answer);
      ++checked;
      if (!verdict.ok) {
        o.fail(std::string(mathgen::to_string(m)) + ": '" + item.question + "' => '" + item.answer + "': " +
               verdict.reason);
        return o;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " items agree";
  return o;
}

Outcome metric_oracle(const Paths& paths) {
  Outcome o;
  std::ifstream in(paths.fixtures / "relaxed_cases.tsv");
  std::string line;
  std::getline(in, line);
  std::size_t cases = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    bool expected = line.substr(t2 + 1) == "true";
    auto pred = line.substr(0, t1);
    auto gold = line.substr(t1 + 1, t2 - t1 - 1);
    ++cases;
    if (metrics::relaxed_match(pred, gold) != expected) o.fail("relaxed('" + pred + "', '" + gold + "')");
  }
  if (cases != 50) o.fail("relaxed table has " + std::to_string(cases) + " cases");

  auto doc = json::parse(slurp(paths.fixtures / "bleu_fixture.json"));
  auto preds = doc["predictions"].get<std::vector<std::string>>();
  auto refs = doc["references"].get<std::vector<std::string>>();
  double score = metrics::bleu4(preds, refs);
  double reference = doc["reference_score"].get<double>();
  if (std::abs(score - reference) > 1e-6) o.fail("bleu " + std::to_string(score) + " vs " + std::to_string(reference));
  if (std::abs(metrics::bleu4(refs, refs) - 1.0) > 1e-12) o.fail("identity bleu is not 1");
  if (metrics::bleu4({"zz yy xx ww vv", "uu tt ss rr qq"}, {refs[0], refs[1]}) != 0.0) o.fail("disjoint bleu is not 0");
  if (o.pass) {
    std::ostringstream d;
    d.precision(10);
    d << "50/50 relaxed cases; bleu " << score << " (reference " << reference << ")";
    o.detail = d.str();
  }
  return o;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
  return files;
}

Outcome determinism(const Paths& paths) {
  Outcome o;
  auto config = paths.configs / "demo_build.json";
  auto root = paths.work / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string log = " > /dev/null 2> " + q(root / "log.txt");
  for (auto [name, threads] : std::vector<std::pair<std::string, int>>{{"a", 1}, {"b", 1}, {"c", 4}}) {
    if (run("CHARTSYNTH_LOG=quiet " + q(paths.cli) + " build " + q(config) + " --threads " + std::to_string(threads) +
            " --out " + q(root / name) + log) != 0) {
      o.fail("build " + name + " failed");
      return o;
    }
  }
  auto a = tree(root / "a");
  auto b = tree(root / "b");
  auto c = tree(root / "c");
  if (a != b) o.fail("rerun with the same seed differs");
  if (a != c) o.fail("1 thread and 4 threads differ");
  if (slurp(root / "a" / "SHA256SUMS").empty()) o.fail("no checksum file");
  if (mixture::verify_checksums(root / "a").size() != 0) o.fail("checksums do not verify");
  if (o.pass) o.detail = std::to_string(a.size()) + " files identical across reruns and thread counts";
  return o;
}

std::vector<int> bar_extents(const RasterImage& img, Rgb color) {
  std::vector<int> present(static_cast<std::size_t>(img.width()), 0);
  for (int x = 0; x < img.width(); ++x)
    for (int y = 0; y < img.height(); ++y)
      if (img.at(x, y) == color) {
        present[static_cast<std::size_t>(x)] = 1;
        break;
      }
  std::vector<int> extents;
  for (int x = 0; x < img.width();) {
    if (!present[static_cast<std::size_t>(x)]) {
      ++x;
      continue;
    }
    int s = x;
    while (x < img.width() && present[static_cast<std::size_t>(x)]) ++x;
    int mid = (s + x - 1) / 2, count = 0;
    for (int y = 0; y < img.height(); ++y) count += img.at(mid, y) == color;
    extents.push_back(count);
  }
  return extents;
}

Outcome render_correctness(const Paths&) {
  Outcome o;
  DataTable t;
  t.title = "Three bars";
  t.col_headers = {"value"};
  t.row_labels = {"low", "mid", "high"};
  t.values = {{Decimal::from_int(10)}, {Decimal::from_int(25)}, {Decimal::from_int(40)}};
  chartrender::ChartSpec spec;
  spec.legend = false;
  auto img = chartrender::render(t, spec);
  auto extents = bar_extents(img, chartrender::palette(spec.palette).front());
  if (extents.size() != 3) {
    o.fail("found " + std::to_string(extents.size()) + " bars");
  } else if (!(extents[0] < extents[1] && extents[1] < extents[2])) {
    o.fail("bar extents not monotone");
  }
  auto labelled = spec;
  labelled.show_values = true;
  if (chartrender::render(t, labelled) == img) o.fail("show_values did not change pixels");

  auto negative = t;
  negative.values[1][0] = Decimal::from_int(-3);
  chartrender::ChartSpec pie;
  pie.chart_type = chartrender::ChartType::pie;
  try {
    chartrender::render(negative, pie);
    o.fail("pie accepted a negative value");
  } catch (const UnsupportedChartError&) {
  }

  textraster::RenderParams params;
  auto composed = textraster::compose_question_header("Which bar is the highest of the three?", img, params);
  if (composed.width() != img.width() ||
      !(composed.crop_rows(composed.height() - img.height(), img.height()) == img)) {
    o.fail("header composition altered chart pixels");
  }
  if (o.pass) {
    o.detail = "bar extents " + std::to_string(extents[0]) + " < " + std::to_string(extents[1]) + " < " +
               std::to_string(extents[2]) + "; labels, pie domain and header preserved";
  }
  return o;
}

Outcome ingestion(const Paths& paths) {
  Outcome o;
  auto nb = nbingest::ingest_notebooks(paths.fixtures / "notebooks");
  const auto& s = nb.stats;
  if (nb.pairs.size() != 8) o.fail("notebooks gave " + std::to_string(nb.pairs.size()) + " pairs, expected 8");
  if (nb.pairs.size() + s.corrupt + s.filtered != s.png_outputs) o.fail("notebook pair count not conserved");

  auto drop = dropingest::load_drop(paths.fixtures / "drop_fixture.json");
  auto doc = json::parse(slurp(paths.fixtures / "drop_fixture.json"));
  std::size_t qa = 0;
  for (auto& [id, passage] : doc.items()) qa += passage["qa_pairs"].size();
  if (drop.records.size() + drop.skipped.total() != qa) o.fail("drop loaded + skipped != qa pairs");
  if (drop.qa_pairs != qa) o.fail("drop qa count mismatch");
  if (o.pass) {
    o.detail = "notebooks " + std::to_string(nb.pairs.size()) + " pairs + " + std::to_string(s.corrupt) +
               " corrupt = " + std::to_string(s.png_outputs) + " outputs; drop " +
               std::to_string(drop.records.size()) + " + " + std::to_string(drop.skipped.total()) + " = " +
               std::to_string(qa);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  Paths paths;
  app.add_option("--cli", paths.cli, "Path to the chartsynth executable")->required()->check(CLI::ExistingFile);
  app.add_option("--fixtures", paths.fixtures, "Test fixture directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--configs", paths.configs, "Config directory")->required()->check(CLI::ExistingDirectory);
  paths.work = fs::temp_directory_path() / "chartsynth_acceptance";
  app.add_option("--work", paths.work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(paths.work);

  const std::vector<std::pair<std::string, std::function<Outcome(const Paths&)>>> criteria{
      {"mixture fidelity", mixture_fidelity}, {"ablation arithmetic", ablation},
      {"round-trip suites", round_trips},     {"math oracle", math_oracle},
      {"metric oracle", metric_oracle},       {"determinism", determinism},
      {"render correctness", render_correctness}, {"ingestion conservation", ingestion},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check(paths);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
