#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chartsynth/chartsynth.h"

namespace {

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* env = std::getenv("CHARTSYNTH_LOG");
  if (!env) return LogLevel::info;
  std::string v(env);
  if (v == "quiet" || v == "error" || v == "0") return LogLevel::quiet;
  if (v == "debug" || v == "2") return LogLevel::debug;
  return LogLevel::info;
}

void log_info(const std::string& message) {
  if (log_level() != LogLevel::quiet) std::cerr << "chartsynth: " << message << "\n";
}

void log_debug(const std::string& message) {
  if (log_level() == LogLevel::debug) std::cerr << "chartsynth: [debug] " << message << "\n";
}

int report(cs_status status) {
  if (status != CS_OK) {
    std::cerr << "chartsynth: error (" << cs_status_name(status) << "): " << cs_last_error() << "\n";
  }
  return static_cast<int>(status);
}

std::string take(char* text) {
  std::string out = text ? text : "";
  cs_string_free(text);
  return out;
}

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "chartsynth: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

int run_build(const std::string& config, std::vector<std::string> sets, const std::string& out_dir, int threads) {
  if (!out_dir.empty()) sets.push_back("output_dir=" + std::filesystem::absolute(out_dir).string());
  if (threads >= 0) sets.push_back("threads=" + std::to_string(threads));
  std::vector<const char*> raw;
  for (const auto& s : sets) {
    raw.push_back(s.c_str());
    log_debug("override " + s);
  }
  char* summary = nullptr;
  cs_status status = cs_build(config.c_str(), raw.data(), raw.size(), &summary);
  if (status != CS_OK) return report(status);
  std::string text = take(summary);
  auto doc = nlohmann::ordered_json::parse(text);
  for (const auto& s : doc["sources"]) {
    log_info(s["source_id"].get<std::string>() + ": " + std::to_string(s["generated"].get<std::size_t>()) +
             " records, " + std::to_string(s["skipped_layout"].get<std::size_t>()) + " layout skips, " +
             std::to_string(s["skipped_input"].get<std::size_t>()) + " input skips, drawn " +
             std::to_string(s["drawn"].get<std::size_t>()));
  }
  std::cout << text;
  return 0;
}

int run_ingest(const std::string& kind, const std::string& input, const std::string& out_dir, int threads) {
  char* summary = nullptr;
  cs_status status = cs_ingest(kind.c_str(), input.c_str(), out_dir.c_str(), threads < 0 ? 0 : threads, &summary);
  if (status != CS_OK) return report(status);
  std::string text = take(summary);
  auto doc = nlohmann::ordered_json::parse(text);
  if (doc["records"].get<std::size_t>() == 0) {
    log_info("warning: no records ingested from '" + input + "'; wrote an empty manifest");
  }
  std::cout << text;
  return 0;
}

int run_ablate(const std::string& config_path, const std::string& drop, const std::string& out) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "chartsynth: cannot open '" << config_path << "'\n";
    return static_cast<int>(CS_ERR_IO);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  auto doc = nlohmann::ordered_json::parse(text, nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && !doc.contains("components") && doc.contains("mixture")) {
    text = doc["mixture"].dump();
  }
  char* result = nullptr;
  cs_status status = cs_mixture_ablate(text.c_str(), drop.c_str(), &result);
  if (status != CS_OK) return report(status);
  return write_output(out, take(result)) ? 0 : static_cast<int>(CS_ERR_IO);
}

int run_score(const std::string& pred, const std::string& gold, const std::string& metric, bool by_category,
              const std::string& out) {
  char* result = nullptr;
  cs_status status = cs_score_files(pred.c_str(), gold.c_str(), metric.c_str(), by_category ? 1 : 0, &result);
  if (status != CS_OK) return report(status);
  return write_output(out, take(result)) ? 0 : static_cast<int>(CS_ERR_IO);
}

int run_stats(const std::string& corpus) {
  char* result = nullptr;
  cs_status status = cs_corpus_stats(corpus.c_str(), &result);
  if (status != CS_OK) return report(status);
  std::string text = take(result);
  std::cout << text;
  auto doc = nlohmann::ordered_json::parse(text);
  return doc["checksums"] == "mismatch" ? static_cast<int>(CS_ERR_VALIDATION) : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesize, mix, and score chart and math pretraining corpora."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cs_version()));

  std::string config, out_dir, input, kind, drop, out, pred, gold, metric = "relaxed", corpus;
  std::vector<std::string> sets;
  int threads = -1;
  bool by_category = false;

  auto* build = app.add_subcommand("build", "Generate every source, mix them, and write shards");
  build->add_option("config", config, "Build configuration (JSON)")->required()->check(CLI::ExistingFile);
  build->add_option("--set", sets, "Override a config value: key.path=value (repeatable)");
  build->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  build->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* ingest = app.add_subcommand("ingest", "Turn notebooks or a DROP file into a corpus");
  ingest->add_option("kind", kind, "notebooks or drop")->required()->check(CLI::IsMember({"notebooks", "drop"}));
  ingest->add_option("input", input, "Notebook directory or DROP JSON file")->required();
  ingest->add_option("out_dir", out_dir, "Corpus output directory")->required();
  ingest->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* ablate = app.add_subcommand("ablate", "Drop a component or source and renormalize the mixture");
  ablate->add_option("config", config, "Mixture or build configuration (JSON)")->required();
  ablate->add_option("--drop", drop, "component:<name>, source:<id>, or a bare name")->required();
  ablate->add_option("-o,--out", out, "Write the ablated mixture here (default stdout)");

  auto* score = app.add_subcommand("score", "Score predictions against gold answers");
  score->add_option("--pred", pred, "Predictions JSONL {id, prediction}")->required();
  score->add_option("--gold", gold, "Gold JSONL {id, gold, categories?}")->required();
  score->add_option("--metric", metric, "relaxed or bleu4")->check(CLI::IsMember({"relaxed", "bleu4"}));
  score->add_flag("--by-category", by_category, "Include per-category buckets");
  score->add_option("-o,--out", out, "Write the report here (default stdout)");

  auto* stats = app.add_subcommand("stats", "Summarize a corpus and verify its checksums");
  stats->add_option("corpus", corpus, "Corpus directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (build->parsed()) return run_build(config, sets, out_dir, threads);
  if (ingest->parsed()) return run_ingest(kind, input, out_dir, threads);
  if (ablate->parsed()) return run_ablate(config, drop, out);
  if (score->parsed()) return run_score(pred, gold, metric, by_category, out);
  return run_stats(corpus);
}
