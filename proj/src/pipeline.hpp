#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chartrender.hpp"
#include "mathgen.hpp"
#include "mixture.hpp"
#include "nbingest.hpp"
#include "tablegen.hpp"
#include "textraster.hpp"

namespace chartsynth::pipeline {

inline constexpr int kSchemaVersion = 1;

/// Parsed build configuration. Source entries stay as JSON until generation,
/// where each kind validates its own keys.
struct BuildConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::size_t shard_size = 1000;
  std::size_t stream_length = 0;  // 0 = total records across sources
  int threads = 0;                // 0 = hardware concurrency
  mixture::MixtureConfig mixture;
  nlohmann::ordered_json sources = nlohmann::ordered_json::object();
  std::filesystem::path base_dir;  // relative paths resolve against this
};

// Generator parameters from JSON objects. A null `doc` yields the defaults;
// unknown keys and invalid values throw ConfigError mentioning `where`.
tablegen::TableGenParams table_params(const nlohmann::ordered_json* doc, const std::string& where);
chartrender::StylePools style_pools(const nlohmann::ordered_json* doc, const std::string& where);
textraster::RenderParams render_params(const nlohmann::ordered_json* doc, const std::string& where);
mathgen::MathGenParams math_params(const nlohmann::ordered_json* doc, const std::string& where, std::uint64_t seed);
nbingest::NotebookFilters notebook_filters(const nlohmann::ordered_json* doc, const std::string& where, int threads);
/// ChartSpec fields by name; the result is validated and normalized.
chartrender::ChartSpec chart_spec(const nlohmann::ordered_json* doc, const std::string& where);
nlohmann::ordered_json chart_spec_json(const chartrender::ChartSpec& spec);

/// Applies "a.b.c=value" overrides; the value is parsed as JSON when it is
/// valid JSON and taken as a string otherwise.
void apply_override(nlohmann::ordered_json& doc, std::string_view assignment);

/// Throws ConfigError / ValidationError for missing seed, wrong schema
/// version, unknown keys, and mixture entries without a source definition.
BuildConfig parse_build_config(const nlohmann::ordered_json& doc, const std::filesystem::path& base_dir);
BuildConfig load_build_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

struct SourceSummary {
  std::string source_id;
  std::string kind;
  std::size_t generated = 0;
  std::size_t skipped_layout = 0;
  std::size_t skipped_input = 0;  // ingestion skips (bad files, empty answers, ...)
  std::size_t drawn = 0;          // appearances in the mixed stream
};

struct BuildSummary {
  std::vector<SourceSummary> sources;
  mixture::ShardSet shards;
  std::size_t stream_length = 0;

  nlohmann::ordered_json to_json() const;
};

/// Records of one configured source, in index order.
struct SourceCorpus {
  std::vector<mixture::CorpusRecord> records;
  SourceSummary summary;
};

SourceCorpus generate_source(const std::string& source_id, const nlohmann::ordered_json& definition,
                             std::uint64_t seed, int threads, const std::filesystem::path& base_dir);

BuildSummary build_corpus(const BuildConfig& config);

enum class IngestKind { notebooks, drop };
IngestKind parse_ingest_kind(std::string_view name);

struct IngestSummary {
  std::size_t records = 0;
  nlohmann::ordered_json skipped = nlohmann::ordered_json::object();
  mixture::ShardSet shards;

  nlohmann::ordered_json to_json() const;
};

/// Ingests a notebook directory or a DROP file into a standalone corpus.
IngestSummary ingest(IngestKind kind, const std::filesystem::path& input, const std::filesystem::path& out_dir,
                     std::size_t shard_size = 1000, int threads = 0);

/// Record counts per task, shard and image totals, and checksum status.
nlohmann::ordered_json corpus_stats(const std::filesystem::path& corpus_dir);

}  // namespace chartsynth::pipeline
