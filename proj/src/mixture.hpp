#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rational.hpp"

namespace chartsynth::mixture {

inline constexpr std::string_view kExternalPrefix = "external:";
bool is_external(std::string_view source_id);

struct SourceRate {
  std::string source_id;
  Rational rate;

  friend bool operator==(const SourceRate&, const SourceRate&) = default;
};

struct Component {
  std::string name;
  std::vector<SourceRate> sources;

  Rational total() const;

  friend bool operator==(const Component&, const Component&) = default;
};

struct MixtureConfig {
  std::vector<Component> components;

  Rational total() const;
  const SourceRate* find(std::string_view source_id) const;
  /// Sources in declaration order across components.
  std::vector<SourceRate> flattened() const;

  friend bool operator==(const MixtureConfig&, const MixtureConfig&) = default;
};

/// "n/d", "x%" or a plain decimal such as "0.12". Throws ConfigError.
Rational parse_rate(std::string_view text);
/// "20%" when the percentage terminates, otherwise "n/d".
std::string format_rate(const Rational& rate);

/// {"components": {"<name>": {"<source id>": "<rate>", ...}, ...}}
MixtureConfig mixture_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json mixture_to_json(const MixtureConfig& config);
MixtureConfig parse_mixture(std::string_view json_text);
MixtureConfig load_mixture(const std::filesystem::path& path);

/// The seven-source pretraining mixture (math, chart derendering, and an
/// external screenshot-parsing source).
MixtureConfig default_mixture();

/// Throws ValidationError on a sum other than 1 (reporting the deficit or
/// excess), negative rates, empty or duplicate names, and source ids that are
/// neither external nor in `known_sources` (when given).
MixtureConfig validate_config(const MixtureConfig& config,
                              const std::set<std::string>* known_sources = nullptr);

/// `target` may be "component:<name>", "source:<id>", or a bare name that
/// matches exactly one component or source.
MixtureConfig ablate(const MixtureConfig& config, std::string_view target);

struct StreamSlot {
  std::size_t source = 0;  // index into config.flattened()
  std::size_t record = 0;  // index into that source's corpus
  std::size_t epoch = 0;
};

/// i.i.d. per-position source draws; each source walks a seed-shuffled
/// permutation of its records, reshuffled every epoch. `corpus_sizes` maps
/// source id to record count. A nonzero-rate source with no records is an
/// error unless it is external, in which case `record` is its running
/// ordinal and the slot is a placeholder.
std::vector<StreamSlot> sample_stream(const MixtureConfig& config,
                                      const std::map<std::string, std::size_t>& corpus_sizes,
                                      std::uint64_t seed, std::size_t n);

struct CorpusRecord {
  std::string id;
  std::string task;
  std::string image_ref;  // relative to the corpus root; empty for placeholders
  std::string target;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  std::shared_ptr<const std::vector<std::uint8_t>> png;  // written to image_ref
};

std::string to_jsonl(const CorpusRecord& record);
CorpusRecord from_jsonl(std::string_view line);  // png left empty

struct ShardSet {
  std::vector<std::string> shards;  // relative file names
  std::size_t records = 0;
  std::size_t images = 0;
  std::string checksum_file;
};

inline constexpr std::string_view kChecksumFile = "SHA256SUMS";

std::string shard_name(std::size_t index, std::size_t count);

/// Writes manifest-%05d-of-%05d.jsonl shards of at most `shard_size` lines,
/// each distinct image once under images/, and finally SHA256SUMS covering
/// every written file. An existing SHA256SUMS is removed before anything else
/// is written.
ShardSet write_shards(const std::vector<CorpusRecord>& records, const std::filesystem::path& out_dir,
                      std::size_t shard_size);

/// All manifest-*.jsonl shards of a corpus in name order, parsed back.
std::vector<CorpusRecord> read_shards(const std::filesystem::path& corpus_dir);

std::string sha256_hex(std::string_view bytes);

/// Files whose digest differs from SHA256SUMS or that are missing. Throws
/// IoError when the checksum file itself is absent.
std::vector<std::string> verify_checksums(const std::filesystem::path& corpus_dir);

}  // namespace chartsynth::mixture
