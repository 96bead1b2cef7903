#include "mixture.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <openssl/evp.h>

#include "errors.hpp"
#include "rng.hpp"

namespace chartsynth::mixture {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

bool is_external(std::string_view source_id) { return source_id.substr(0, kExternalPrefix.size()) == kExternalPrefix; }

Rational Component::total() const {
  Rational sum;
  for (const auto& s : sources) sum += s.rate;
  return sum;
}

Rational MixtureConfig::total() const {
  Rational sum;
  for (const auto& c : components) sum += c.total();
  return sum;
}

const SourceRate* MixtureConfig::find(std::string_view source_id) const {
  for (const auto& c : components) {
    for (const auto& s : c.sources) {
      if (s.source_id == source_id) return &s;
    }
  }
  return nullptr;
}

std::vector<SourceRate> MixtureConfig::flattened() const {
  std::vector<SourceRate> out;
  for (const auto& c : components) out.insert(out.end(), c.sources.begin(), c.sources.end());
  return out;
}

Rational parse_rate(std::string_view text) {
  std::string_view body = text;
  bool percent = !body.empty() && body.back() == '%';
  if (percent) body.remove_suffix(1);
  auto value = Rational::parse(body);
  if (!value || (percent && body.find('/') != std::string_view::npos)) {
    throw ConfigError("invalid rate '" + std::string(text) + "' (expected \"n/d\", \"x%\" or a decimal)");
  }
  return percent ? *value / Rational(100) : *value;
}

std::string format_rate(const Rational& rate) {
  Rational percent = rate * Rational(100);
  if (percent.is_terminating()) return percent.to_string() + "%";
  return rate.to_fraction_string();
}

MixtureConfig mixture_from_json(const ordered_json& doc) {
  if (!doc.is_object() || !doc.contains("components") || !doc["components"].is_object()) {
    throw ConfigError("mixture needs a \"components\" object");
  }
  MixtureConfig config;
  for (const auto& [name, sources] : doc["components"].items()) {
    if (!sources.is_object()) throw ConfigError("component '" + name + "' must map source ids to rates");
    Component component{name, {}};
    for (const auto& [id, rate] : sources.items()) {
      if (!rate.is_string()) {
        throw ConfigError("rate of '" + id + "' must be a string such as \"1/5\" or \"20%\"");
      }
      component.sources.push_back({id, parse_rate(rate.get<std::string>())});
    }
    config.components.push_back(std::move(component));
  }
  return config;
}

ordered_json mixture_to_json(const MixtureConfig& config) {
  ordered_json components = ordered_json::object();
  for (const auto& c : config.components) {
    ordered_json sources = ordered_json::object();
    for (const auto& s : c.sources) sources[s.source_id] = format_rate(s.rate);
    components[c.name] = std::move(sources);
  }
  return ordered_json{{"components", std::move(components)}};
}

MixtureConfig parse_mixture(std::string_view json_text) {
  ordered_json doc = ordered_json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded()) throw ParseError(1, 0, "mixture is not valid JSON");
  return mixture_from_json(doc);
}

MixtureConfig load_mixture(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mixture '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_mixture(buffer.str());
}

MixtureConfig default_mixture() {
  auto pct = [](int p) { return Rational(p, 100); };
  return MixtureConfig{{
      {"math", {{"math_dataset", pct(20)}, {"drop", pct(20)}}},
      {"chart_derendering",
       {{"chart_to_code_real", pct(4)},
        {"chart_to_table_synthetic", pct(12)},
        {"chart_to_table_chartqa", pct(12)},
        {"chart_to_table_plotqa", pct(12)}}},
      {"screenshot_parsing", {{"external:screenshot", pct(20)}}},
  }};
}

MixtureConfig validate_config(const MixtureConfig& config, const std::set<std::string>* known_sources) {
  std::set<std::string> components, sources;
  for (const auto& c : config.components) {
    if (c.name.empty()) throw ValidationError("component with an empty name");
    if (!components.insert(c.name).second) throw ValidationError("duplicate component '" + c.name + "'");
    for (const auto& s : c.sources) {
      if (s.source_id.empty()) throw ValidationError("source with an empty id in '" + c.name + "'");
      if (!sources.insert(s.source_id).second) throw ValidationError("duplicate source id '" + s.source_id + "'");
      if (s.rate.is_negative()) throw ValidationError("negative rate for '" + s.source_id + "'");
      if (known_sources && !is_external(s.source_id) && !known_sources->count(s.source_id)) {
        throw ValidationError("unknown source '" + s.source_id + "'");
      }
    }
  }
  Rational sum = config.total();
  if (sum != Rational(1)) {
    Rational gap = Rational(1) - sum;
    throw ValidationError("rates sum to " + format_rate(sum) + ", " + (gap.is_negative() ? "excess " : "deficit ") +
                          format_rate(gap.abs()));
  }
  return config;
}

namespace {

void scale_all_except(MixtureConfig& config, const Component* skip, const Rational& factor) {
  for (auto& c : config.components) {
    if (&c == skip) continue;
    for (auto& s : c.sources) s.rate *= factor;
  }
}

}  // namespace

MixtureConfig ablate(const MixtureConfig& input, std::string_view target) {
  MixtureConfig config = input;
  bool want_component = true, want_source = true;
  std::string_view name = target;
  if (name.substr(0, 10) == "component:") {
    want_source = false;
    name.remove_prefix(10);
  } else if (name.substr(0, 7) == "source:") {
    want_component = false;
    name.remove_prefix(7);
  }

  Component* component = nullptr;
  Component* owner = nullptr;
  SourceRate* source = nullptr;
  for (auto& c : config.components) {
    if (want_component && c.name == name) component = &c;
    for (auto& s : c.sources) {
      if (want_source && s.source_id == name) {
        source = &s;
        owner = &c;
      }
    }
  }
  if (component && source && component != owner) {
    throw ConfigError("'" + std::string(name) + "' names both a component and a source; prefix it with component: or source:");
  }
  if (component && source) source = nullptr;
  if (!component && !source) throw ConfigError("nothing named '" + std::string(target) + "' in the mixture");

  if (component) {
    Rational dropped = component->total();
    if (dropped.is_zero()) return config;
    Rational before = config.total();
    Rational remaining = before - dropped;
    if (!remaining.is_positive()) {
      throw ValidationError("dropping '" + component->name + "' leaves no mixture mass");
    }
    for (auto& s : component->sources) s.rate = Rational(0);
    scale_all_except(config, component, before / remaining);
    return config;
  }

  Rational dropped = source->rate;
  if (dropped.is_zero()) return config;
  Rational component_total = owner->total();
  Rational siblings = component_total - dropped;
  source->rate = Rational(0);
  if (siblings.is_positive()) {
    Rational factor = component_total / siblings;
    for (auto& s : owner->sources) s.rate *= factor;
    return config;
  }
  Rational remaining = config.total();
  if (!remaining.is_positive()) throw ValidationError("dropping '" + source->source_id + "' leaves no mixture mass");
  scale_all_except(config, nullptr, (remaining + dropped) / remaining);
  return config;
}

std::vector<StreamSlot> sample_stream(const MixtureConfig& config, const std::map<std::string, std::size_t>& corpus_sizes,
                                      std::uint64_t seed, std::size_t n) {
  const auto sources = config.flattened();
  const Rational total = config.total();
  if (sources.empty() || !total.is_positive()) throw ValidationError("mixture has no positive rates");

  std::vector<double> cumulative(sources.size());
  std::vector<std::size_t> sizes(sources.size(), 0);
  std::size_t last_positive = 0;
  Rational running;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    running += sources[i].rate;
    cumulative[i] = (running / total).to_double();
    if (sources[i].rate.is_positive()) last_positive = i;
    auto it = corpus_sizes.find(sources[i].source_id);
    sizes[i] = it == corpus_sizes.end() ? 0 : it->second;
    if (sources[i].rate.is_positive() && sizes[i] == 0 && !is_external(sources[i].source_id)) {
      throw ValidationError("source '" + sources[i].source_id + "' has a nonzero rate but no records");
    }
  }
  std::fill(cumulative.begin() + static_cast<std::ptrdiff_t>(last_positive), cumulative.end(), 1.0);

  struct Cursor {
    std::size_t drawn = 0;
    std::size_t epoch = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order;
  };
  std::vector<Cursor> cursors(sources.size());

  Rng rng(seed);
  std::vector<StreamSlot> stream;
  stream.reserve(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const double u = rng.uniform01();
    std::size_t s = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    if (s >= sources.size()) s = last_positive;
    Cursor& cur = cursors[s];
    StreamSlot slot{s, 0, 0};
    if (sizes[s] == 0) {
      slot.record = cur.drawn++;
    } else {
      const std::size_t epoch = cur.drawn / sizes[s];
      if (epoch != cur.epoch) {
        cur.order.resize(sizes[s]);
        std::iota(cur.order.begin(), cur.order.end(), std::size_t{0});
        Rng shuffler(mix_seed(derive_seed(seed, sources[s].source_id), epoch));
        shuffler.shuffle(cur.order);
        cur.epoch = epoch;
      }
      slot.record = cur.order[cur.drawn % sizes[s]];
      slot.epoch = epoch;
      ++cur.drawn;
    }
    stream.push_back(slot);
  }
  return stream;
}

std::string to_jsonl(const CorpusRecord& record) {
  ordered_json line;
  line["id"] = record.id;
  line["task"] = record.task;
  line["image_ref"] = record.image_ref.empty() ? ordered_json(nullptr) : ordered_json(record.image_ref);
  line["target"] = record.target;
  line["metadata"] = record.metadata;
  try {
    return line.dump();
  } catch (const nlohmann::json::type_error&) {
    throw ValidationError("record '" + record.id + "' is not valid UTF-8");
  }
}

CorpusRecord from_jsonl(std::string_view text) {
  ordered_json line = ordered_json::parse(text.begin(), text.end(), nullptr, false);
  if (line.is_discarded() || !line.is_object()) throw ParseError(1, 0, "corpus line is not a JSON object");
  CorpusRecord record;
  try {
    record.id = line.at("id").get<std::string>();
    record.task = line.at("task").get<std::string>();
    if (!line.at("image_ref").is_null()) record.image_ref = line.at("image_ref").get<std::string>();
    record.target = line.at("target").is_null() ? "" : line.at("target").get<std::string>();
    record.metadata = line.value("metadata", ordered_json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, 0, std::string("malformed corpus line: ") + e.what());
  }
  return record;
}

std::string shard_name(std::size_t index, std::size_t count) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "manifest-%05zu-of-%05zu.jsonl", index, count);
  return buf;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::io, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

namespace {

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

ShardSet write_shards(const std::vector<CorpusRecord>& records, const fs::path& out_dir, std::size_t shard_size) {
  if (shard_size == 0) throw ConfigError("shard_size must be positive");
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  fs::remove(out_dir / kChecksumFile, ec);
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("manifest-", 0) == 0 && entry.path().extension() == ".jsonl") {
      fs::remove(entry.path(), ec);
    }
  }

  std::vector<std::pair<std::string, std::string>> digests;  // relative path, hex
  ShardSet set;
  std::set<std::string> written_images;
  for (const auto& record : records) {
    if (!record.png || record.image_ref.empty()) continue;
    if (!written_images.insert(record.image_ref).second) continue;
    fs::path rel(record.image_ref);
    if (rel.is_absolute() || rel.lexically_normal().string().substr(0, 2) == "..") {
      throw ValidationError("image_ref '" + record.image_ref + "' escapes the corpus root");
    }
    std::string_view bytes(reinterpret_cast<const char*>(record.png->data()), record.png->size());
    fs::create_directories((out_dir / rel).parent_path(), ec);
    write_file(out_dir / rel, bytes);
    digests.emplace_back(rel.generic_string(), sha256_hex(bytes));
  }
  set.images = written_images.size();
  for (const auto& entry : fs::directory_iterator(out_dir / "images")) {
    const std::string rel = "images/" + entry.path().filename().string();
    if (entry.is_regular_file() && entry.path().extension() == ".png" && !written_images.count(rel)) {
      fs::remove(entry.path(), ec);
    }
  }

  const std::size_t count = std::max<std::size_t>(1, (records.size() + shard_size - 1) / shard_size);
  for (std::size_t k = 0; k < count; ++k) {
    std::string body;
    const std::size_t end = std::min(records.size(), (k + 1) * shard_size);
    for (std::size_t i = k * shard_size; i < end; ++i) {
      body += to_jsonl(records[i]);
      body.push_back('\n');
    }
    std::string name = shard_name(k, count);
    write_file(out_dir / name, body);
    digests.emplace_back(name, sha256_hex(body));
    set.shards.push_back(name);
  }
  set.records = records.size();

  std::sort(digests.begin(), digests.end());
  std::string sums;
  for (const auto& [path, hex] : digests) sums += hex + "  " + path + "\n";
  const fs::path tmp = out_dir / (std::string(kChecksumFile) + ".tmp");
  write_file(tmp, sums);
  fs::rename(tmp, out_dir / kChecksumFile, ec);
  if (ec) throw IoError("cannot commit checksum file: " + ec.message());
  set.checksum_file = std::string(kChecksumFile);
  return set;
}

std::vector<CorpusRecord> read_shards(const fs::path& corpus_dir) {
  std::error_code ec;
  if (!fs::is_directory(corpus_dir, ec)) throw IoError("not a corpus directory: '" + corpus_dir.string() + "'");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("manifest-", 0) == 0 && entry.path().extension() == ".jsonl") {
      names.push_back(name);
    }
  }
  std::sort(names.begin(), names.end());
  std::vector<CorpusRecord> records;
  for (const auto& name : names) {
    std::istringstream lines(read_file(corpus_dir / name));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        records.push_back(from_jsonl(line));
      } catch (const ParseError& e) {
        throw ParseError(line_no, 0, name + ": " + e.detail());
      }
    }
  }
  return records;
}

std::vector<std::string> verify_checksums(const fs::path& corpus_dir) {
  const fs::path sums_path = corpus_dir / kChecksumFile;
  std::error_code ec;
  if (!fs::exists(sums_path, ec)) throw IoError("no " + std::string(kChecksumFile) + " in '" + corpus_dir.string() + "'");
  std::istringstream lines(read_file(sums_path));
  std::vector<std::string> bad;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.size() < 67 || line.substr(64, 2) != "  ") {
      bad.push_back(line);
      continue;
    }
    std::string path = line.substr(66);
    std::string actual;
    try {
      actual = sha256_hex(read_file(corpus_dir / path));
    } catch (const IoError&) {
      bad.push_back(path);
      continue;
    }
    if (actual != line.substr(0, 64)) bad.push_back(path);
  }
  return bad;
}

}  // namespace chartsynth::mixture
