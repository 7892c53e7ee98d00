#include "cric/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cric/errors.hpp"

namespace cric {

namespace {

template <typename T>
void read_into(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig PipelineConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  PipelineConfig cfg;
  read_into(j, "schema_version", cfg.schema_version);
  if (cfg.schema_version != kConfigSchemaVersion) {
    throw ConfigError("config: schema_version: unsupported value " +
                      std::to_string(cfg.schema_version));
  }
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    read_into(p, "scene_graphs", cfg.paths.scene_graphs);
    read_into(p, "triplets", cfg.paths.triplets);
    read_into(p, "synonyms", cfg.paths.synonyms);
    read_into(p, "entity_merge", cfg.paths.entity_merge);
    read_into(p, "whitelist", cfg.paths.whitelist);
    read_into(p, "templates", cfg.paths.templates);
    read_into(p, "output_dir", cfg.paths.output_dir);
  }
  read_into(j, "seed", cfg.seed);
  read_into(j, "vocab_min_count", cfg.vocab_min_count);
  read_into(j, "iou_threshold", cfg.iou_threshold);
  read_into(j, "hop_bound", cfg.hop_bound);
  read_into(j, "quota", cfg.quota);
  read_into(j, "max_share", cfg.max_share);
  read_into(j, "workers", cfg.workers);
  read_into(j, "max_decorations", cfg.max_decorations);
  read_into(j, "redundant_decoration_prob", cfg.redundant_decoration_prob);
  read_into(j, "corruption_prob", cfg.corruption_prob);
  if (j.contains("transe")) {
    const auto& t = j["transe"];
    read_into(t, "dimension", cfg.transe.dimension);
    read_into(t, "margin", cfg.transe.margin);
    read_into(t, "learning_rate", cfg.transe.learning_rate);
    read_into(t, "epochs", cfg.transe.epochs);
    read_into(t, "negatives_per_positive", cfg.transe.negatives_per_positive);
    if (t.contains("distance")) {
      cfg.transe.distance = transe::parse_distance(t["distance"].get<std::string>());
    }
    read_into(t, "seed", cfg.transe.seed);
  }
  cfg.validate_ranges();
  return cfg;
}

void PipelineConfig::validate_ranges() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("config: " + field + ": " + why);
  };
  if (!(iou_threshold > 0.0) || iou_threshold >= 1.0) {
    fail("iou_threshold", "must be in (0, 1)");
  }
  if (hop_bound < 1) fail("hop_bound", "must be >= 1");
  if (quota < 1) fail("quota", "must be >= 1");
  if (!(max_share > 0.0) || max_share > 1.0) fail("max_share", "must be in (0, 1]");
  if (workers < 1) fail("workers", "must be >= 1");
  if (redundant_decoration_prob < 0.0 || redundant_decoration_prob > 1.0) {
    fail("redundant_decoration_prob", "must be in [0, 1]");
  }
  if (corruption_prob < 0.0 || corruption_prob > 1.0) {
    fail("corruption_prob", "must be in [0, 1]");
  }
  if (transe.dimension < 1) fail("transe.dimension", "must be >= 1");
  if (!(transe.margin > 0.0)) fail("transe.margin", "must be > 0");
  if (!(transe.learning_rate > 0.0)) fail("transe.learning_rate", "must be > 0");
  if (transe.epochs < 1) fail("transe.epochs", "must be >= 1");
  if (transe.negatives_per_positive < 1) {
    fail("transe.negatives_per_positive", "must be >= 1");
  }
}

void PipelineConfig::require_inputs(std::initializer_list<const char*> fields) const {
  for (const char* field : fields) {
    std::string f(field);
    const std::string* path = nullptr;
    if (f == "scene_graphs") path = &paths.scene_graphs;
    if (f == "triplets") path = &paths.triplets;
    if (f == "templates") path = &paths.templates;
    if (f == "synonyms") path = &paths.synonyms;
    if (f == "whitelist") path = &paths.whitelist;
    if (f == "entity_merge") path = &paths.entity_merge;
    if (!path) continue;
    if (path->empty()) {
      throw ConfigError("config: paths." + f + ": required for this subcommand");
    }
    if (!std::filesystem::exists(*path)) {
      throw ConfigError("config: paths." + f + ": no such file: " + *path);
    }
  }
}

}  // namespace cric
