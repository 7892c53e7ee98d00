#pragma once

#include <cstdint>
#include <string>

#include "cric/transe.hpp"

namespace cric {

inline constexpr int kConfigSchemaVersion = 1;

struct ConfigPaths {
  std::string scene_graphs;
  std::string triplets;
  std::string synonyms;      // optional
  std::string entity_merge;  // optional
  std::string whitelist;     // optional; shipped default list when empty
  std::string templates;
  std::string output_dir = "out";
};

// Single versioned config file; CLI flags override individual fields.
struct PipelineConfig {
  int schema_version = kConfigSchemaVersion;
  ConfigPaths paths;
  std::uint64_t seed = 1;
  std::size_t vocab_min_count = 20;
  double iou_threshold = 0.7;
  std::size_t hop_bound = 2;
  std::size_t quota = 5;
  double max_share = 0.5;
  std::size_t workers = 1;
  std::size_t max_decorations = 3;
  double redundant_decoration_prob = 0.1;
  double corruption_prob = 0.5;
  transe::TrainConfig transe;

  static PipelineConfig load_file(const std::string& path);

  // Range checks; throws ConfigError with the offending field path.
  void validate_ranges() const;
  // Existence checks for the inputs a subcommand needs.
  void require_inputs(std::initializer_list<const char*> fields) const;
};

}  // namespace cric
