#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cric/knowledge_graph.hpp"

namespace cric::transe {

enum class Distance : std::uint8_t { L1, L2 };

std::string_view to_string(Distance d);
Distance parse_distance(std::string_view s);

struct TrainConfig {
  std::size_t dimension = 50;
  double margin = 1.0;
  double learning_rate = 0.01;
  std::size_t epochs = 100;
  std::size_t negatives_per_positive = 1;
  Distance distance = Distance::L1;
  std::uint64_t seed = 1;
};

// Entity/relation vectors plus the scoring policy they were trained under.
// Entities are projected onto the unit ball after every epoch.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> entity_names, std::vector<std::string> relation_names,
                 std::size_t dimension, Distance distance);

  std::size_t dimension() const { return dimension_; }
  Distance distance() const { return distance_; }
  const std::string& norm_policy() const { return norm_policy_; }

  const std::vector<std::string>& entity_names() const { return entity_names_; }
  const std::vector<std::string>& relation_names() const { return relation_names_; }

  std::vector<double>& entity(const std::string& name);
  const std::vector<double>& entity(const std::string& name) const;
  std::vector<double>& relation(const std::string& name);
  const std::vector<double>& relation(const std::string& name) const;
  bool has_entity(const std::string& name) const { return entity_index_.count(name) > 0; }
  bool has_relation(const std::string& name) const { return relation_index_.count(name) > 0; }

  // Text persistence, round-trip exact at 17 significant digits.
  void save(std::ostream& out) const;
  static EmbeddingTable load(std::istream& in);
  void save_file(const std::string& path) const;
  static EmbeddingTable load_file(const std::string& path);

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::size_t dimension_ = 0;
  Distance distance_ = Distance::L1;
  std::string norm_policy_ = "project-entities-unit-ball";
  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::map<std::string, std::size_t> entity_index_;
  std::map<std::string, std::size_t> relation_index_;
  std::vector<std::vector<double>> entity_vecs_;
  std::vector<std::vector<double>> relation_vecs_;
};

struct TrainResult {
  EmbeddingTable table;
  std::vector<double> loss_curve;  // summed hinge loss per epoch
};

// Margin-ranking training over corrupted triplets: minimize
// sum max(0, margin + d(h+r, t) - d(h'+r, t')), corrupting head or tail
// uniformly and never sampling a true triplet. Deterministic under seed.
// Throws ConfigError on an empty graph.
TrainResult train(const KnowledgeGraph& kg, const TrainConfig& cfg);

// d(h + r, t) under the table's distance. Throws LookupError for unknown
// names.
double score(const EmbeddingTable& table, const std::string& head, const std::string& relation,
             const std::string& tail);

// All entities ranked by score ascending, ties lexicographic; k clamped.
std::vector<std::string> predict_tail(const EmbeddingTable& table, const std::string& head,
                                      const std::string& relation, std::size_t k);
std::vector<std::string> predict_head(const EmbeddingTable& table, const std::string& relation,
                                      const std::string& tail, std::size_t k);

// Fraction of (triplet, side) rank checks where the true entity lands in
// the top k, over both tail and head prediction.
double hits_at_k(const EmbeddingTable& table, const std::vector<Triplet>& triplets,
                 std::size_t k);

struct ContrastPair {
  Triplet positive;
  Triplet corrupted;
};

struct GradCheckBatch {
  std::vector<ContrastPair> pairs;
  double margin = 1.0;
};

// Total margin ranking loss of a batch under the table's current vectors.
double margin_loss(const EmbeddingTable& table, const GradCheckBatch& batch);

// Compare the analytic hinge-loss gradient to central finite differences,
// coordinate-wise, skipping coordinates within 10*epsilon of a hinge or L1
// kink. Returns the max relative error over compared coordinates.
double gradient_check(const EmbeddingTable& table, const GradCheckBatch& batch, double epsilon);

}  // namespace cric::transe
