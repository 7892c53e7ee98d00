#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cric {

using ObjectId = std::int64_t;

// Axis-aligned box in pixel coordinates; w and h are strictly positive.
struct BoundingBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double area() const { return w * h; }
  bool valid() const { return w > 0 && h > 0 && x >= 0 && y >= 0; }
  bool operator==(const BoundingBox&) const = default;
};

// Intersection-over-union of two valid boxes; symmetric, 0 when disjoint,
// 1 for identical boxes. With integer pixel coordinates both areas are
// exact in double, so threshold comparisons at rationals are exact.
double iou(const BoundingBox& a, const BoundingBox& b);

// Smallest box covering both inputs.
BoundingBox union_box(const BoundingBox& a, const BoundingBox& b);

struct ObjectNode {
  ObjectId id = 0;
  std::string name;
  std::vector<std::string> attributes;  // sorted, unique
  BoundingBox box;

  bool operator==(const ObjectNode&) const = default;
};

struct RelationEdge {
  ObjectId subject = 0;
  std::string predicate;
  ObjectId object = 0;

  bool operator==(const RelationEdge&) const = default;
  auto operator<=>(const RelationEdge&) const = default;
};

struct SceneGraph {
  std::string image_id;
  std::vector<ObjectNode> objects;  // sorted by id, ids unique
  std::vector<RelationEdge> edges;

  const ObjectNode* find_object(ObjectId id) const;
  bool has_object(ObjectId id) const { return find_object(id) != nullptr; }

  bool operator==(const SceneGraph&) const = default;
};

// Surface concept -> canonical concept. Idempotent by construction:
// canonical forms map to themselves and targets may not be remapped.
class SynonymTable {
 public:
  SynonymTable() = default;
  explicit SynonymTable(std::map<std::string, std::string> mapping);

  // Two-column text: surface TAB canonical, one pair per line; '#' comments.
  static SynonymTable load(std::istream& in);
  static SynonymTable load_file(const std::string& path);

  const std::string& canonical(const std::string& surface) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::string, std::string> map_;
};

// One record per image: {image_id, objects[{id,name,attributes,box}],
// relations[{subject_id,predicate,object_id}]}. Throws ParseError naming the
// record index and field on schema violations, IntegrityError on dangling
// edge endpoints. Concepts are kept raw; normalization is a separate pass.
std::vector<SceneGraph> load_scene_graphs(std::istream& in);
std::vector<SceneGraph> load_scene_graphs_file(const std::string& path);

void save_scene_graphs(const std::vector<SceneGraph>& graphs, std::ostream& out);

struct NormalizationReport {
  std::size_t renamed_concepts = 0;
  std::size_t removed_objects = 0;
  std::size_t removed_attributes = 0;
  std::size_t removed_edges = 0;

  bool operator==(const NormalizationReport&) const = default;
};

// Corpus-wide occurrence counts of canonical concepts, used for the rare
// concept cut. Names, attributes and predicates share one count space.
using ConceptCounts = std::map<std::string, std::size_t>;

// Count canonical concepts over a whole corpus (after synonym rewrite).
ConceptCounts count_concepts(const std::vector<SceneGraph>& graphs,
                             const SynonymTable& synonyms);

struct NormalizeResult {
  SceneGraph graph;
  NormalizationReport report;
};

// Canonicalize every concept (lowercase/trim + synonym rewrite) and drop
// concepts whose corpus count is below vocab_min_count. Removing an
// attribute keeps its object; removing an object deletes incident edges.
NormalizeResult normalize(const SceneGraph& graph, const SynonymTable& synonyms,
                          std::size_t vocab_min_count, const ConceptCounts& corpus_counts);

// Merge objects that share a name and have pairwise IoU strictly greater
// than threshold, computed over connected components of the IoU relation
// within each name class and iterated to a fixed point so the result is
// idempotent. Survivor: lowest id; box: union; attributes: union. Edges are
// re-pointed to survivors; self-loops created by a merge are dropped.
SceneGraph merge_duplicate_boxes(const SceneGraph& graph, double threshold);

}  // namespace cric
