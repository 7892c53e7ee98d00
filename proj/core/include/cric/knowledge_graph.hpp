#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cric {

// Relation labels live in a configured whitelist (exact, case-sensitive).
using RelationName = std::string;
using EntityName = std::string;

using RelationWhitelist = std::set<RelationName>;

// Shipped default of 10 relations. The true production list is config data;
// this one covers the fixtures and can be replaced wholesale.
RelationWhitelist default_relation_whitelist();

// Whitelist file: one relation per line, '#' comments.
RelationWhitelist load_whitelist(std::istream& in);
RelationWhitelist load_whitelist_file(const std::string& path);

inline const RelationName kIsA = "IsA";

struct Triplet {
  EntityName head;
  RelationName relation;
  EntityName tail;

  bool operator==(const Triplet&) const = default;
  auto operator<=>(const Triplet&) const = default;
};

struct KgLoadReport {
  std::size_t accepted = 0;
  std::size_t dropped_relation = 0;   // relation outside the whitelist
  std::size_t dropped_invalid = 0;    // head == tail after canonicalization
  std::size_t duplicates = 0;
  std::vector<EntityName> uncategorized;  // entities with no IsA category
};

// Surface entity -> canonical entity; must be idempotent (checked).
using EntityMergeMap = std::map<EntityName, EntityName>;
EntityMergeMap load_merge_map(std::istream& in);
EntityMergeMap load_merge_map_file(const std::string& path);

struct ClosureResult;

// Immutable triplet store with IsA category closure and bounded multi-hop
// entailment. An entailment at hop bound k may spend at most k triplets:
// the relation triplet itself plus up to k-1 IsA lifts on the head.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  explicit KnowledgeGraph(std::vector<Triplet> triplets);

  const std::vector<Triplet>& triplets() const { return triplets_; }
  bool has(const EntityName& head, const RelationName& relation, const EntityName& tail) const;
  bool empty() const { return triplets_.empty(); }
  std::size_t size() const { return triplets_.size(); }

  // All entities appearing as a head or tail, sorted.
  const std::vector<EntityName>& entities() const { return entities_; }
  // All relations in use, sorted.
  std::vector<RelationName> relations() const;

  // Category closure as built by build_category_closure (empty before).
  const std::map<EntityName, std::set<EntityName>>& categories() const { return categories_; }
  std::size_t closure_hops() const { return closure_hops_; }
  bool in_category(const EntityName& concept_name, const EntityName& category) const;

  // Entities reachable from `from` via 1..hops IsA edges (cycle tolerant).
  std::set<EntityName> isa_reachable(const EntityName& from, std::size_t hops) const;

  // True iff <head, relation, tail> holds directly or via IsA-lifting of the
  // head within max_hops total triplets.
  bool entails(const EntityName& head, const RelationName& relation, const EntityName& tail,
               std::size_t max_hops) const;

  // All tails t with entails(head, relation, t, max_hops), sorted.
  std::vector<EntityName> query_tails(const EntityName& head, const RelationName& relation,
                                      std::size_t max_hops) const;

  // A minimal triplet set witnessing the entailment: the shortest IsA lift
  // path plus the relation triplet, ties broken lexicographically.
  // nullopt when the entailment does not hold.
  std::optional<std::vector<Triplet>> entail_witness(const EntityName& head,
                                                     const RelationName& relation,
                                                     const EntityName& tail,
                                                     std::size_t max_hops) const;

 private:
  friend ClosureResult build_category_closure(const KnowledgeGraph& kg, std::size_t max_hops);

  std::vector<Triplet> triplets_;  // sorted, unique
  std::vector<EntityName> entities_;
  std::map<std::pair<EntityName, RelationName>, std::vector<std::size_t>> by_head_relation_;
  std::map<EntityName, std::vector<EntityName>> isa_out_;
  std::map<EntityName, std::set<EntityName>> categories_;
  std::size_t closure_hops_ = 0;

  void rebuild_indexes();
};

struct KgLoadResult {
  KnowledgeGraph kg;
  KgLoadReport report;
};

// Triplet source: either three-column text (head TAB relation TAB tail) or a
// JSON array of {head, relation, tail} records. Entities are canonicalized;
// non-whitelisted relations are dropped and counted, malformed rows throw
// ParseError with the row number.
KgLoadResult load_triplets(std::istream& in, const RelationWhitelist& whitelist);
KgLoadResult load_triplets_file(const std::string& path, const RelationWhitelist& whitelist);

void save_triplets(const KnowledgeGraph& kg, std::ostream& out);

// Rewrite entities through merge_map and collapse duplicates. Throws
// ConfigError if the map is cyclic / non-idempotent.
KnowledgeGraph merge_entities(const KnowledgeGraph& kg, const EntityMergeMap& merge_map);

struct ClosureResult {
  KnowledgeGraph kg;
  std::vector<EntityName> uncategorized;  // entities with empty closure
};

// categories(e) := entities reachable from e via 1..max_hops IsA edges.
ClosureResult build_category_closure(const KnowledgeGraph& kg, std::size_t max_hops);

}  // namespace cric
