#include "cric/knowledge_graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "cric/errors.hpp"
#include "cric/text_util.hpp"

namespace cric {

RelationWhitelist default_relation_whitelist() {
  return {"IsA",        "UsedFor", "HasA",       "CapableOf", "MadeOf",
          "PartOf",     "AtLocation", "HasProperty", "CreatedBy", "ReceivesAction"};
}

RelationWhitelist load_whitelist(std::istream& in) {
  RelationWhitelist wl;
  std::string line;
  while (std::getline(in, line)) {
    std::string s = collapse_spaces(line);
    if (s.empty() || s[0] == '#') continue;
    wl.insert(s);
  }
  return wl;
}

RelationWhitelist load_whitelist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open whitelist: " + path);
  return load_whitelist(in);
}

EntityMergeMap load_merge_map(std::istream& in) {
  EntityMergeMap m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("merge map line " + std::to_string(lineno) +
                       ": expected 'surface TAB canonical'");
    }
    m[canonical_concept(line.substr(0, tab))] = canonical_concept(line.substr(tab + 1));
  }
  return m;
}

EntityMergeMap load_merge_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open merge map: " + path);
  return load_merge_map(in);
}

KnowledgeGraph::KnowledgeGraph(std::vector<Triplet> triplets) : triplets_(std::move(triplets)) {
  std::sort(triplets_.begin(), triplets_.end());
  triplets_.erase(std::unique(triplets_.begin(), triplets_.end()), triplets_.end());
  rebuild_indexes();
}

void KnowledgeGraph::rebuild_indexes() {
  entities_.clear();
  by_head_relation_.clear();
  isa_out_.clear();
  std::set<EntityName> ents;
  for (std::size_t i = 0; i < triplets_.size(); ++i) {
    const Triplet& t = triplets_[i];
    ents.insert(t.head);
    ents.insert(t.tail);
    by_head_relation_[{t.head, t.relation}].push_back(i);
    if (t.relation == kIsA) isa_out_[t.head].push_back(t.tail);
  }
  entities_.assign(ents.begin(), ents.end());
}

bool KnowledgeGraph::has(const EntityName& head, const RelationName& relation,
                         const EntityName& tail) const {
  return std::binary_search(triplets_.begin(), triplets_.end(), Triplet{head, relation, tail});
}

std::vector<RelationName> KnowledgeGraph::relations() const {
  std::set<RelationName> rels;
  for (const Triplet& t : triplets_) rels.insert(t.relation);
  return {rels.begin(), rels.end()};
}

bool KnowledgeGraph::in_category(const EntityName& concept_name,
                                 const EntityName& category) const {
  auto it = categories_.find(concept_name);
  return it != categories_.end() && it->second.count(category) > 0;
}

std::set<EntityName> KnowledgeGraph::isa_reachable(const EntityName& from,
                                                   std::size_t hops) const {
  std::set<EntityName> seen;
  std::deque<std::pair<EntityName, std::size_t>> frontier{{from, 0}};
  std::set<EntityName> visited{from};
  while (!frontier.empty()) {
    auto [cur, depth] = frontier.front();
    frontier.pop_front();
    if (depth == hops) continue;
    auto it = isa_out_.find(cur);
    if (it == isa_out_.end()) continue;
    for (const EntityName& next : it->second) {
      seen.insert(next);
      if (visited.insert(next).second) frontier.emplace_back(next, depth + 1);
    }
  }
  return seen;
}

bool KnowledgeGraph::entails(const EntityName& head, const RelationName& relation,
                             const EntityName& tail, std::size_t max_hops) const {
  if (max_hops == 0) return false;
  if (has(head, relation, tail)) return true;
  if (max_hops == 1) return false;
  for (const EntityName& lifted : isa_reachable(head, max_hops - 1)) {
    if (has(lifted, relation, tail)) return true;
  }
  return false;
}

std::vector<EntityName> KnowledgeGraph::query_tails(const EntityName& head,
                                                    const RelationName& relation,
                                                    std::size_t max_hops) const {
  std::set<EntityName> tails;
  auto collect = [&](const EntityName& h) {
    auto it = by_head_relation_.find({h, relation});
    if (it == by_head_relation_.end()) return;
    for (std::size_t idx : it->second) tails.insert(triplets_[idx].tail);
  };
  if (max_hops >= 1) collect(head);
  if (max_hops >= 2) {
    for (const EntityName& lifted : isa_reachable(head, max_hops - 1)) collect(lifted);
  }
  return {tails.begin(), tails.end()};
}

std::optional<std::vector<Triplet>> KnowledgeGraph::entail_witness(
    const EntityName& head, const RelationName& relation, const EntityName& tail,
    std::size_t max_hops) const {
  if (max_hops == 0) return std::nullopt;
  if (has(head, relation, tail)) return std::vector<Triplet>{{head, relation, tail}};
  if (max_hops == 1) return std::nullopt;

  // BFS over IsA edges records one shortest predecessor per node; neighbor
  // lists come from sorted triplets, so ties resolve lexicographically.
  std::map<EntityName, EntityName> parent;
  std::deque<std::pair<EntityName, std::size_t>> frontier{{head, 0}};
  std::set<EntityName> visited{head};
  while (!frontier.empty()) {
    auto [cur, depth] = frontier.front();
    frontier.pop_front();
    if (cur != head && has(cur, relation, tail)) {
      std::vector<Triplet> path{{cur, relation, tail}};
      for (EntityName node = cur; node != head;) {
        const EntityName& prev = parent.at(node);
        path.push_back({prev, kIsA, node});
        node = prev;
      }
      std::sort(path.begin(), path.end());
      return path;
    }
    if (depth == max_hops - 1) continue;
    auto it = isa_out_.find(cur);
    if (it == isa_out_.end()) continue;
    std::vector<EntityName> nexts = it->second;
    std::sort(nexts.begin(), nexts.end());
    for (const EntityName& next : nexts) {
      if (visited.insert(next).second) {
        parent[next] = cur;
        frontier.emplace_back(next, depth + 1);
      }
    }
  }
  return std::nullopt;
}

namespace {

void validate_merge_map(const EntityMergeMap& m) {
  for (const auto& [surface, target] : m) {
    if (surface == target) continue;
    auto it = m.find(target);
    if (it != m.end() && it->second != target) {
      throw ConfigError("entity merge map is cyclic or non-idempotent at '" + surface +
                        "' -> '" + target + "' -> '" + it->second + "'");
    }
  }
}

Triplet canonical_triplet(std::string head, std::string relation, std::string tail) {
  return {canonical_concept(head), collapse_spaces(relation), canonical_concept(tail)};
}

KgLoadResult build_from_rows(std::vector<Triplet> rows, const RelationWhitelist& whitelist) {
  KgLoadResult res;
  std::vector<Triplet> kept;
  for (Triplet& t : rows) {
    if (!whitelist.count(t.relation)) {
      res.report.dropped_relation++;
      continue;
    }
    if (t.head.empty() || t.tail.empty() || t.head == t.tail) {
      res.report.dropped_invalid++;
      continue;
    }
    kept.push_back(std::move(t));
  }
  std::sort(kept.begin(), kept.end());
  const std::size_t before = kept.size();
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  res.report.duplicates = before - kept.size();
  res.report.accepted = kept.size();
  res.kg = KnowledgeGraph(std::move(kept));
  return res;
}

}  // namespace

KgLoadResult load_triplets(std::istream& in, const RelationWhitelist& whitelist) {
  // Peek for a JSON array; otherwise treat as tab-separated text.
  int c = in.peek();
  while (c == ' ' || c == '\n' || c == '\r' || c == '\t') {
    in.get();
    c = in.peek();
  }
  std::vector<Triplet> rows;
  if (c == '[') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("triplet file: ") + e.what());
    }
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& rec = doc[i];
      if (!rec.is_object() || !rec.contains("head") || !rec.contains("relation") ||
          !rec.contains("tail")) {
        throw ParseError("triplet record " + std::to_string(i) +
                         ": expected {head, relation, tail}");
      }
      rows.push_back(canonical_triplet(rec["head"].get<std::string>(),
                                       rec["relation"].get<std::string>(),
                                       rec["tail"].get<std::string>()));
    }
  } else {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 3) {
        throw ParseError("triplet row " + std::to_string(lineno) +
                         ": expected 3 tab-separated columns, got " +
                         std::to_string(cols.size()));
      }
      rows.push_back(canonical_triplet(cols[0], cols[1], cols[2]));
    }
  }
  return build_from_rows(std::move(rows), whitelist);
}

KgLoadResult load_triplets_file(const std::string& path, const RelationWhitelist& whitelist) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open triplet file: " + path);
  return load_triplets(in, whitelist);
}

void save_triplets(const KnowledgeGraph& kg, std::ostream& out) {
  for (const Triplet& t : kg.triplets()) {
    out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
  }
}

KnowledgeGraph merge_entities(const KnowledgeGraph& kg, const EntityMergeMap& merge_map) {
  validate_merge_map(merge_map);
  auto rewrite = [&](const EntityName& e) {
    auto it = merge_map.find(e);
    return it == merge_map.end() ? e : it->second;
  };
  std::vector<Triplet> rewritten;
  rewritten.reserve(kg.size());
  for (const Triplet& t : kg.triplets()) {
    Triplet r{rewrite(t.head), t.relation, rewrite(t.tail)};
    if (r.head == r.tail) continue;  // merged into itself; no information left
    rewritten.push_back(std::move(r));
  }
  return KnowledgeGraph(std::move(rewritten));
}

ClosureResult build_category_closure(const KnowledgeGraph& kg, std::size_t max_hops) {
  if (max_hops < 1) throw PreconditionError("build_category_closure: max_hops must be >= 1");
  ClosureResult res;
  res.kg = kg;
  res.kg.categories_.clear();
  for (const EntityName& e : kg.entities()) {
    std::set<EntityName> cats = kg.isa_reachable(e, max_hops);
    if (cats.empty()) res.uncategorized.push_back(e);
    res.kg.categories_[e] = std::move(cats);
  }
  res.kg.closure_hops_ = max_hops;
  return res;
}

}  // namespace cric
