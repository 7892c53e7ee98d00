#include "cric/scene_graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cric/errors.hpp"
#include "cric/text_util.hpp"

namespace cric {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(a.x, b.x);
  const double iy = std::max(a.y, b.y);
  const double ix2 = std::min(a.x + a.w, b.x + b.w);
  const double iy2 = std::min(a.y + a.h, b.y + b.h);
  const double iw = ix2 - ix;
  const double ih = iy2 - iy;
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

BoundingBox union_box(const BoundingBox& a, const BoundingBox& b) {
  const double x1 = std::min(a.x, b.x);
  const double y1 = std::min(a.y, b.y);
  const double x2 = std::max(a.x + a.w, b.x + b.w);
  const double y2 = std::max(a.y + a.h, b.y + b.h);
  return {x1, y1, x2 - x1, y2 - y1};
}

const ObjectNode* SceneGraph::find_object(ObjectId id) const {
  auto it = std::lower_bound(objects.begin(), objects.end(), id,
                             [](const ObjectNode& o, ObjectId v) { return o.id < v; });
  if (it == objects.end() || it->id != id) return nullptr;
  return &*it;
}

SynonymTable::SynonymTable(std::map<std::string, std::string> mapping)
    : map_(std::move(mapping)) {
  for (const auto& [surface, target] : map_) {
    auto it = map_.find(target);
    if (it != map_.end() && it->second != target) {
      throw ConfigError("synonym table is not idempotent: '" + surface + "' -> '" +
                        target + "' -> '" + it->second + "'");
    }
  }
}

SynonymTable SynonymTable::load(std::istream& in) {
  std::map<std::string, std::string> m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("synonym table line " + std::to_string(lineno) +
                       ": expected 'surface TAB canonical'");
    }
    std::string surface = canonical_concept(line.substr(0, tab));
    std::string target = canonical_concept(line.substr(tab + 1));
    if (surface.empty() || target.empty()) {
      throw ParseError("synonym table line " + std::to_string(lineno) + ": empty concept");
    }
    m[surface] = target;
  }
  return SynonymTable(std::move(m));
}

SynonymTable SynonymTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open synonym table: " + path);
  return load(in);
}

const std::string& SynonymTable::canonical(const std::string& surface) const {
  auto it = map_.find(surface);
  return it == map_.end() ? surface : it->second;
}

namespace {

using nlohmann::json;

std::string record_locus(std::size_t index, const std::string& field) {
  return "scene graph record " + std::to_string(index) + ", field '" + field + "'";
}

const json& require_field(const json& rec, const char* field, std::size_t index) {
  auto it = rec.find(field);
  if (it == rec.end()) throw ParseError("missing " + record_locus(index, field));
  return *it;
}

double require_number(const json& v, const char* field, std::size_t index) {
  if (!v.is_number()) throw ParseError("non-numeric " + record_locus(index, field));
  return v.get<double>();
}

std::string image_id_of(const json& v, std::size_t index) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw ParseError("bad " + record_locus(index, "image_id") + ": expected string or integer");
}

SceneGraph parse_record(const json& rec, std::size_t index) {
  if (!rec.is_object()) {
    throw ParseError("scene graph record " + std::to_string(index) + " is not an object");
  }
  SceneGraph g;
  g.image_id = image_id_of(require_field(rec, "image_id", index), index);

  std::set<ObjectId> ids;
  for (const json& jo : require_field(rec, "objects", index)) {
    ObjectNode node;
    const json& jid = require_field(jo, "id", index);
    if (!jid.is_number_integer()) throw ParseError("bad " + record_locus(index, "objects.id"));
    node.id = jid.get<ObjectId>();
    if (!ids.insert(node.id).second) {
      throw IntegrityError("duplicate object id " + std::to_string(node.id) + " in " +
                           record_locus(index, "objects"));
    }
    node.name = require_field(jo, "name", index).get<std::string>();
    if (node.name.empty()) throw ParseError("empty " + record_locus(index, "objects.name"));
    if (auto it = jo.find("attributes"); it != jo.end()) {
      for (const json& a : *it) node.attributes.push_back(a.get<std::string>());
      std::sort(node.attributes.begin(), node.attributes.end());
      node.attributes.erase(std::unique(node.attributes.begin(), node.attributes.end()),
                            node.attributes.end());
    }
    const json& jb = require_field(jo, "box", index);
    node.box.x = require_number(require_field(jb, "x", index), "box.x", index);
    node.box.y = require_number(require_field(jb, "y", index), "box.y", index);
    node.box.w = require_number(require_field(jb, "w", index), "box.w", index);
    node.box.h = require_number(require_field(jb, "h", index), "box.h", index);
    if (!node.box.valid()) {
      throw ParseError("invalid " + record_locus(index, "box") + " for object id " +
                       std::to_string(node.id));
    }
    g.objects.push_back(std::move(node));
  }
  std::sort(g.objects.begin(), g.objects.end(),
            [](const ObjectNode& a, const ObjectNode& b) { return a.id < b.id; });

  if (auto it = rec.find("relations"); it != rec.end()) {
    for (const json& je : *it) {
      RelationEdge e;
      e.subject = require_field(je, "subject_id", index).get<ObjectId>();
      e.predicate = require_field(je, "predicate", index).get<std::string>();
      e.object = require_field(je, "object_id", index).get<ObjectId>();
      for (ObjectId end : {e.subject, e.object}) {
        if (!ids.count(end)) {
          throw IntegrityError("edge references missing object id " + std::to_string(end) +
                               " in " + record_locus(index, "relations"));
        }
      }
      if (e.subject == e.object) {
        throw IntegrityError("reflexive edge on object id " + std::to_string(e.subject) +
                             " in " + record_locus(index, "relations"));
      }
      g.edges.push_back(std::move(e));
    }
  }
  return g;
}

}  // namespace

std::vector<SceneGraph> load_scene_graphs(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene graph file: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("scene graph file: top level must be an array");
  std::vector<SceneGraph> graphs;
  graphs.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) graphs.push_back(parse_record(doc[i], i));
  return graphs;
}

std::vector<SceneGraph> load_scene_graphs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene graph file: " + path);
  return load_scene_graphs(in);
}

void save_scene_graphs(const std::vector<SceneGraph>& graphs, std::ostream& out) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SceneGraph& g : graphs) {
    nlohmann::ordered_json rec;
    rec["image_id"] = g.image_id;
    rec["objects"] = nlohmann::ordered_json::array();
    for (const ObjectNode& o : g.objects) {
      nlohmann::ordered_json jo;
      jo["id"] = o.id;
      jo["name"] = o.name;
      jo["attributes"] = o.attributes;
      jo["box"] = {{"x", o.box.x}, {"y", o.box.y}, {"w", o.box.w}, {"h", o.box.h}};
      rec["objects"].push_back(std::move(jo));
    }
    rec["relations"] = nlohmann::ordered_json::array();
    for (const RelationEdge& e : g.edges) {
      rec["relations"].push_back({{"subject_id", e.subject},
                                  {"predicate", e.predicate},
                                  {"object_id", e.object}});
    }
    arr.push_back(std::move(rec));
  }
  out << arr.dump(2) << '\n';
}

ConceptCounts count_concepts(const std::vector<SceneGraph>& graphs,
                             const SynonymTable& synonyms) {
  ConceptCounts counts;
  auto tally = [&](const std::string& raw) {
    counts[synonyms.canonical(canonical_concept(raw))]++;
  };
  for (const SceneGraph& g : graphs) {
    for (const ObjectNode& o : g.objects) {
      tally(o.name);
      for (const std::string& a : o.attributes) tally(a);
    }
    for (const RelationEdge& e : g.edges) tally(e.predicate);
  }
  return counts;
}

NormalizeResult normalize(const SceneGraph& graph, const SynonymTable& synonyms,
                          std::size_t vocab_min_count, const ConceptCounts& corpus_counts) {
  NormalizeResult res;
  res.graph.image_id = graph.image_id;

  auto canon = [&](const std::string& raw, bool* renamed) {
    std::string c = synonyms.canonical(canonical_concept(raw));
    if (renamed && c != raw) *renamed = true;
    return c;
  };
  auto frequent = [&](const std::string& concept_name) {
    auto it = corpus_counts.find(concept_name);
    const std::size_t n = it == corpus_counts.end() ? 0 : it->second;
    return n >= vocab_min_count;
  };

  std::set<ObjectId> kept;
  for (const ObjectNode& o : graph.objects) {
    bool renamed = false;
    ObjectNode node;
    node.id = o.id;
    node.box = o.box;
    node.name = canon(o.name, &renamed);
    if (!frequent(node.name)) {
      res.report.removed_objects++;
      continue;
    }
    for (const std::string& a : o.attributes) {
      std::string ca = canon(a, &renamed);
      if (frequent(ca)) {
        node.attributes.push_back(std::move(ca));
      } else {
        res.report.removed_attributes++;
      }
    }
    std::sort(node.attributes.begin(), node.attributes.end());
    node.attributes.erase(std::unique(node.attributes.begin(), node.attributes.end()),
                          node.attributes.end());
    if (renamed) res.report.renamed_concepts++;
    kept.insert(node.id);
    res.graph.objects.push_back(std::move(node));
  }

  for (const RelationEdge& e : graph.edges) {
    RelationEdge edge = e;
    edge.predicate = canon(e.predicate, nullptr);
    if (!kept.count(edge.subject) || !kept.count(edge.object) || !frequent(edge.predicate)) {
      res.report.removed_edges++;
      continue;
    }
    res.graph.edges.push_back(std::move(edge));
  }
  return res;
}

namespace {

// Union-find over object indices.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// One merge round; returns true if anything merged. Union boxes can create
// fresh overlaps, so the caller iterates until a fixed point.
bool merge_round(SceneGraph& g, double threshold) {
  const std::size_t n = g.objects.size();
  DisjointSet ds(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g.objects[i].name != g.objects[j].name) continue;
      if (iou(g.objects[i].box, g.objects[j].box) > threshold) {
        ds.unite(i, j);
        any = true;
      }
    }
  }
  if (!any) return false;

  // Objects are sorted by id, so the component root has the lowest id.
  std::map<std::size_t, std::size_t> root_slot;
  std::vector<ObjectNode> merged;
  std::map<ObjectId, ObjectId> survivor_of;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t root = ds.find(i);
    if (root == i) {
      root_slot[i] = merged.size();
      merged.push_back(g.objects[i]);
      survivor_of[g.objects[i].id] = g.objects[i].id;
    } else {
      ObjectNode& dst = merged[root_slot[root]];
      dst.box = union_box(dst.box, g.objects[i].box);
      dst.attributes.insert(dst.attributes.end(), g.objects[i].attributes.begin(),
                            g.objects[i].attributes.end());
      survivor_of[g.objects[i].id] = dst.id;
    }
  }
  for (ObjectNode& o : merged) {
    std::sort(o.attributes.begin(), o.attributes.end());
    o.attributes.erase(std::unique(o.attributes.begin(), o.attributes.end()),
                       o.attributes.end());
  }

  std::set<RelationEdge> edges;
  for (const RelationEdge& e : g.edges) {
    RelationEdge r{survivor_of.at(e.subject), e.predicate, survivor_of.at(e.object)};
    if (r.subject == r.object) continue;  // self-loop created by the merge
    edges.insert(std::move(r));
  }
  g.objects = std::move(merged);
  g.edges.assign(edges.begin(), edges.end());
  return true;
}

}  // namespace

SceneGraph merge_duplicate_boxes(const SceneGraph& graph, double threshold) {
  SceneGraph g = graph;
  while (merge_round(g, threshold)) {
  }
  return g;
}

}  // namespace cric
