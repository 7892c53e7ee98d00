#include <doctest.h>

#include <sstream>

#include "cric/errors.hpp"
#include "cric/scene_graph.hpp"
#include "test_support.hpp"

using namespace cric;

namespace {

const char* kTwoObjectScene = R"([
  {"image_id": "10",
   "objects": [
     {"id": 1, "name": "cat", "attributes": ["black"], "box": {"x": 0, "y": 0, "w": 10, "h": 10}},
     {"id": 2, "name": "table", "attributes": [], "box": {"x": 20, "y": 0, "w": 30, "h": 10}}
   ],
   "relations": [{"subject_id": 1, "predicate": "on", "object_id": 2}]}
])";

SceneGraph two_cat_graph(double x2, double y2) {
  SceneGraph g;
  g.image_id = "m";
  g.objects = {
      {1, "cat", {"black"}, {0, 0, 100, 100}},
      {2, "cat", {"white"}, {x2, y2, 100, 100}},
      {3, "table", {}, {0, 200, 200, 80}},
  };
  g.edges = {{2, "on", 3}};
  return g;
}

}  // namespace

TEST_CASE("load_scene_graphs: empty file yields empty collection") {
  std::istringstream in("[]");
  CHECK(load_scene_graphs(in).empty());
}

TEST_CASE("load_scene_graphs: identity load of one image") {
  std::istringstream in(kTwoObjectScene);
  std::vector<SceneGraph> graphs = load_scene_graphs(in);
  REQUIRE(graphs.size() == 1);
  CHECK(graphs[0].image_id == "10");
  CHECK(graphs[0].objects.size() == 2);
  CHECK(graphs[0].edges.size() == 1);
  CHECK(graphs[0].objects[0].name == "cat");
}

TEST_CASE("load_scene_graphs: dangling edge endpoint names the id") {
  const char* bad = R"([
    {"image_id": "1",
     "objects": [{"id": 1, "name": "cat", "attributes": [], "box": {"x":0,"y":0,"w":1,"h":1}}],
     "relations": [{"subject_id": 1, "predicate": "on", "object_id": 99}]}
  ])";
  std::istringstream in(bad);
  CHECK_THROWS_WITH_AS(load_scene_graphs(in), doctest::Contains("99"), IntegrityError);
}

TEST_CASE("load_scene_graphs: schema violations name record and field") {
  std::istringstream in(R"([{"image_id": "1", "objects": [{"id": 1, "name": "cat"}]}])");
  CHECK_THROWS_WITH_AS(load_scene_graphs(in), doctest::Contains("box"), ParseError);
}

TEST_CASE("iou: identical boxes score 1") {
  BoundingBox b{0, 0, 10, 10};
  CHECK(iou(b, b) == 1.0);
}

TEST_CASE("iou: disjoint boxes score 0") {
  CHECK(iou({0, 0, 2, 2}, {10, 10, 2, 2}) == 0.0);
}

TEST_CASE("iou: unit overlap of 2x2 boxes is 1/7") {
  // intersection 1, union 4 + 4 - 1 = 7 by direct area arithmetic
  CHECK(iou({0, 0, 2, 2}, {1, 1, 2, 2}) == 1.0 / 7.0);
}

TEST_CASE("iou: symmetric and self-unit over random boxes") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    BoundingBox a{static_cast<double>(rng.index(50)), static_cast<double>(rng.index(50)),
                  static_cast<double>(1 + rng.index(40)), static_cast<double>(1 + rng.index(40))};
    BoundingBox b{static_cast<double>(rng.index(50)), static_cast<double>(rng.index(50)),
                  static_cast<double>(1 + rng.index(40)), static_cast<double>(1 + rng.index(40))};
    CHECK(iou(a, b) == iou(b, a));
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, b) >= 0.0);
    CHECK(iou(a, b) <= 1.0);
  }
}

TEST_CASE("normalize: synonym substitution") {
  SceneGraph g;
  g.image_id = "1";
  g.objects = {{1, "kitty", {}, {0, 0, 1, 1}}};
  SynonymTable syn(std::map<std::string, std::string>{{"kitty", "cat"}});
  ConceptCounts counts = count_concepts({g}, syn);
  NormalizeResult r = normalize(g, syn, 1, counts);
  REQUIRE(r.graph.objects.size() == 1);
  CHECK(r.graph.objects[0].name == "cat");
  CHECK(r.report.renamed_concepts == 1);
}

TEST_CASE("normalize: rare predicate removed and counted") {
  // "chasing" appears once corpus-wide, "on" twice.
  SceneGraph g1;
  g1.image_id = "1";
  g1.objects = {{1, "cat", {}, {0, 0, 1, 1}}, {2, "dog", {}, {2, 0, 1, 1}}};
  g1.edges = {{1, "chasing", 2}, {1, "on", 2}};
  SceneGraph g2;
  g2.image_id = "2";
  g2.objects = {{1, "cat", {}, {0, 0, 1, 1}}, {2, "dog", {}, {2, 0, 1, 1}}};
  g2.edges = {{1, "on", 2}};
  SynonymTable syn;
  ConceptCounts counts = count_concepts({g1, g2}, syn);
  NormalizeResult r = normalize(g1, syn, 2, counts);
  CHECK(r.graph.edges.size() == 1);
  CHECK(r.graph.edges[0].predicate == "on");
  CHECK(r.report.removed_edges == 1);
}

TEST_CASE("normalize: identity when all concepts frequent") {
  std::istringstream in(kTwoObjectScene);
  SceneGraph g = load_scene_graphs(in)[0];
  SynonymTable syn;
  ConceptCounts counts = count_concepts({g}, syn);
  NormalizeResult r = normalize(g, syn, 1, counts);
  CHECK(r.graph == g);
  CHECK(r.report == NormalizationReport{});
}

TEST_CASE("normalize: idempotent") {
  std::istringstream in(kTwoObjectScene);
  SceneGraph g = load_scene_graphs(in)[0];
  SynonymTable syn(std::map<std::string, std::string>{{"kitty", "cat"}});
  ConceptCounts counts = count_concepts({g}, syn);
  NormalizeResult once = normalize(g, syn, 1, counts);
  NormalizeResult twice = normalize(once.graph, syn, 1, counts);
  CHECK(once.graph == twice.graph);
}

TEST_CASE("merge_duplicate_boxes: same-name overlap merges and re-points edges") {
  SceneGraph g = two_cat_graph(5, 5);  // IoU ~ 0.82
  SceneGraph m = merge_duplicate_boxes(g, 0.7);
  REQUIRE(m.objects.size() == 2);
  const ObjectNode& cat = m.objects[0];
  CHECK(cat.id == 1);  // lowest id survives
  CHECK(cat.name == "cat");
  CHECK(cat.attributes == std::vector<std::string>{"black", "white"});  // attribute union
  CHECK(cat.box == union_box({0, 0, 100, 100}, {5, 5, 100, 100}));
  REQUIRE(m.edges.size() == 1);
  CHECK(m.edges[0].subject == 1);  // re-pointed from object 2
}

TEST_CASE("merge_duplicate_boxes: below threshold unchanged") {
  SceneGraph g = two_cat_graph(50, 0);  // IoU = 5000/15000 = 1/3
  CHECK(merge_duplicate_boxes(g, 0.7) == g);
}

TEST_CASE("merge_duplicate_boxes: different names never merge") {
  SceneGraph g = two_cat_graph(5, 5);
  g.objects[1].name = "dog";
  CHECK(merge_duplicate_boxes(g, 0.7) == g);
}

TEST_CASE("merge_duplicate_boxes: idempotent and bounded overlap after merge") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    cric::testing::RandomInstance inst = cric::testing::make_random_instance(rng);
    SceneGraph merged = merge_duplicate_boxes(inst.sg, 0.7);
    CHECK(merge_duplicate_boxes(merged, 0.7) == merged);
    for (std::size_t i = 0; i < merged.objects.size(); ++i) {
      for (std::size_t j = i + 1; j < merged.objects.size(); ++j) {
        if (merged.objects[i].name != merged.objects[j].name) continue;
        CHECK(iou(merged.objects[i].box, merged.objects[j].box) <= 0.7);
      }
    }
  }
}

TEST_CASE("synonym table: rejects non-idempotent chains") {
  CHECK_THROWS_AS(SynonymTable(std::map<std::string, std::string>{{"a", "b"}, {"b", "c"}}), ConfigError);
  CHECK_NOTHROW(SynonymTable(std::map<std::string, std::string>{{"a", "b"}, {"b", "b"}}));
}
