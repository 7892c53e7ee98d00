#include <doctest.h>

#include <sstream>

#include "cric/errors.hpp"
#include "cric/knowledge_graph.hpp"
#include "test_support.hpp"

using namespace cric;

TEST_CASE("load_triplets: whitelist filtering drops and counts") {
  std::istringstream in("cat\tIsA\tfeline\nperson\tDesires\town a house\n");
  KgLoadResult r = load_triplets(in, default_relation_whitelist());
  CHECK(r.kg.size() == 1);
  CHECK(r.report.dropped_relation == 1);
  CHECK(r.kg.has("cat", "IsA", "feline"));
}

TEST_CASE("load_triplets: empty file yields empty graph") {
  std::istringstream in("");
  KgLoadResult r = load_triplets(in, default_relation_whitelist());
  CHECK(r.kg.empty());
}

TEST_CASE("load_triplets: duplicate rows collapse to one triplet") {
  std::istringstream in("cat\tIsA\tfeline\ncat\tIsA\tfeline\n");
  KgLoadResult r = load_triplets(in, default_relation_whitelist());
  CHECK(r.kg.size() == 1);
  CHECK(r.report.duplicates == 1);
}

TEST_CASE("load_triplets: malformed row names the row number") {
  std::istringstream in("cat\tIsA\tfeline\ncat only\n");
  CHECK_THROWS_WITH_AS(load_triplets(in, default_relation_whitelist()), doctest::Contains("2"),
                       ParseError);
}

TEST_CASE("load_triplets: accepts the JSON record shape") {
  std::istringstream in(R"([{"head": "cat", "relation": "IsA", "tail": "feline"}])");
  KgLoadResult r = load_triplets(in, default_relation_whitelist());
  CHECK(r.kg.has("cat", "IsA", "feline"));
}

TEST_CASE("merge_entities: rewrites and collapses") {
  KnowledgeGraph kg({{"calculator", "UsedFor", "making calculations"}});
  KnowledgeGraph merged = merge_entities(kg, {{"making calculations", "calculate"}});
  CHECK(merged.has("calculator", "UsedFor", "calculate"));
  CHECK_FALSE(merged.has("calculator", "UsedFor", "making calculations"));

  SUBCASE("empty map leaves the graph unchanged") {
    CHECK(merge_entities(kg, {}).triplets() == kg.triplets());
  }
  SUBCASE("triplets that become identical collapse") {
    KnowledgeGraph two({{"calculator", "UsedFor", "making calculations"},
                        {"calculator", "UsedFor", "calculate"}});
    CHECK(merge_entities(two, {{"making calculations", "calculate"}}).size() == 1);
  }
  SUBCASE("cyclic map is a configuration error") {
    CHECK_THROWS_AS(merge_entities(kg, {{"a", "b"}, {"b", "a"}}), ConfigError);
  }
}

TEST_CASE("build_category_closure: multi-hop reachability") {
  KnowledgeGraph kg({{"cat", "IsA", "feline"}, {"feline", "IsA", "animal"}});
  SUBCASE("two hops reach both levels") {
    ClosureResult r = build_category_closure(kg, 2);
    const auto& cats = r.kg.categories().at("cat");
    CHECK(cats.count("feline"));
    CHECK(cats.count("animal"));
  }
  SUBCASE("one hop cuts the chain") {
    ClosureResult r = build_category_closure(kg, 1);
    const auto& cats = r.kg.categories().at("cat");
    CHECK(cats == std::set<EntityName>{"feline"});
  }
  SUBCASE("entities without IsA edges are flagged") {
    ClosureResult r = build_category_closure(kg, 2);
    CHECK(std::find(r.uncategorized.begin(), r.uncategorized.end(), "animal") !=
          r.uncategorized.end());
  }
}

TEST_CASE("build_category_closure: terminates on cycles and reaches a fixed point") {
  KnowledgeGraph kg({{"a", "IsA", "b"}, {"b", "IsA", "c"}, {"c", "IsA", "a"}});
  ClosureResult at3 = build_category_closure(kg, 3);
  ClosureResult at4 = build_category_closure(kg, 4);
  CHECK(at3.kg.categories() == at4.kg.categories());
  CHECK(at3.kg.categories().at("a") == std::set<EntityName>{"a", "b", "c"});
}

TEST_CASE("entails: head lifting within the hop bound") {
  KnowledgeGraph kg({{"fruit", "HasProperty", "good for health"}, {"orange", "IsA", "fruit"}});
  CHECK(kg.entails("orange", "HasProperty", "good for health", 2));
  CHECK_FALSE(kg.entails("orange", "HasProperty", "good for health", 1));
  CHECK(kg.entails("fruit", "HasProperty", "good for health", 1));
}

TEST_CASE("entails: no invented facts") {
  KnowledgeGraph kg({{"cat", "IsA", "feline"}});
  CHECK_FALSE(kg.entails("cat", "IsA", "canid", 2));
  CHECK_FALSE(KnowledgeGraph{}.entails("x", "IsA", "y", 2));
}

TEST_CASE("query_tails: collects and orders tails") {
  KnowledgeGraph kg({{"stove", "UsedFor", "cooking"}});
  CHECK(kg.query_tails("stove", "UsedFor", 2) == std::vector<EntityName>{"cooking"});
  CHECK(kg.query_tails("unknown", "UsedFor", 2).empty());

  KnowledgeGraph two({{"stove", "UsedFor", "cooking"}, {"stove", "UsedFor", "boiling water"}});
  CHECK(two.query_tails("stove", "UsedFor", 2) ==
        std::vector<EntityName>{"boiling water", "cooking"});
}

TEST_CASE("entails properties on random graphs") {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    cric::testing::RandomInstance inst = cric::testing::make_random_instance(rng);
    const KnowledgeGraph& kg = inst.kg;

    for (const Triplet& t : kg.triplets()) {
      // Direct triplets entail at every bound >= 1.
      CHECK(kg.entails(t.head, t.relation, t.tail, 1));
      CHECK(kg.entails(t.head, t.relation, t.tail, 3));
    }

    std::vector<EntityName> entities = kg.entities();
    for (std::size_t i = 0; i + 1 < entities.size(); i += 2) {
      const EntityName& h = entities[i];
      const EntityName& t = entities[i + 1];
      for (const RelationName& r : kg.relations()) {
        // Monotone in the hop bound.
        if (kg.entails(h, r, t, 1)) CHECK(kg.entails(h, r, t, 2));
        if (kg.entails(h, r, t, 2)) CHECK(kg.entails(h, r, t, 3));
      }
    }

    // query_tails equals the entailment set, cross-checked by brute force
    // over every entity.
    for (const RelationName& r : kg.relations()) {
      for (std::size_t i = 0; i < entities.size(); i += 3) {
        std::vector<EntityName> expected;
        for (const EntityName& t : entities) {
          if (kg.entails(entities[i], r, t, 2)) expected.push_back(t);
        }
        CHECK(kg.query_tails(entities[i], r, 2) == expected);
      }
    }
  }
}

TEST_CASE("entail_witness: shortest lift path plus the relation triplet") {
  KnowledgeGraph kg({{"fruit", "HasProperty", "good for health"}, {"orange", "IsA", "fruit"}});
  auto w = kg.entail_witness("orange", "HasProperty", "good for health", 2);
  REQUIRE(w.has_value());
  CHECK(w->size() == 2);
  CHECK(std::find(w->begin(), w->end(), Triplet{"orange", "IsA", "fruit"}) != w->end());
  CHECK_FALSE(kg.entail_witness("orange", "HasProperty", "good for health", 1).has_value());
  auto direct = kg.entail_witness("fruit", "HasProperty", "good for health", 2);
  REQUIRE(direct.has_value());
  CHECK(direct->size() == 1);
}
