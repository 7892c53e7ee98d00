#include <benchmark/benchmark.h>

#include "cric/knowledge_graph.hpp"
#include "cric/rng.hpp"

using namespace cric;

namespace {

// Random graph with a layered IsA backbone plus fact triplets.
KnowledgeGraph layered_kg(std::size_t n_entities) {
  Rng rng(13);
  std::vector<Triplet> triplets;
  auto name = [](std::size_t i) { return "e" + std::to_string(i); };
  for (std::size_t i = 1; i < n_entities; ++i) {
    triplets.push_back({name(i), "IsA", name(rng.index(i))});
  }
  for (std::size_t i = 0; i < n_entities; ++i) {
    triplets.push_back({name(rng.index(n_entities)), "UsedFor", "use" + std::to_string(i % 50)});
  }
  return build_category_closure(KnowledgeGraph(std::move(triplets)), 2).kg;
}

void BM_Entails(benchmark::State& state) {
  KnowledgeGraph kg = layered_kg(static_cast<std::size_t>(state.range(0)));
  Rng rng(5);
  const auto& entities = kg.entities();
  for (auto _ : state) {
    const EntityName& h = entities[rng.index(entities.size())];
    benchmark::DoNotOptimize(kg.entails(h, "UsedFor", "use7", 2));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Entails)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_QueryTails(benchmark::State& state) {
  KnowledgeGraph kg = layered_kg(static_cast<std::size_t>(state.range(0)));
  Rng rng(5);
  const auto& entities = kg.entities();
  for (auto _ : state) {
    const EntityName& h = entities[rng.index(entities.size())];
    benchmark::DoNotOptimize(kg.query_tails(h, "UsedFor", 2));
  }
}
BENCHMARK(BM_QueryTails)->RangeMultiplier(4)->Range(64, 4096);

void BM_CategoryClosure(benchmark::State& state) {
  KnowledgeGraph kg = layered_kg(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_category_closure(kg, 2));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CategoryClosure)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

}  // namespace
