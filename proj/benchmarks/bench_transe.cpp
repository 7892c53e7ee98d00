#include <benchmark/benchmark.h>

#include "cric/rng.hpp"
#include "cric/transe.hpp"

using namespace cric;
using namespace cric::transe;

namespace {

KnowledgeGraph random_kg(std::size_t entities, std::size_t triplets) {
  Rng rng(3);
  std::vector<Triplet> rows;
  auto name = [](std::size_t i) { return "e" + std::to_string(i); };
  const char* rels[] = {"IsA", "UsedFor", "HasA"};
  while (rows.size() < triplets) {
    std::size_t h = rng.index(entities), t = rng.index(entities);
    if (h == t) continue;
    rows.push_back({name(h), rels[rng.index(3)], name(t)});
  }
  return KnowledgeGraph(std::move(rows));
}

void BM_TrainEpoch(benchmark::State& state) {
  KnowledgeGraph kg = random_kg(static_cast<std::size_t>(state.range(0)),
                                static_cast<std::size_t>(state.range(0)) * 3);
  TrainConfig cfg;
  cfg.dimension = 50;
  cfg.epochs = 1;
  for (auto _ : state) {
    TrainResult r = train(kg, cfg);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(kg.size()));
}
BENCHMARK(BM_TrainEpoch)->RangeMultiplier(4)->Range(64, 1024);

void BM_PredictTail(benchmark::State& state) {
  KnowledgeGraph kg = random_kg(512, 1536);
  TrainConfig cfg;
  cfg.dimension = 50;
  cfg.epochs = 5;
  TrainResult trained = train(kg, cfg);
  Rng rng(9);
  const auto& entities = trained.table.entity_names();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        predict_tail(trained.table, entities[rng.index(entities.size())], "IsA", 10));
  }
}
BENCHMARK(BM_PredictTail);

}  // namespace
