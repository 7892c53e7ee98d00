#include <benchmark/benchmark.h>

#include <sstream>

#include "cric/generator.hpp"
#include "cric/knowledge_graph.hpp"
#include "test_support.hpp"

using namespace cric;

namespace {

struct GenFixture {
  std::vector<SceneGraph> graphs;
  KnowledgeGraph kg;
  ComponentLibrary templates;
  GeneratorContext ctx;

  GenFixture() {
    std::istringstream scenes(cric::testing::desk_scene_graphs_json(8, 5));
    graphs = load_scene_graphs(scenes);
    kg = build_category_closure(
             load_triplets_file(cric::testing::data_file("triplets.tsv"),
                                default_relation_whitelist())
                 .kg,
             2)
             .kg;
    templates = ComponentLibrary::load_file(cric::testing::data_file("templates.json"));
    ctx = make_context(graphs, kg, templates, GeneratorOptions{});
  }
};

void BM_GenerateSample(benchmark::State& state) {
  static GenFixture fixture;
  Rng rng(42);
  std::size_t emitted = 0;
  for (auto _ : state) {
    SampleResult r = generate_sample(fixture.graphs[0], fixture.ctx, rng);
    emitted += std::holds_alternative<QASample>(r) ? 1 : 0;
    benchmark::DoNotOptimize(r);
  }
  state.counters["emitted"] = static_cast<double>(emitted);
}
BENCHMARK(BM_GenerateSample);

void BM_GenerateCorpusPerImage(benchmark::State& state) {
  static GenFixture fixture;
  const std::size_t quota = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    CorpusResult r = generate_corpus(fixture.graphs, fixture.ctx, quota, 11);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(quota * fixture.graphs.size()));
}
BENCHMARK(BM_GenerateCorpusPerImage)->Arg(4)->Arg(16);

}  // namespace
