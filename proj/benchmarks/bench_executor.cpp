#include <benchmark/benchmark.h>

#include "cric/executor.hpp"
#include "cric/program_text.hpp"
#include "cric/rng.hpp"

using namespace cric;

namespace {

// Synthetic scene with n objects in a name pool of 8 and a ring of edges.
SceneGraph scene_of(std::size_t n) {
  const char* names[] = {"cat", "dog", "cup", "stove", "table", "chair", "pot", "bowl"};
  const char* attrs[] = {"black", "white", "red", "blue"};
  Rng rng(7);
  SceneGraph sg;
  sg.image_id = "bench";
  for (std::size_t i = 0; i < n; ++i) {
    ObjectNode o;
    o.id = static_cast<ObjectId>(i + 1);
    o.name = names[rng.index(8)];
    o.attributes = {attrs[rng.index(4)]};
    o.box = {static_cast<double>(10 * i), 0, 8, 8};
    sg.objects.push_back(std::move(o));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sg.edges.push_back({static_cast<ObjectId>(i + 1), "next to", static_cast<ObjectId>(i + 2)});
  }
  return sg;
}

KnowledgeGraph bench_kg() {
  return build_category_closure(KnowledgeGraph({{"cat", "IsA", "animal"},
                                                {"dog", "IsA", "animal"},
                                                {"stove", "UsedFor", "cooking"},
                                                {"black", "IsA", "color"},
                                                {"white", "IsA", "color"},
                                                {"red", "IsA", "color"},
                                                {"blue", "IsA", "color"}}),
                                2).kg;
}

const char* kChain =
    "0: Initial\n"
    "1: Find[0] object=\"cat\"\n"
    "2: RelateReverse[1] predicate=\"next to\"\n"
    "3: GroundKG[2] relation=\"IsA\" tail=\"animal\"\n"
    "4: Count[3]\n";

void BM_Execute(benchmark::State& state) {
  SceneGraph sg = scene_of(static_cast<std::size_t>(state.range(0)));
  KnowledgeGraph kg = bench_kg();
  Program p = parse_program(kChain);
  for (auto _ : state) {
    ExecResult r = execute(p, sg, kg, 2);
    benchmark::DoNotOptimize(r);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Execute)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_BruteForceReference(benchmark::State& state) {
  SceneGraph sg = scene_of(static_cast<std::size_t>(state.range(0)));
  KnowledgeGraph kg = bench_kg();
  Program p = parse_program(kChain);
  for (auto _ : state) {
    ExecResult r = brute_force_reference(p, sg, kg, 2);
    benchmark::DoNotOptimize(r);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BruteForceReference)->RangeMultiplier(4)->Range(8, 128)->Complexity();

}  // namespace
