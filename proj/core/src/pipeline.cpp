#include "cric/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cric/balancer.hpp"
#include "cric/dataset_io.hpp"
#include "cric/errors.hpp"
#include "cric/eval.hpp"
#include "cric/generator.hpp"
#include "cric/text_util.hpp"

namespace cric {

namespace fs = std::filesystem;

void atomic_write_file(const std::string& path, const std::string& content) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

namespace {

std::string out_path(const PipelineConfig& cfg, const char* name) {
  return (fs::path(cfg.paths.output_dir) / name).string();
}

std::string require_artifact(const PipelineConfig& cfg, const char* name, const char* producer) {
  std::string p = out_path(cfg, name);
  if (!fs::exists(p)) {
    throw IoError(std::string(name) + " not found in " + cfg.paths.output_dir + "; run '" +
                  producer + "' first");
  }
  return p;
}

RelationWhitelist whitelist_of(const PipelineConfig& cfg) {
  if (cfg.paths.whitelist.empty()) return default_relation_whitelist();
  return load_whitelist_file(cfg.paths.whitelist);
}

KnowledgeGraph load_pipeline_kg(const PipelineConfig& cfg) {
  std::string path = require_artifact(cfg, "knowledge_graph.tsv", "ingest");
  // The ingest output is already merged and filtered; reload with the same
  // whitelist and rebuild the closure.
  KgLoadResult r = load_triplets_file(path, whitelist_of(cfg));
  return build_category_closure(r.kg, cfg.hop_bound).kg;
}

std::vector<SceneGraph> load_normalized_graphs(const PipelineConfig& cfg) {
  return load_scene_graphs_file(require_artifact(cfg, "normalized_scene_graphs.json", "ingest"));
}

}  // namespace

void run_ingest(const PipelineConfig& cfg) {
  cfg.require_inputs({"scene_graphs", "triplets"});
  if (!cfg.paths.synonyms.empty()) cfg.require_inputs({"synonyms"});
  if (!cfg.paths.entity_merge.empty()) cfg.require_inputs({"entity_merge"});
  if (!cfg.paths.whitelist.empty()) cfg.require_inputs({"whitelist"});

  std::vector<SceneGraph> raw = load_scene_graphs_file(cfg.paths.scene_graphs);
  SynonymTable synonyms = cfg.paths.synonyms.empty() ? SynonymTable()
                                                     : SynonymTable::load_file(cfg.paths.synonyms);
  ConceptCounts counts = count_concepts(raw, synonyms);

  NormalizationReport norm_totals;
  std::size_t objects_before = 0, objects_after = 0;
  std::vector<SceneGraph> graphs;
  graphs.reserve(raw.size());
  for (const SceneGraph& g : raw) {
    objects_before += g.objects.size();
    NormalizeResult n = normalize(g, synonyms, cfg.vocab_min_count, counts);
    norm_totals.renamed_concepts += n.report.renamed_concepts;
    norm_totals.removed_objects += n.report.removed_objects;
    norm_totals.removed_attributes += n.report.removed_attributes;
    norm_totals.removed_edges += n.report.removed_edges;
    SceneGraph merged = merge_duplicate_boxes(n.graph, cfg.iou_threshold);
    objects_after += merged.objects.size();
    graphs.push_back(std::move(merged));
  }

  KgLoadResult kg_load = load_triplets_file(cfg.paths.triplets, whitelist_of(cfg));
  KnowledgeGraph kg = kg_load.kg;
  if (!cfg.paths.entity_merge.empty()) {
    kg = merge_entities(kg, load_merge_map_file(cfg.paths.entity_merge));
  }
  ClosureResult closure = build_category_closure(kg, cfg.hop_bound);

  std::ostringstream graphs_out;
  save_scene_graphs(graphs, graphs_out);
  atomic_write_file(out_path(cfg, "normalized_scene_graphs.json"), graphs_out.str());

  std::ostringstream kg_out;
  save_triplets(closure.kg, kg_out);
  atomic_write_file(out_path(cfg, "knowledge_graph.tsv"), kg_out.str());

  nlohmann::ordered_json report;
  report["images"] = graphs.size();
  report["objects_before_merge"] = objects_before;
  report["objects_after_merge"] = objects_after;
  report["renamed_concepts"] = norm_totals.renamed_concepts;
  report["removed_objects"] = norm_totals.removed_objects;
  report["removed_attributes"] = norm_totals.removed_attributes;
  report["removed_edges"] = norm_totals.removed_edges;
  report["triplets_accepted"] = kg_load.report.accepted;
  report["triplets_after_merge"] = closure.kg.size();
  report["triplets_dropped_relation"] = kg_load.report.dropped_relation;
  report["triplets_dropped_invalid"] = kg_load.report.dropped_invalid;
  report["triplet_duplicates"] = kg_load.report.duplicates;
  report["uncategorized_entities"] = closure.uncategorized;
  atomic_write_file(out_path(cfg, "ingest_report.json"), report.dump(2) + "\n");
}

void run_generate(const PipelineConfig& cfg) {
  cfg.require_inputs({"templates"});
  std::vector<SceneGraph> graphs = load_normalized_graphs(cfg);
  KnowledgeGraph kg = load_pipeline_kg(cfg);
  ComponentLibrary templates = ComponentLibrary::load_file(cfg.paths.templates);

  GeneratorOptions options;
  options.hop_bound = cfg.hop_bound;
  options.max_decorations = cfg.max_decorations;
  options.redundant_decoration_prob = cfg.redundant_decoration_prob;
  options.corruption_prob = cfg.corruption_prob;
  GeneratorContext ctx = make_context(graphs, kg, templates, options);

  CorpusResult corpus = generate_corpus(graphs, ctx, cfg.quota, cfg.seed, cfg.workers);

  std::ostringstream out;
  write_corpus(corpus.samples, out);
  atomic_write_file(out_path(cfg, "corpus.jsonl"), out.str());
  atomic_write_file(out_path(cfg, "generation_report.json"),
                    generation_report_to_json(corpus.report));
}

void run_balance(const PipelineConfig& cfg) {
  std::vector<QASample> samples =
      read_corpus_file(require_artifact(cfg, "corpus.jsonl", "generate"));
  BalanceResult balanced = downsample(samples, cfg.max_share, cfg.seed);

  std::ostringstream out;
  write_corpus(balanced.retained, out);
  atomic_write_file(out_path(cfg, "balanced.jsonl"), out.str());
  atomic_write_file(out_path(cfg, "balance_report.json"),
                    balance_report_to_json(balanced.report));
}

void run_split(const PipelineConfig& cfg) {
  std::vector<SceneGraph> graphs = load_normalized_graphs(cfg);
  std::vector<std::string> ids;
  ids.reserve(graphs.size());
  for (const SceneGraph& g : graphs) ids.push_back(g.image_id);
  Split split = split_by_image(ids, cfg.seed);

  std::ostringstream out;
  for (const auto& [id, kind] : split.assignment) {
    out << id << '\t' << to_string(kind) << '\n';
  }
  atomic_write_file(out_path(cfg, "split.tsv"), out.str());
}

void run_train_embeddings(const PipelineConfig& cfg) {
  KnowledgeGraph kg = load_pipeline_kg(cfg);
  transe::TrainResult result = transe::train(kg, cfg.transe);

  std::ostringstream table;
  result.table.save(table);
  atomic_write_file(out_path(cfg, "embeddings.txt"), table.str());

  std::ostringstream curve;
  for (std::size_t i = 0; i < result.loss_curve.size(); ++i) {
    curve << i << '\t' << format_double17(result.loss_curve[i]) << '\n';
  }
  atomic_write_file(out_path(cfg, "loss_curve.tsv"), curve.str());
}

void run_stats(const PipelineConfig& cfg) {
  std::string input = out_path(cfg, "balanced.jsonl");
  if (!fs::exists(input)) input = require_artifact(cfg, "corpus.jsonl", "generate");
  CorpusStats stats = corpus_stats(read_corpus_file(input));
  atomic_write_file(out_path(cfg, "stats.json"), stats_to_json(stats));
}

void run_eval(const PipelineConfig& cfg, const std::string& predictions_path) {
  std::string input = out_path(cfg, "balanced.jsonl");
  if (!fs::exists(input)) input = require_artifact(cfg, "corpus.jsonl", "generate");
  std::vector<QASample> samples = read_corpus_file(input);
  std::vector<PredictionRecord> predictions = read_predictions_file(predictions_path);

  AccuracyTable answers = answer_accuracy(samples, predictions);
  ProgramAccuracy programs = program_accuracy(samples, predictions);

  // Grounding diagnostics over predicted ObjectSet steps, averaged per
  // function, against the full-image object universe.
  std::map<std::string, std::vector<ObjectId>> universes;
  for (const SceneGraph& g : load_normalized_graphs(cfg)) {
    std::vector<ObjectId> ids;
    for (const ObjectNode& o : g.objects) ids.push_back(o.id);
    universes[g.image_id] = std::move(ids);
  }
  std::map<std::string, const QASample*> by_id;
  for (const QASample& s : samples) by_id[s.sample_id] = &s;
  std::map<std::string, std::pair<double, std::size_t>> grounding;  // fn -> (sum, n)
  for (const PredictionRecord& p : predictions) {
    if (p.steps.empty()) continue;
    auto sit = by_id.find(p.sample_id);
    if (sit == by_id.end()) continue;
    const QASample& s = *sit->second;
    if (p.steps.size() != s.program.size()) {
      throw InputError("eval: per-step predictions for '" + p.sample_id +
                       "' do not align with the program");
    }
    auto uit = universes.find(s.image_id);
    if (uit == universes.end()) continue;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      if (s.trace.steps[i].kind != ValueKind::ObjectSet) continue;
      if (p.steps[i].kind != ValueKind::ObjectSet) continue;
      double acc = grounding_accuracy(uit->second, s.trace.steps[i].object_ids,
                                      p.steps[i].object_ids);
      auto& [sum, n] = grounding[std::string(to_string(s.program.steps[i].function))];
      sum += acc;
      n += 1;
    }
  }

  nlohmann::ordered_json j;
  j["samples"] = samples.size();
  j["answer_accuracy"] = {{"overall", answers.overall.accuracy}};
  for (const auto& [type, row] : answers.by_type) {
    j["answer_accuracy"][type] = row.accuracy;
  }
  j["program_accuracy"] = {
      {"function_name_per_step", programs.function_name_per_step},
      {"text_input_per_step", programs.text_input_per_step},
      {"function_name_per_question", programs.function_name_per_question},
      {"text_input_per_question", programs.text_input_per_question},
  };
  j["grounding_accuracy"] = nlohmann::ordered_json::object();
  for (const auto& [fn, acc] : grounding) {
    j["grounding_accuracy"][fn] = acc.second ? acc.first / acc.second : 0.0;
  }
  atomic_write_file(out_path(cfg, "eval_report.json"), j.dump(2) + "\n");
}

ExitCode run_verify(const PipelineConfig& cfg, const std::string& corpus_path) {
  std::string input = corpus_path;
  if (input.empty()) input = require_artifact(cfg, "corpus.jsonl", "generate");
  std::vector<QASample> samples = read_corpus_file(input);
  std::vector<SceneGraph> graphs = load_normalized_graphs(cfg);
  KnowledgeGraph kg = load_pipeline_kg(cfg);

  std::map<std::string, const SceneGraph*> by_image;
  for (const SceneGraph& g : graphs) by_image[g.image_id] = &g;

  std::vector<const QASample*> ordered;
  ordered.reserve(samples.size());
  for (const QASample& s : samples) ordered.push_back(&s);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> mismatches{0};
  const std::size_t hop = cfg.hop_bound;
  auto work = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= ordered.size()) return;
      const QASample& s = *ordered[i];
      auto it = by_image.find(s.image_id);
      if (it == by_image.end()) {
        mismatches.fetch_add(1);
        continue;
      }
      ExecResult r = execute(s.program, *it->second, kg, hop);
      if (!exec_ok(r) || exec_trace(r) != s.trace || exec_trace(r).answer != s.answer) {
        mismatches.fetch_add(1);
      }
    }
  };
  if (cfg.workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < cfg.workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  nlohmann::ordered_json j;
  j["samples"] = samples.size();
  j["mismatches"] = mismatches.load();
  atomic_write_file(out_path(cfg, "verify_report.json"), j.dump(2) + "\n");
  return mismatches.load() == 0 ? ExitCode::Ok : ExitCode::VerifyMismatch;
}

}  // namespace cric
