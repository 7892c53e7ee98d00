#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cric/config.hpp"
#include "cric/dataset_io.hpp"
#include "cric/errors.hpp"
#include "cric/pipeline.hpp"
#include "test_support.hpp"

using namespace cric;
using cric::testing::data_file;
using cric::testing::fresh_dir;
using cric::testing::read_file;
using cric::testing::write_file;

namespace {

PipelineConfig fixture_config(const std::string& out_dir, std::size_t quota = 6) {
  PipelineConfig cfg;
  cfg.paths.scene_graphs = data_file("scene_graphs.json");
  cfg.paths.triplets = data_file("triplets.tsv");
  cfg.paths.synonyms = data_file("synonyms.tsv");
  cfg.paths.entity_merge = data_file("entity_merge.tsv");
  cfg.paths.whitelist = data_file("whitelist.txt");
  cfg.paths.templates = data_file("templates.json");
  cfg.paths.output_dir = out_dir;
  cfg.seed = 7;
  cfg.vocab_min_count = 1;
  cfg.quota = quota;
  return cfg;
}

void run_chain(const PipelineConfig& cfg) {
  run_ingest(cfg);
  run_generate(cfg);
  run_balance(cfg);
  run_split(cfg);
  run_stats(cfg);
}

}  // namespace

TEST_CASE("pipeline: full run over the shipped fixtures, verify exits clean") {
  PipelineConfig cfg = fixture_config(fresh_dir("pipe_full"));
  run_chain(cfg);
  run_train_embeddings(cfg);

  for (const char* artifact :
       {"normalized_scene_graphs.json", "knowledge_graph.tsv", "ingest_report.json",
        "corpus.jsonl", "generation_report.json", "balanced.jsonl", "balance_report.json",
        "split.tsv", "stats.json", "embeddings.txt", "loss_curve.tsv"}) {
    CAPTURE(artifact);
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.paths.output_dir) / artifact));
  }
  CHECK(run_verify(cfg) == ExitCode::Ok);

  // Ground truth fed back as predictions scores 1.0 across the board.
  std::vector<QASample> corpus =
      read_corpus_file((std::filesystem::path(cfg.paths.output_dir) / "balanced.jsonl").string());
  REQUIRE_FALSE(corpus.empty());
  std::vector<PredictionRecord> preds;
  for (const QASample& s : corpus) {
    preds.push_back({s.sample_id, s.answer, s.trace.steps, s.program});
  }
  std::ostringstream pred_stream;
  write_predictions(preds, pred_stream);
  std::string pred_path =
      (std::filesystem::path(cfg.paths.output_dir) / "predictions.jsonl").string();
  write_file(pred_path, pred_stream.str());
  run_eval(cfg, pred_path);
  std::string report =
      read_file((std::filesystem::path(cfg.paths.output_dir) / "eval_report.json").string());
  CHECK(report.find("\"overall\": 1.0") != std::string::npos);
  CHECK(report.find("\"function_name_per_step\": 1.0") != std::string::npos);
}

TEST_CASE("pipeline: tampered corpus fails verification") {
  PipelineConfig cfg = fixture_config(fresh_dir("pipe_tamper"), 4);
  run_ingest(cfg);
  run_generate(cfg);
  std::string corpus_path =
      (std::filesystem::path(cfg.paths.output_dir) / "corpus.jsonl").string();
  std::vector<QASample> samples = read_corpus_file(corpus_path);
  REQUIRE_FALSE(samples.empty());
  samples[0].answer = samples[0].answer == "yes" ? "no" : "yes";
  std::ostringstream out;
  write_corpus(samples, out);
  write_file(corpus_path, out.str());
  CHECK(run_verify(cfg) == ExitCode::VerifyMismatch);
}

TEST_CASE("pipeline: byte-identical artifacts across reruns") {
  PipelineConfig a = fixture_config(fresh_dir("pipe_det_a"), 5);
  PipelineConfig b = fixture_config(fresh_dir("pipe_det_b"), 5);
  run_chain(a);
  run_chain(b);
  for (const char* artifact : {"normalized_scene_graphs.json", "knowledge_graph.tsv",
                               "corpus.jsonl", "balanced.jsonl", "split.tsv", "stats.json"}) {
    CAPTURE(artifact);
    CHECK(read_file((std::filesystem::path(a.paths.output_dir) / artifact).string()) ==
          read_file((std::filesystem::path(b.paths.output_dir) / artifact).string()));
  }
}

TEST_CASE("pipeline: worker count does not change the corpus bytes") {
  PipelineConfig a = fixture_config(fresh_dir("pipe_w1"), 5);
  PipelineConfig b = fixture_config(fresh_dir("pipe_w4"), 5);
  b.workers = 4;
  run_ingest(a);
  run_generate(a);
  run_ingest(b);
  run_generate(b);
  CHECK(read_file((std::filesystem::path(a.paths.output_dir) / "corpus.jsonl").string()) ==
        read_file((std::filesystem::path(b.paths.output_dir) / "corpus.jsonl").string()));
}

TEST_CASE("config: range validation names the field") {
  std::string dir = fresh_dir("cfg");
  std::string path = dir + "/bad.json";
  write_file(path, R"({"schema_version": 1, "quota": 0})");
  CHECK_THROWS_WITH_AS(PipelineConfig::load_file(path), doctest::Contains("quota"), ConfigError);

  write_file(path, R"({"schema_version": 1, "iou_threshold": 1.5})");
  CHECK_THROWS_WITH_AS(PipelineConfig::load_file(path), doctest::Contains("iou_threshold"),
                       ConfigError);

  write_file(path, R"({"schema_version": 3})");
  CHECK_THROWS_WITH_AS(PipelineConfig::load_file(path), doctest::Contains("schema_version"),
                       ConfigError);
}

TEST_CASE("config: missing input paths are named") {
  PipelineConfig cfg = fixture_config(fresh_dir("cfg_missing"));
  cfg.paths.scene_graphs = "nowhere/missing.json";
  CHECK_THROWS_WITH_AS(run_ingest(cfg), doctest::Contains("scene_graphs"), ConfigError);
}

TEST_CASE("atomic_write_file: overwrites completely, never appends") {
  std::string dir = fresh_dir("atomic");
  std::string path = dir + "/x.txt";
  atomic_write_file(path, "first version, long content\n");
  atomic_write_file(path, "short\n");
  CHECK(read_file(path) == "short\n");
}
