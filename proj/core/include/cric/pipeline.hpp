#pragma once

#include <string>

#include "cric/config.hpp"

namespace cric {

// Process exit codes shared by the CLI and the pipeline layer.
enum class ExitCode : int {
  Ok = 0,
  Validation = 1,
  VerifyMismatch = 2,
  Io = 3,
};

// Each stage reads its inputs, writes its artifacts under
// cfg.paths.output_dir via atomic temp-file renames, and never mutates its
// inputs. All outputs are byte-deterministic under a fixed config.
//
// Artifacts:
//   ingest  -> normalized_scene_graphs.json, knowledge_graph.tsv,
//              ingest_report.json
//   generate-> corpus.jsonl, generation_report.json
//   balance -> balanced.jsonl, balance_report.json
//   split   -> split.tsv
//   train   -> embeddings.txt, loss_curve.tsv
//   stats   -> stats.json (balanced.jsonl when present, else corpus.jsonl)
//   eval    -> eval_report.json
//   verify  -> verify_report.json (exit 2 on any replay mismatch)
void run_ingest(const PipelineConfig& cfg);
void run_generate(const PipelineConfig& cfg);
void run_balance(const PipelineConfig& cfg);
void run_split(const PipelineConfig& cfg);
void run_train_embeddings(const PipelineConfig& cfg);
void run_stats(const PipelineConfig& cfg);
void run_eval(const PipelineConfig& cfg, const std::string& predictions_path);
ExitCode run_verify(const PipelineConfig& cfg, const std::string& corpus_path = "");

// Write-then-rename so interrupted runs never leave half-written artifacts.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace cric
