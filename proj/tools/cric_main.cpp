// cric: batch front door for the QA synthesis pipeline.
//
//   cric <subcommand> --config PATH [--seed N] [--workers N] [--out DIR]
//
// Subcommands: ingest, generate, balance, split, train-embeddings, stats,
// eval (--predictions PATH), verify [--input PATH].
// CRIC_OUT overrides the configured output directory; an explicit --out
// flag wins over both. Exit codes: 0 ok, 1 validation, 2 verify mismatch,
// 3 I/O.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cric/errors.hpp"
#include "cric/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline config file")->required();
  cmd->add_option("--seed", flags.seed, "override config seed");
  cmd->add_option("--workers", flags.workers, "override config worker count");
  cmd->add_option("--out", flags.out_dir, "override output directory");
}

cric::PipelineConfig resolve(const CommonFlags& flags) {
  cric::PipelineConfig cfg = cric::PipelineConfig::load_file(flags.config_path);
  if (const char* env = std::getenv("CRIC_OUT"); env && *env) cfg.paths.output_dir = env;
  if (flags.out_dir) cfg.paths.output_dir = *flags.out_dir;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.workers) cfg.workers = *flags.workers;
  cfg.validate_ranges();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compositional QA corpus synthesis over scene and knowledge graphs"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string predictions_path;
  std::string verify_input;

  CLI::App* ingest = app.add_subcommand("ingest", "normalize scene graphs, load the KG");
  CLI::App* generate = app.add_subcommand("generate", "synthesize the QA corpus");
  CLI::App* balance = app.add_subcommand("balance", "downsample for balance");
  CLI::App* split = app.add_subcommand("split", "assign images to train/val/test");
  CLI::App* train = app.add_subcommand("train-embeddings", "train translation embeddings");
  CLI::App* stats = app.add_subcommand("stats", "corpus statistics report");
  CLI::App* eval = app.add_subcommand("eval", "score a prediction file");
  CLI::App* verify = app.add_subcommand("verify", "re-execute every sample and compare");

  for (CLI::App* cmd : {ingest, generate, balance, split, train, stats, eval, verify}) {
    add_common(cmd, flags);
  }
  eval->add_option("--predictions", predictions_path, "prediction JSONL file")->required();
  verify->add_option("--input", verify_input, "corpus file (default: corpus.jsonl)");

  CLI11_PARSE(app, argc, argv);

  try {
    cric::PipelineConfig cfg = resolve(flags);
    if (ingest->parsed()) {
      cric::run_ingest(cfg);
    } else if (generate->parsed()) {
      cric::run_generate(cfg);
    } else if (balance->parsed()) {
      cric::run_balance(cfg);
    } else if (split->parsed()) {
      cric::run_split(cfg);
    } else if (train->parsed()) {
      cric::run_train_embeddings(cfg);
    } else if (stats->parsed()) {
      cric::run_stats(cfg);
    } else if (eval->parsed()) {
      cric::run_eval(cfg, predictions_path);
    } else if (verify->parsed()) {
      cric::ExitCode code = cric::run_verify(cfg, verify_input);
      if (code != cric::ExitCode::Ok) {
        std::cerr << "verify: replay mismatches found\n";
        return static_cast<int>(code);
      }
      std::cout << "verify: 0 mismatches\n";
    }
  } catch (const cric::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(cric::ExitCode::Io);
  } catch (const cric::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(cric::ExitCode::Validation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(cric::ExitCode::Validation);
  }
  return static_cast<int>(cric::ExitCode::Ok);
}
