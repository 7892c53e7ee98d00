#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cric/balancer.hpp"
#include "cric/eval.hpp"
#include "cric/generator.hpp"

namespace cric {

inline constexpr int kDatasetSchemaVersion = 1;

// One JSON object per line, fixed key order, so identical corpora are
// byte-identical. The program is stored as its canonical text lines.
std::string sample_to_jsonl(const QASample& sample);
QASample sample_from_jsonl(const std::string& line, std::size_t lineno);

void write_corpus(const std::vector<QASample>& samples, std::ostream& out);
std::vector<QASample> read_corpus(std::istream& in);
std::vector<QASample> read_corpus_file(const std::string& path);

// Prediction file: JSONL of {sample_id, answer, steps?, program?}.
std::vector<PredictionRecord> read_predictions(std::istream& in);
std::vector<PredictionRecord> read_predictions_file(const std::string& path);
void write_predictions(const std::vector<PredictionRecord>& predictions, std::ostream& out);

std::string generation_report_to_json(const GenerationReport& report);
std::string balance_report_to_json(const BalanceReport& report);
std::string stats_to_json(const CorpusStats& stats);

}  // namespace cric
