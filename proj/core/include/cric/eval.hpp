#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cric/generator.hpp"

namespace cric {

enum class SplitKind : std::uint8_t { Train, Val, Test };

std::string_view to_string(SplitKind s);
std::optional<SplitKind> parse_split_kind(std::string_view s);

// Image-level partition: 60/20/20 by image count, floor on val/test with the
// remainder assigned to train.
struct Split {
  std::map<std::string, SplitKind> assignment;

  std::size_t count(SplitKind k) const;
};

Split split_by_image(const std::vector<std::string>& image_ids, std::uint64_t seed);

// One model output per sample; per-step predictions and predicted programs
// are optional and enable the diagnostic metrics.
struct PredictionRecord {
  std::string sample_id;
  std::string answer;
  std::vector<StepValue> steps;
  std::optional<Program> program;
};

struct AccuracyRow {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
};

struct AccuracyTable {
  AccuracyRow overall;
  std::map<std::string, AccuracyRow> by_type;  // question type name -> row
};

// Exact string match after canonical rendering; missing predictions count
// as wrong. Throws InputError on an empty prediction set or an id matching
// no sample.
AccuracyTable answer_accuracy(const std::vector<QASample>& samples,
                              const std::vector<PredictionRecord>& predictions);

// Multi-label grounding score for one ObjectSet step: the fraction of scene
// objects whose predicted membership equals the ground truth, i.e.
// 1 - hamming distance / n. `universe` lists all object ids of the image.
double grounding_accuracy(const std::vector<ObjectId>& universe,
                          const std::vector<ObjectId>& truth_members,
                          const std::vector<ObjectId>& predicted_members);

struct ProgramAccuracy {
  double function_name_per_step = 0.0;  // micro-averaged over steps
  double text_input_per_step = 0.0;
  double function_name_per_question = 0.0;  // all steps correct
  double text_input_per_question = 0.0;
};

// Per-step exact match over function names and over text-arg tuples.
// Length mismatches score zero for every unmatched step of the longer side.
ProgramAccuracy program_accuracy(const std::vector<QASample>& samples,
                                 const std::vector<PredictionRecord>& predictions);

struct CorpusStats {
  std::size_t samples = 0;
  double avg_question_words = 0.0;
  double avg_program_length = 0.0;
  std::map<std::string, std::size_t> function_distribution;       // per step
  std::map<std::string, std::size_t> question_type_distribution;  // per sample
  std::map<std::size_t, std::size_t> program_length_distribution; // length -> samples
};

CorpusStats corpus_stats(const std::vector<QASample>& samples);

}  // namespace cric
