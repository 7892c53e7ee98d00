#include "cric/eval.hpp"

#include <algorithm>
#include <set>

#include "cric/errors.hpp"
#include "cric/text_util.hpp"

namespace cric {

std::string_view to_string(SplitKind s) {
  switch (s) {
    case SplitKind::Train: return "train";
    case SplitKind::Val: return "val";
    case SplitKind::Test: return "test";
  }
  return "train";
}

std::optional<SplitKind> parse_split_kind(std::string_view s) {
  if (s == "train") return SplitKind::Train;
  if (s == "val") return SplitKind::Val;
  if (s == "test") return SplitKind::Test;
  return std::nullopt;
}

std::size_t Split::count(SplitKind k) const {
  std::size_t n = 0;
  for (const auto& [id, kind] : assignment) n += kind == k ? 1 : 0;
  return n;
}

Split split_by_image(const std::vector<std::string>& image_ids, std::uint64_t seed) {
  if (image_ids.empty()) throw PreconditionError("split_by_image: empty id list");
  std::vector<std::string> ids(image_ids.begin(), image_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  Rng rng(seed);
  rng.shuffle(ids);

  const std::size_t n = ids.size();
  const std::size_t n_val = n / 5;
  const std::size_t n_test = n / 5;
  const std::size_t n_train = n - n_val - n_test;

  Split split;
  for (std::size_t i = 0; i < n; ++i) {
    SplitKind kind = i < n_train              ? SplitKind::Train
                     : i < n_train + n_val    ? SplitKind::Val
                                              : SplitKind::Test;
    split.assignment[ids[i]] = kind;
  }
  return split;
}

namespace {

std::string canonical_answer(const std::string& s) { return canonical_concept(s); }

}  // namespace

AccuracyTable answer_accuracy(const std::vector<QASample>& samples,
                              const std::vector<PredictionRecord>& predictions) {
  if (predictions.empty()) throw InputError("answer_accuracy: empty prediction set");
  std::map<std::string, const QASample*> by_id;
  for (const QASample& s : samples) by_id[s.sample_id] = &s;

  std::map<std::string, std::string> predicted;
  for (const PredictionRecord& p : predictions) {
    if (!by_id.count(p.sample_id)) {
      throw InputError("answer_accuracy: prediction id '" + p.sample_id +
                       "' matches no sample");
    }
    predicted[p.sample_id] = p.answer;
  }

  AccuracyTable table;
  for (const QASample& s : samples) {
    const std::string type(to_string(s.question_type));
    AccuracyRow& row = table.by_type[type];
    row.total++;
    table.overall.total++;
    auto it = predicted.find(s.sample_id);
    const bool correct =
        it != predicted.end() && canonical_answer(it->second) == canonical_answer(s.answer);
    if (correct) {
      row.correct++;
      table.overall.correct++;
    }
  }
  auto finish = [](AccuracyRow& r) {
    r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(r.correct) / r.total;
  };
  finish(table.overall);
  for (auto& [type, row] : table.by_type) finish(row);
  return table;
}

double grounding_accuracy(const std::vector<ObjectId>& universe,
                          const std::vector<ObjectId>& truth_members,
                          const std::vector<ObjectId>& predicted_members) {
  if (universe.empty()) throw InputError("grounding_accuracy: empty object universe");
  std::set<ObjectId> uni(universe.begin(), universe.end());
  std::set<ObjectId> truth(truth_members.begin(), truth_members.end());
  std::set<ObjectId> pred(predicted_members.begin(), predicted_members.end());
  for (ObjectId id : truth) {
    if (!uni.count(id)) throw InputError("grounding_accuracy: truth id outside universe");
  }
  for (ObjectId id : pred) {
    if (!uni.count(id)) throw InputError("grounding_accuracy: predicted id outside universe");
  }
  std::size_t agree = 0;
  for (ObjectId id : uni) {
    if (truth.count(id) == pred.count(id)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(uni.size());
}

ProgramAccuracy program_accuracy(const std::vector<QASample>& samples,
                                 const std::vector<PredictionRecord>& predictions) {
  std::map<std::string, const Program*> predicted;
  for (const PredictionRecord& p : predictions) {
    if (p.program) predicted[p.sample_id] = &*p.program;
  }

  std::size_t steps_total = 0, names_correct = 0, texts_correct = 0;
  std::size_t q_total = 0, q_names = 0, q_texts = 0;
  for (const QASample& s : samples) {
    static const Program kEmpty;
    auto it = predicted.find(s.sample_id);
    const Program& pred = it == predicted.end() ? kEmpty : *it->second;
    const std::size_t span = std::max(s.program.size(), pred.size());
    if (span == 0) continue;
    q_total++;
    std::size_t names_here = 0, texts_here = 0;
    for (std::size_t i = 0; i < span; ++i) {
      if (i < s.program.size() && i < pred.size()) {
        const Step& a = s.program.steps[i];
        const Step& b = pred.steps[i];
        if (a.function == b.function) ++names_here;
        if (a.text == b.text) ++texts_here;
      }
    }
    steps_total += span;
    names_correct += names_here;
    texts_correct += texts_here;
    if (names_here == span) ++q_names;
    if (texts_here == span) ++q_texts;
  }

  ProgramAccuracy acc;
  if (steps_total) {
    acc.function_name_per_step = static_cast<double>(names_correct) / steps_total;
    acc.text_input_per_step = static_cast<double>(texts_correct) / steps_total;
  }
  if (q_total) {
    acc.function_name_per_question = static_cast<double>(q_names) / q_total;
    acc.text_input_per_question = static_cast<double>(q_texts) / q_total;
  }
  return acc;
}

CorpusStats corpus_stats(const std::vector<QASample>& samples) {
  CorpusStats stats;
  stats.samples = samples.size();
  if (samples.empty()) return stats;

  std::size_t words = 0, steps = 0;
  for (const QASample& s : samples) {
    words += tokenize_ws(s.question).size();
    steps += s.program.size();
    for (const Step& st : s.program.steps) {
      stats.function_distribution[std::string(to_string(st.function))]++;
    }
    stats.question_type_distribution[std::string(to_string(s.question_type))]++;
    stats.program_length_distribution[s.program.size()]++;
  }
  stats.avg_question_words = static_cast<double>(words) / samples.size();
  stats.avg_program_length = static_cast<double>(steps) / samples.size();
  return stats;
}

}  // namespace cric
