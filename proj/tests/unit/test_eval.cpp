#include <doctest.h>

#include <algorithm>

#include "cric/errors.hpp"
#include "cric/eval.hpp"
#include "test_support.hpp"

using namespace cric;

namespace {

QASample stub_sample(const std::string& id, FunctionName type, const std::string& answer,
                     const std::string& question, std::size_t steps) {
  QASample s;
  s.sample_id = id;
  s.image_id = "img";
  s.question = question;
  s.answer = answer;
  s.question_type = type;
  Step init;
  init.function = FunctionName::Initial;
  s.program.steps.push_back(init);
  for (std::size_t i = 1; i < steps; ++i) {
    Step st;
    st.function = i + 1 == steps && type != FunctionName::Initial ? type : FunctionName::Find;
    if (st.function == FunctionName::Find) st.text.object = "thing" + std::to_string(i);
    if (st.function == FunctionName::Recognition) st.text.type_name = "color";
    if (st.function == FunctionName::Relate || st.function == FunctionName::RelateReverse) {
      st.text.predicate = "on";
    }
    if (st.function == FunctionName::VerifyKG || st.function == FunctionName::GroundKG) {
      st.text.relation = "IsA";
      st.text.tail = "animal";
    }
    if (st.function == FunctionName::QueryKG) st.text.relation = "UsedFor";
    st.inputs = {i - 1};
    s.program.steps.push_back(st);
  }
  return s;
}

std::vector<std::string> ids(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("img" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("split_by_image: ten images split 6/2/2") {
  Split s = split_by_image(ids(10), 7);
  CHECK(s.count(SplitKind::Train) == 6);
  CHECK(s.count(SplitKind::Val) == 2);
  CHECK(s.count(SplitKind::Test) == 2);
}

TEST_CASE("split_by_image: five images split 3/1/1") {
  Split s = split_by_image(ids(5), 7);
  CHECK(s.count(SplitKind::Train) == 3);
  CHECK(s.count(SplitKind::Val) == 1);
  CHECK(s.count(SplitKind::Test) == 1);
}

TEST_CASE("split_by_image: deterministic partition within one image of target") {
  for (int n : {1, 2, 3, 7, 23, 100, 997}) {
    Split a = split_by_image(ids(n), 11);
    Split b = split_by_image(ids(n), 11);
    CHECK(a.assignment == b.assignment);
    CHECK(a.assignment.size() == static_cast<std::size_t>(n));  // partition: every id once
    const double train = static_cast<double>(a.count(SplitKind::Train));
    const double val = static_cast<double>(a.count(SplitKind::Val));
    const double test = static_cast<double>(a.count(SplitKind::Test));
    CHECK(std::fabs(train - 0.6 * n) <= 2.0);
    CHECK(std::fabs(val - 0.2 * n) <= 1.0);
    CHECK(std::fabs(test - 0.2 * n) <= 1.0);
    CHECK(train + val + test == n);
  }
  CHECK_THROWS_AS(split_by_image({}, 1), PreconditionError);
}

TEST_CASE("answer_accuracy: ground truth as prediction scores 1.0 everywhere") {
  std::vector<QASample> samples = {
      stub_sample("a#0", FunctionName::Exist, "yes", "is there a cat?", 3),
      stub_sample("a#1", FunctionName::Count, "2", "how many cats?", 3),
      stub_sample("a#2", FunctionName::Recognition, "red", "what color?", 3)};
  std::vector<PredictionRecord> preds;
  for (const QASample& s : samples) preds.push_back({s.sample_id, s.answer, {}, {}});
  AccuracyTable t = answer_accuracy(samples, preds);
  CHECK(t.overall.accuracy == 1.0);
  for (const auto& [type, row] : t.by_type) CHECK(row.accuracy == 1.0);
}

TEST_CASE("answer_accuracy: the most-common-answer baseline scores its empirical share") {
  std::vector<QASample> samples;
  // 3 yes / 1 no existence questions, 2 red / 2 blue recognitions.
  samples.push_back(stub_sample("s0", FunctionName::Exist, "yes", "q?", 3));
  samples.push_back(stub_sample("s1", FunctionName::Exist, "yes", "q?", 3));
  samples.push_back(stub_sample("s2", FunctionName::Exist, "yes", "q?", 3));
  samples.push_back(stub_sample("s3", FunctionName::Exist, "no", "q?", 3));
  samples.push_back(stub_sample("s4", FunctionName::Recognition, "red", "q?", 3));
  samples.push_back(stub_sample("s5", FunctionName::Recognition, "red", "q?", 3));
  samples.push_back(stub_sample("s6", FunctionName::Recognition, "blue", "q?", 3));
  samples.push_back(stub_sample("s7", FunctionName::Recognition, "blue", "q?", 3));

  // Baseline: the most common answer per question type (ties -> smallest).
  std::map<std::string, std::map<std::string, int>> tally;
  for (const QASample& s : samples) tally[std::string(to_string(s.question_type))][s.answer]++;
  std::vector<PredictionRecord> preds;
  for (const QASample& s : samples) {
    const auto& counts = tally[std::string(to_string(s.question_type))];
    std::string best;
    int best_n = -1;
    for (const auto& [answer, n] : counts) {
      if (n > best_n) {
        best = answer;
        best_n = n;
      }
    }
    preds.push_back({s.sample_id, best, {}, {}});
  }
  AccuracyTable t = answer_accuracy(samples, preds);
  CHECK(t.by_type.at("Exist").accuracy == doctest::Approx(0.75));
  CHECK(t.by_type.at("Recognition").accuracy == doctest::Approx(0.5));
  CHECK(t.overall.accuracy == doctest::Approx(5.0 / 8.0));
}

TEST_CASE("answer_accuracy: input errors") {
  std::vector<QASample> samples = {stub_sample("a#0", FunctionName::Exist, "yes", "q?", 2)};
  CHECK_THROWS_AS(answer_accuracy(samples, {}), InputError);
  CHECK_THROWS_AS(answer_accuracy(samples, {{"missing", "yes", {}, {}}}), InputError);
}

TEST_CASE("answer_accuracy: permutation invariant over prediction order") {
  std::vector<QASample> samples = {
      stub_sample("a#0", FunctionName::Exist, "yes", "q?", 3),
      stub_sample("a#1", FunctionName::Exist, "no", "q?", 3)};
  std::vector<PredictionRecord> p1 = {{"a#0", "yes", {}, {}}, {"a#1", "yes", {}, {}}};
  std::vector<PredictionRecord> p2 = {p1[1], p1[0]};
  CHECK(answer_accuracy(samples, p1).overall.accuracy ==
        answer_accuracy(samples, p2).overall.accuracy);
}

TEST_CASE("grounding_accuracy: the hand-computed two-thirds case") {
  // truth {1,0,0}, prediction {1,0,1} over three objects
  CHECK(grounding_accuracy({1, 2, 3}, {1}, {1, 3}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("grounding_accuracy: bounds and the hamming identity") {
  CHECK(grounding_accuracy({1, 2, 3}, {1, 2}, {1, 2}) == 1.0);
  CHECK(grounding_accuracy({1, 2, 3}, {1}, {2, 3}) == 0.0);  // all memberships flipped

  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng.index(20);
    std::vector<ObjectId> universe;
    for (std::size_t i = 0; i < n; ++i) universe.push_back(static_cast<ObjectId>(i));
    std::vector<ObjectId> truth, pred;
    std::size_t hamming = 0;
    for (ObjectId id : universe) {
      bool in_truth = rng.chance(0.5);
      bool in_pred = rng.chance(0.5);
      if (in_truth) truth.push_back(id);
      if (in_pred) pred.push_back(id);
      if (in_truth != in_pred) ++hamming;
    }
    double acc = grounding_accuracy(universe, truth, pred);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(acc == doctest::Approx(1.0 - static_cast<double>(hamming) / n));
  }
}

TEST_CASE("grounding_accuracy: arity mismatch is an input error") {
  CHECK_THROWS_AS(grounding_accuracy({1, 2}, {1}, {5}), InputError);
  CHECK_THROWS_AS(grounding_accuracy({}, {}, {}), InputError);
}

TEST_CASE("program_accuracy: identical programs score 1.0 on both axes") {
  QASample s = stub_sample("p#0", FunctionName::Exist, "yes", "q?", 4);
  PredictionRecord pred{s.sample_id, s.answer, {}, s.program};
  ProgramAccuracy acc = program_accuracy({s}, {pred});
  CHECK(acc.function_name_per_step == 1.0);
  CHECK(acc.text_input_per_step == 1.0);
  CHECK(acc.function_name_per_question == 1.0);
  CHECK(acc.text_input_per_question == 1.0);
}

TEST_CASE("program_accuracy: one wrong predicate among four steps") {
  QASample s = stub_sample("p#0", FunctionName::Exist, "yes", "q?", 4);
  Program wrong = s.program;
  wrong.steps[1].text.object = "different thing";
  ProgramAccuracy acc = program_accuracy({s}, {{s.sample_id, s.answer, {}, wrong}});
  CHECK(acc.function_name_per_step == 1.0);
  CHECK(acc.text_input_per_step == doctest::Approx(0.75));
  CHECK(acc.text_input_per_question == 0.0);
}

TEST_CASE("program_accuracy: an empty prediction scores zero over the true length") {
  QASample s = stub_sample("p#0", FunctionName::Exist, "yes", "q?", 3);
  ProgramAccuracy acc = program_accuracy({s}, {{s.sample_id, s.answer, {}, Program{}}});
  CHECK(acc.function_name_per_step == 0.0);
  CHECK(acc.text_input_per_step == 0.0);
}

TEST_CASE("corpus_stats: single sample and the two-sample mean") {
  QASample one = stub_sample("c#0", FunctionName::Exist, "yes", "is there a red cat?", 3);
  CorpusStats s1 = corpus_stats({one});
  CHECK(s1.avg_question_words == 5.0);
  CHECK(s1.avg_program_length == 3.0);

  QASample a = stub_sample("c#1", FunctionName::Exist, "yes", "is there a cat?", 2);
  QASample b = stub_sample("c#2", FunctionName::Count, "2", "how many red cats are there?", 4);
  CorpusStats s2 = corpus_stats({a, b});
  CHECK(s2.avg_question_words == 5.0);  // (4 + 6) / 2
  CHECK(s2.avg_program_length == 3.0);  // (2 + 4) / 2
  CHECK(s2.question_type_distribution.at("Exist") == 1);
  CHECK(s2.question_type_distribution.at("Count") == 1);
  CHECK(s2.function_distribution.at("Initial") == 2);

  SUBCASE("permutation invariance") {
    CorpusStats s3 = corpus_stats({b, a});
    CHECK(s3.avg_question_words == s2.avg_question_words);
    CHECK(s3.function_distribution == s2.function_distribution);
  }
}

TEST_CASE("corpus_stats: empty corpus carries an explicit zero marker") {
  CorpusStats s = corpus_stats({});
  CHECK(s.samples == 0);
  CHECK(s.avg_question_words == 0.0);
  CHECK(s.function_distribution.empty());
}
