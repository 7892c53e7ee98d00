#include <doctest.h>

#include "cric/balancer.hpp"
#include "cric/errors.hpp"
#include "cric/dataset_io.hpp"
#include "test_support.hpp"

using namespace cric;

namespace {

// Fabricated minimal samples; balancing reads programs and traces only.
QASample recognition_sample(const std::string& group, const std::string& answer, int n) {
  QASample s;
  s.sample_id = "img#" + std::to_string(n);
  s.image_id = "img";
  s.question = "what " + group + " is it?";
  s.answer = answer;
  Step init;
  init.function = FunctionName::Initial;
  Step find;
  find.function = FunctionName::Find;
  find.text.object = "thing";
  find.inputs = {0};
  Step rec;
  rec.function = FunctionName::Recognition;
  rec.text.type_name = group;
  rec.inputs = {1};
  s.program.steps = {init, find, rec};
  s.trace.steps = {StepValue::object_set({1, 2}), StepValue::object_set({1}),
                   StepValue::concept_value(answer)};
  s.trace.answer = answer;
  s.question_type = FunctionName::Recognition;
  return s;
}

QASample exist_sample(const std::string& name, bool yes, int n) {
  QASample s;
  s.sample_id = "img#e" + std::to_string(n);
  s.image_id = "img";
  s.question = "is there a " + name + "?";
  s.answer = yes ? "yes" : "no";
  Step init;
  init.function = FunctionName::Initial;
  Step find;
  find.function = FunctionName::Find;
  find.text.object = name;
  find.inputs = {0};
  Step exist;
  exist.function = FunctionName::Exist;
  exist.inputs = {1};
  s.program.steps = {init, find, exist};
  s.trace.steps = {StepValue::object_set({1}),
                   StepValue::object_set(yes ? std::vector<ObjectId>{1} : std::vector<ObjectId>{}),
                   StepValue::boolean(yes)};
  s.trace.answer = s.answer;
  s.question_type = FunctionName::Exist;
  return s;
}

std::map<std::string, std::size_t> answer_counts(const std::vector<QASample>& samples,
                                                 const DistributionKey& key) {
  Histogram h = histogram(samples, KeyKind::AnswerBalanced);
  auto it = h.find(key);
  if (it == h.end()) return {};
  return it->second;
}

}  // namespace

TEST_CASE("histogram: counts answers within the concept group") {
  std::vector<QASample> samples = {recognition_sample("color", "red", 0),
                                   recognition_sample("color", "red", 1),
                                   recognition_sample("color", "blue", 2)};
  auto counts = answer_counts(samples, {FunctionName::Recognition, "color"});
  CHECK(counts == std::map<std::string, std::size_t>{{"red", 2}, {"blue", 1}});
}

TEST_CASE("histogram: empty input yields an empty map") {
  CHECK(histogram({}, KeyKind::AnswerBalanced).empty());
  CHECK(histogram({}, KeyKind::TextInputBalanced).empty());
}

TEST_CASE("histogram: keys are partitioned by function") {
  std::vector<QASample> samples = {recognition_sample("color", "red", 0),
                                   exist_sample("cat", true, 1),
                                   exist_sample("cat", false, 2),
                                   recognition_sample("color", "blue", 3)};
  Histogram h = histogram(samples, KeyKind::AnswerBalanced);
  CHECK(h.count({FunctionName::Recognition, "color"}));
  CHECK(h.count({FunctionName::Exist, "cat"}));
  CHECK(h.at({FunctionName::Exist, "cat"}).at("yes") == 1);
  CHECK(h.at({FunctionName::Exist, "cat"}).at("no") == 1);

  Histogram text = histogram(samples, KeyKind::TextInputBalanced);
  CHECK(text.count({FunctionName::Find, "cat"}));
  CHECK(text.count({FunctionName::Find, "thing"}));
}

TEST_CASE("downsample: caps the dominant answer at the share bound") {
  std::vector<QASample> pool;
  for (int i = 0; i < 8; ++i) pool.push_back(recognition_sample("color", "red", i));
  for (int i = 8; i < 10; ++i) pool.push_back(recognition_sample("color", "blue", i));
  BalanceResult r = downsample(pool, 0.5, 42);
  auto counts = answer_counts(r.retained, {FunctionName::Recognition, "color"});
  CHECK(counts.at("blue") == 2);  // the under-represented value is kept whole
  CHECK(counts.at("red") == 2);   // the cap recurrence lands on the blue-determined bound
  const double share =
      static_cast<double>(counts.at("red")) / (counts.at("red") + counts.at("blue"));
  CHECK(share <= 0.5 + 1.0 / (counts.at("red") + counts.at("blue")));
}

TEST_CASE("downsample: already-uniform bucket is unchanged") {
  std::vector<QASample> pool;
  for (int i = 0; i < 4; ++i) pool.push_back(recognition_sample("color", "red", i));
  for (int i = 4; i < 8; ++i) pool.push_back(recognition_sample("color", "blue", i));
  BalanceResult r = downsample(pool, 0.5, 42);
  CHECK(r.retained.size() == 8);
}

TEST_CASE("downsample: single-valued buckets cannot balance and are reported") {
  std::vector<QASample> pool;
  for (int i = 0; i < 5; ++i) pool.push_back(recognition_sample("color", "red", i));
  BalanceResult r = downsample(pool, 0.5, 42);
  CHECK(r.retained.size() == 5);
  bool singleton_reported = false;
  for (const BucketReport& b : r.report.buckets) {
    if (b.key.function == FunctionName::Recognition && b.singleton) singleton_reported = true;
  }
  CHECK(singleton_reported);
}

TEST_CASE("downsample: retained set is an untouched ordered subset") {
  std::vector<QASample> pool;
  for (int i = 0; i < 12; ++i) {
    pool.push_back(recognition_sample("color", i % 3 ? "red" : "blue", i));
  }
  BalanceResult r = downsample(pool, 0.5, 9);
  std::size_t cursor = 0;
  for (const QASample& kept : r.retained) {
    bool found = false;
    for (; cursor < pool.size(); ++cursor) {
      if (pool[cursor] == kept) {
        CHECK(sample_to_jsonl(pool[cursor]) == sample_to_jsonl(kept));
        ++cursor;
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("downsample: deterministic under the seed") {
  std::vector<QASample> pool;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    pool.push_back(recognition_sample("color", rng.chance(0.8) ? "red" : "blue", i));
  }
  BalanceResult a = downsample(pool, 0.5, 1234);
  BalanceResult b = downsample(pool, 0.5, 1234);
  CHECK(a.retained == b.retained);
  BalanceResult c = downsample(pool, 0.5, 99);
  CHECK(c.retained.size() == a.retained.size());  // same caps, different members
}

TEST_CASE("downsample: post-hoc audit on random mixed pools") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<QASample> pool;
    const char* colors[] = {"red", "red", "red", "red", "red", "blue", "green"};
    for (int i = 0; i < 300; ++i) {
      if (rng.chance(0.5)) {
        pool.push_back(recognition_sample("color", colors[rng.index(7)], i));
      } else {
        pool.push_back(exist_sample(rng.chance(0.5) ? "cat" : "dog", rng.chance(0.75), i));
      }
    }
    BalanceResult r = downsample(pool, 0.5, 1000 + trial);
    Histogram h = histogram(r.retained, KeyKind::AnswerBalanced);
    for (const auto& [key, values] : h) {
      if (values.size() < 2) continue;
      std::size_t total = 0, max_count = 0;
      for (const auto& [v, n] : values) {
        total += n;
        max_count = std::max(max_count, n);
      }
      CHECK(static_cast<double>(max_count) <=
            0.5 * static_cast<double>(total) + 1.0 + 1e-9);
    }
    CHECK(r.retained.size() <= pool.size());
  }
}

TEST_CASE("downsample: rejects invalid shares") {
  CHECK_THROWS_AS(downsample({}, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(downsample({}, 1.5, 1), ConfigError);
}
