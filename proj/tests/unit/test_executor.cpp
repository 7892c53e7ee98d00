#include <doctest.h>

#include "cric/errors.hpp"
#include "cric/executor.hpp"
#include "cric/program_enum.hpp"
#include "cric/program_text.hpp"
#include "test_support.hpp"

using namespace cric;
using cric::testing::q3_kg;
using cric::testing::q3_scene;

namespace {

Program parse(const char* text) { return parse_program(text); }

const char* kQ3Text =
    "0: Initial\n"
    "1: Find[0] object=\"recliner\"\n"
    "2: RelateReverse[1] predicate=\"on\"\n"
    "3: GroundKG[2] relation=\"IsA\" tail=\"animal\"\n"
    "4: Recognition[3] type=\"animal\"\n"
    "5: VerifyKG[4] relation=\"IsA\" tail=\"canid\"\n";

}  // namespace

TEST_CASE("execute: the cat/recliner walkthrough, step by step") {
  ExecResult r = execute(parse(kQ3Text), q3_scene(), q3_kg(), 2);
  REQUIRE(exec_ok(r));
  const Trace& t = exec_trace(r);
  REQUIRE(t.steps.size() == 6);
  CHECK(t.steps[0].object_ids == std::vector<ObjectId>{1, 2, 3});
  CHECK(t.steps[1].object_ids == std::vector<ObjectId>{1});
  CHECK(t.steps[2].object_ids == std::vector<ObjectId>{2, 3});
  CHECK(t.steps[3].object_ids == std::vector<ObjectId>{2});  // the cat
  CHECK(t.steps[4].concept_name == "cat");
  CHECK(t.steps[5].truth == false);
  CHECK(t.answer == "no");
}

TEST_CASE("execute: count of all objects") {
  SceneGraph sg;
  sg.image_id = "c";
  for (int i = 1; i <= 5; ++i) {
    sg.objects.push_back({i, "thing" + std::to_string(i), {}, {0, 0, 1, 1}});
  }
  ExecResult r = execute(parse("0: Initial\n1: Count[0]\n"), sg, {}, 2);
  REQUIRE(exec_ok(r));
  CHECK(exec_trace(r).steps[1].number == 5);
  CHECK(exec_trace(r).answer == "5");
}

TEST_CASE("execute: existence of an absent name is no") {
  ExecResult r = execute(parse("0: Initial\n1: Find[0] object=\"unicorn\"\n2: Exist[1]\n"),
                         q3_scene(), q3_kg(), 2);
  REQUIRE(exec_ok(r));
  CHECK(exec_trace(r).answer == "no");
}

TEST_CASE("execute: GroundKG keeps exactly the entailed objects") {
  SceneGraph sg;
  sg.image_id = "g";
  sg.objects = {{1, "towel", {}, {0, 0, 1, 1}}, {2, "cup", {}, {2, 0, 1, 1}}};
  KnowledgeGraph kg({{"towel", "UsedFor", "drying wet hair"}});
  ExecResult r = execute(
      parse("0: Initial\n1: GroundKG[0] relation=\"UsedFor\" tail=\"drying wet hair\"\n"), sg,
      kg, 2);
  REQUIRE(exec_ok(r));
  CHECK(exec_trace(r).steps[1].object_ids == std::vector<ObjectId>{1});
}

TEST_CASE("execute: Relate on empty input yields empty output, not an error") {
  ExecResult r = execute(
      parse("0: Initial\n1: Find[0] object=\"unicorn\"\n2: Relate[1] predicate=\"on\"\n"),
      q3_scene(), q3_kg(), 2);
  REQUIRE(exec_ok(r));
  CHECK(exec_trace(r).steps[2].object_ids.empty());
}

TEST_CASE("execute: error paths carry the step index") {
  SUBCASE("Recognition over more than one object") {
    ExecResult r = execute(parse("0: Initial\n1: Recognition[0] type=\"animal\"\n"), q3_scene(),
                           q3_kg(), 2);
    REQUIRE_FALSE(exec_ok(r));
    CHECK(exec_error(r).kind == ExecErrorKind::RecognitionArity);
    CHECK(exec_error(r).step == 1);
  }
  SUBCASE("Recognition with no matching concept of the type") {
    ExecResult r = execute(
        parse("0: Initial\n1: Find[0] object=\"pillow\"\n2: Recognition[1] type=\"animal\"\n"),
        q3_scene(), q3_kg(), 2);
    REQUIRE_FALSE(exec_ok(r));
    CHECK(exec_error(r).kind == ExecErrorKind::RecognitionAmbiguous);
    CHECK(exec_error(r).step == 2);
  }
  SUBCASE("QueryKG with an empty tail set") {
    ExecResult r = execute(
        parse("0: Initial\n1: Find[0] object=\"cat\"\n2: Recognition[1] type=\"animal\"\n"
              "3: QueryKG[2] relation=\"UsedFor\"\n"),
        q3_scene(), q3_kg(), 2);
    REQUIRE_FALSE(exec_ok(r));
    CHECK(exec_error(r).kind == ExecErrorKind::NoAnswer);
    CHECK(exec_error(r).step == 3);
  }
}

TEST_CASE("execute: rejects invalid programs outright") {
  Program bad;
  Step s;
  s.function = FunctionName::Exist;
  s.inputs = {0};
  bad.steps.push_back(s);
  CHECK_THROWS_AS(execute(bad, q3_scene(), q3_kg(), 2), PreconditionError);
}

TEST_CASE("answer rendering") {
  CHECK(render_answer(StepValue::boolean(true)) == "yes");
  CHECK(render_answer(StepValue::boolean(false)) == "no");
  CHECK(render_answer(StepValue::count(12)) == "12");
  CHECK(render_answer(StepValue::concept_value("drying wet hair")) == "drying wet hair");
}

TEST_CASE("brute_force_reference: matches execute on the walkthrough and basics") {
  for (const char* text :
       {kQ3Text, "0: Initial\n1: Count[0]\n", "0: Initial\n",
        "0: Initial\n1: Find[0] object=\"cat\" attribute=\"black\"\n2: Exist[1]\n"}) {
    ExecResult a = execute(parse(text), q3_scene(), q3_kg(), 2);
    ExecResult b = brute_force_reference(parse(text), q3_scene(), q3_kg(), 2);
    CHECK(cric::testing::exec_results_equal(a, b));
  }
}

TEST_CASE("executor properties over random programs and instances") {
  ProgramVocabulary vocab = cric::testing::placeholder_vocabulary();
  Rng rng(97);
  std::size_t checked = 0;
  enumerate_programs(4, vocab, [&](const Program& skeleton) {
    // Thin the stream to keep the unit suite fast; acceptance runs it all.
    if (rng.below(8) != 0) return true;
    cric::testing::RandomInstance inst = cric::testing::make_random_instance(rng);
    Program p = cric::testing::bind_symbols(skeleton, inst, rng);
    ExecResult fast = execute(p, inst.sg, inst.kg, 2);
    ExecResult slow = brute_force_reference(p, inst.sg, inst.kg, 2);
    CHECK(cric::testing::exec_results_equal(fast, slow));
    CHECK(cric::testing::exec_results_equal(fast, execute(p, inst.sg, inst.kg, 2)));

    if (exec_ok(fast)) {
      const Trace& t = exec_trace(fast);
      for (std::size_t i = 0; i < p.steps.size(); ++i) {
        const Step& s = p.steps[i];
        auto subset = [&](const std::vector<ObjectId>& a, const std::vector<ObjectId>& b) {
          return std::includes(b.begin(), b.end(), a.begin(), a.end());
        };
        if (s.function == FunctionName::Find || s.function == FunctionName::GroundKG) {
          CHECK(subset(t.steps[i].object_ids, t.steps[s.inputs[0]].object_ids));
        }
        if (s.function == FunctionName::And) {
          CHECK(subset(t.steps[i].object_ids, t.steps[s.inputs[0]].object_ids));
          CHECK(subset(t.steps[i].object_ids, t.steps[s.inputs[1]].object_ids));
        }
        if (s.function == FunctionName::Or) {
          CHECK(subset(t.steps[s.inputs[0]].object_ids, t.steps[i].object_ids));
          CHECK(subset(t.steps[s.inputs[1]].object_ids, t.steps[i].object_ids));
        }
        if (s.function == FunctionName::Exist) {
          CHECK(t.steps[i].truth == !t.steps[s.inputs[0]].object_ids.empty());
        }
      }
    }
    ++checked;
    return true;
  });
  CHECK(checked > 1000);
}
