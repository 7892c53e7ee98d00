#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cric/knowledge_graph.hpp"
#include "cric/program.hpp"
#include "cric/scene_graph.hpp"

namespace cric {

// Ground-truth output of one step. Exactly the member matching `kind` is
// meaningful; object ids are kept sorted for deterministic comparison.
struct StepValue {
  ValueKind kind = ValueKind::ObjectSet;
  std::vector<ObjectId> object_ids;
  std::string concept_name;
  std::uint64_t number = 0;
  bool truth = false;

  static StepValue object_set(std::vector<ObjectId> ids);
  static StepValue concept_value(std::string value);
  static StepValue count(std::uint64_t n);
  static StepValue boolean(bool b);

  bool operator==(const StepValue&) const = default;
};

// Canonical answer rendering: Boolean -> yes/no, Number -> base-10 digits,
// Concept -> canonical entity string, ObjectSet -> comma-joined sorted ids
// (diagnostic only; object sets never answer questions).
std::string render_answer(const StepValue& v);

struct Trace {
  std::vector<StepValue> steps;
  std::string answer;

  bool operator==(const Trace&) const = default;
};

enum class ExecErrorKind : std::uint8_t {
  RecognitionArity,   // Recognition applied to a set whose size is not 1
  RecognitionAmbiguous,  // zero or multiple concepts match the queried type
  NoAnswer,           // QueryKG produced an empty tail set
};

std::string_view to_string(ExecErrorKind k);

struct ExecError {
  ExecErrorKind kind = ExecErrorKind::RecognitionArity;
  std::size_t step = 0;
  std::string message;

  bool operator==(const ExecError& o) const { return kind == o.kind && step == o.step; }
};

using ExecResult = std::variant<Trace, ExecError>;

inline bool exec_ok(const ExecResult& r) { return std::holds_alternative<Trace>(r); }
inline const Trace& exec_trace(const ExecResult& r) { return std::get<Trace>(r); }
inline const ExecError& exec_error(const ExecResult& r) { return std::get<ExecError>(r); }

// Evaluate a validated program against a scene graph and knowledge graph.
// Pure and deterministic; kg-backed steps spend at most hop_bound triplets
// per entailment. Throws PreconditionError on structurally invalid programs.
ExecResult execute(const Program& p, const SceneGraph& sg, const KnowledgeGraph& kg,
                   std::size_t hop_bound);

// Independent oracle with the same contract as execute, implemented by
// naive exhaustive scans with no indexing, caching or shared query code.
// Exists solely for differential testing.
ExecResult brute_force_reference(const Program& p, const SceneGraph& sg,
                                 const KnowledgeGraph& kg, std::size_t hop_bound);

}  // namespace cric
