#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cric/executor.hpp"
#include "cric/knowledge_graph.hpp"
#include "cric/program.hpp"
#include "cric/rng.hpp"
#include "cric/scene_graph.hpp"
#include "cric/template_engine.hpp"

namespace cric {

// ---- Core fact selection (generation step 1) -------------------------------

struct ObjectCore {
  ObjectId object = 0;
};
struct ObjectAttributeCore {
  ObjectId object = 0;
  std::string attribute;
};
struct RelationshipCore {
  RelationEdge edge;
};
struct KnowledgeCore {
  ObjectId object = 0;
  Triplet triplet;
};

using CoreFact = std::variant<ObjectCore, ObjectAttributeCore, RelationshipCore, KnowledgeCore>;

// Uniform draw over all eligible cores: every object, every (object,
// attribute) pair, every edge, and every (object, triplet) whose head is the
// object's name or an IsA-lift of it. nullopt when the scene offers nothing.
std::optional<CoreFact> pick_core(const SceneGraph& sg, const KnowledgeGraph& kg,
                                  std::size_t hop_bound, Rng& rng);

// ---- Decorated references (generation step 2) ------------------------------

struct RelDecoration {
  std::string predicate;
  std::string other_name;
  bool ref_is_subject = true;  // referent <predicate> other vs other <predicate> referent
};

struct KgDecoration {
  std::string relation;
  std::string tail;
};

// A referring expression: a head (object name or IsA category, or the
// generic "object") plus decorations. Compiles to an ObjectSet-producing
// program chain and to nested template decorations in the same order
// (relations, knowledge facts, then attributes innermost).
struct RefSpec {
  std::optional<std::string> name;
  std::optional<std::string> category;
  std::vector<RelDecoration> relations;
  std::vector<KgDecoration> kg_facts;
  std::vector<std::string> attributes;

  std::string head_surface() const;
};

// Append the reference chain to `p` (which may already hold steps); returns
// the index of the step producing the reference set.
std::size_t append_ref_program(Program& p, const RefSpec& ref, Rng& rng);

struct DecoratedRef {
  RefSpec ref;
  std::vector<ObjectId> referents;
};

// Iteratively attach attribute / visual-relation / knowledge decorations
// until the reference executes to exactly {target} (checked by the
// executor), or the budget runs out (nullopt).
std::optional<DecoratedRef> decorate_until_unique(const RefSpec& start, ObjectId target,
                                                  const SceneGraph& sg, const KnowledgeGraph& kg,
                                                  std::size_t hop_bound, Rng& rng,
                                                  std::size_t max_decorations);

// ---- Samples ----------------------------------------------------------------

struct QASample {
  std::string sample_id;  // "<image_id>#<n>", assigned by generate_corpus
  std::string image_id;
  std::string question;
  std::string answer;
  Program program;
  Trace trace;
  SceneGraph sub_scene_graph;
  std::vector<Triplet> sub_knowledge_graph;
  FunctionName question_type = FunctionName::Exist;
  std::optional<std::string> intended_tail;  // QueryKG tie documentation
  std::uint64_t seed = 0;

  bool operator==(const QASample&) const = default;
};

enum class SkipReason : std::uint8_t {
  EmptyScene,
  NoCore,
  NoPlan,
  NotUnique,
  ExecError,
  NoAnswer,
  Ambiguous,
  TemplateMissing,
  Duplicate,
};

std::string_view to_string(SkipReason r);

struct GeneratorOptions {
  std::size_t hop_bound = 2;
  std::size_t max_decorations = 3;
  double redundant_decoration_prob = 0.1;
  double corruption_prob = 0.5;
};

// Shared read-only inputs plus the corpus-wide distractor vocabulary used
// for negative existence/verification sampling.
struct GeneratorContext {
  const KnowledgeGraph* kg = nullptr;
  const ComponentLibrary* templates = nullptr;
  GeneratorOptions options;
  std::vector<std::string> distractor_names;
  std::vector<std::string> distractor_attributes;
};

GeneratorContext make_context(const std::vector<SceneGraph>& graphs, const KnowledgeGraph& kg,
                              const ComponentLibrary& templates, GeneratorOptions options);

using SampleResult = std::variant<QASample, SkipReason>;

// One full draw: pick a core, choose a question plan, build the reference,
// assemble/realize the template, execute the program, bundle annotations.
// Executor errors surface as skips, never as exceptions.
SampleResult generate_sample(const SceneGraph& sg, const GeneratorContext& ctx, Rng& rng);

struct GenerationReport {
  std::size_t attempts = 0;
  std::size_t emitted = 0;
  std::map<std::string, std::size_t> skips;  // reason name -> count

  void merge(const GenerationReport& other);
};

struct CorpusResult {
  std::vector<QASample> samples;  // ordered by (image_id, draw index)
  GenerationReport report;
};

// Per-image sub-seeds derived from (seed, image_id) make the output
// independent of input order and worker count. quota bounds successes per
// image; the draw budget is 10x quota. Duplicate (question, answer,
// program) triples within an image are skipped.
CorpusResult generate_corpus(const std::vector<SceneGraph>& graphs, const GeneratorContext& ctx,
                             std::size_t quota, std::uint64_t seed, std::size_t workers = 1);

}  // namespace cric
