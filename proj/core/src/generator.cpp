#include "cric/generator.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "cric/errors.hpp"
#include "cric/program_text.hpp"
#include "cric/text_util.hpp"

namespace cric {

std::string_view to_string(SkipReason r) {
  switch (r) {
    case SkipReason::EmptyScene: return "empty_scene";
    case SkipReason::NoCore: return "no_core";
    case SkipReason::NoPlan: return "no_plan";
    case SkipReason::NotUnique: return "not_unique";
    case SkipReason::ExecError: return "exec_error";
    case SkipReason::NoAnswer: return "no_answer";
    case SkipReason::Ambiguous: return "ambiguous";
    case SkipReason::TemplateMissing: return "template_missing";
    case SkipReason::Duplicate: return "duplicate";
  }
  return "unknown";
}

// ---- core selection ---------------------------------------------------------

namespace {

std::vector<std::string> sorted_categories(const KnowledgeGraph& kg,
                                           const std::string& concept_name, std::size_t hops) {
  std::set<EntityName> reach = kg.isa_reachable(concept_name, hops);
  return {reach.begin(), reach.end()};
}

std::vector<CoreFact> enumerate_cores(const SceneGraph& sg, const KnowledgeGraph& kg,
                                      std::size_t hop_bound) {
  std::vector<CoreFact> cores;
  for (const ObjectNode& o : sg.objects) {
    cores.push_back(ObjectCore{o.id});
    for (const std::string& a : o.attributes) {
      cores.push_back(ObjectAttributeCore{o.id, a});
    }
  }
  for (const RelationEdge& e : sg.edges) cores.push_back(RelationshipCore{e});
  for (const ObjectNode& o : sg.objects) {
    std::set<EntityName> heads = kg.isa_reachable(o.name, hop_bound > 0 ? hop_bound - 1 : 0);
    heads.insert(o.name);
    for (const Triplet& t : kg.triplets()) {
      if (heads.count(t.head)) cores.push_back(KnowledgeCore{o.id, t});
    }
  }
  return cores;
}

}  // namespace

std::optional<CoreFact> pick_core(const SceneGraph& sg, const KnowledgeGraph& kg,
                                  std::size_t hop_bound, Rng& rng) {
  std::vector<CoreFact> cores = enumerate_cores(sg, kg, hop_bound);
  if (cores.empty()) return std::nullopt;
  return cores[rng.index(cores.size())];
}

// ---- reference program construction ----------------------------------------

std::string RefSpec::head_surface() const {
  if (name) return *name;
  if (category) return *category;
  return "object";
}

std::size_t append_ref_program(Program& p, const RefSpec& ref, Rng& rng) {
  if (p.steps.empty()) p.steps.push_back(Step{FunctionName::Initial, {}, {}});
  const std::size_t initial = 0;

  std::vector<std::size_t> branches;
  for (const RelDecoration& rel : ref.relations) {
    Step find_other;
    find_other.function = FunctionName::Find;
    find_other.text.object = rel.other_name;
    find_other.inputs = {initial};
    p.steps.push_back(std::move(find_other));

    Step hop;
    hop.function = rel.ref_is_subject ? FunctionName::RelateReverse : FunctionName::Relate;
    hop.text.predicate = rel.predicate;
    hop.inputs = {p.steps.size() - 1};
    p.steps.push_back(std::move(hop));
    branches.push_back(p.steps.size() - 1);
  }

  std::size_t cur = initial;
  if (!branches.empty()) {
    cur = branches.front();
    for (std::size_t i = 1; i < branches.size(); ++i) {
      Step conj;
      conj.function = FunctionName::And;
      conj.inputs = {cur, branches[i]};
      p.steps.push_back(std::move(conj));
      cur = p.steps.size() - 1;
    }
  }

  if (ref.name) {
    // Two equivalent shapes; the branch form exercises And.
    if (cur != initial && rng.below(2) == 1) {
      Step find;
      find.function = FunctionName::Find;
      find.text.object = *ref.name;
      find.inputs = {initial};
      p.steps.push_back(std::move(find));
      Step conj;
      conj.function = FunctionName::And;
      conj.inputs = {p.steps.size() - 1, cur};
      p.steps.push_back(std::move(conj));
      cur = p.steps.size() - 1;
    } else {
      Step find;
      find.function = FunctionName::Find;
      find.text.object = *ref.name;
      find.inputs = {cur};
      p.steps.push_back(std::move(find));
      cur = p.steps.size() - 1;
    }
  }
  if (ref.category) {
    Step ground;
    ground.function = FunctionName::GroundKG;
    ground.text.relation = kIsA;
    ground.text.tail = *ref.category;
    ground.inputs = {cur};
    p.steps.push_back(std::move(ground));
    cur = p.steps.size() - 1;
  }
  for (const KgDecoration& k : ref.kg_facts) {
    Step ground;
    ground.function = FunctionName::GroundKG;
    ground.text.relation = k.relation;
    ground.text.tail = k.tail;
    ground.inputs = {cur};
    p.steps.push_back(std::move(ground));
    cur = p.steps.size() - 1;
  }
  for (const std::string& a : ref.attributes) {
    Step find;
    find.function = FunctionName::Find;
    find.text.attribute = a;
    find.inputs = {cur};
    p.steps.push_back(std::move(find));
    cur = p.steps.size() - 1;
  }
  return cur;
}

namespace {

// Execute just the reference chain; empty result on executor error.
std::optional<std::vector<ObjectId>> eval_ref(const RefSpec& ref, const SceneGraph& sg,
                                              const KnowledgeGraph& kg, std::size_t hop_bound) {
  Program p;
  Rng fixed(0);  // shape choice is irrelevant to the result set
  std::size_t last = append_ref_program(p, ref, fixed);
  ExecResult r = execute(p, sg, kg, hop_bound);
  if (!exec_ok(r)) return std::nullopt;
  return exec_trace(r).steps[last].object_ids;
}

struct DecorationCandidate {
  enum class Kind : std::uint8_t { Attribute, Relation, Knowledge } kind = Kind::Attribute;
  std::string attribute;
  RelDecoration relation;
  KgDecoration knowledge;
};

RefSpec apply_candidate(RefSpec ref, const DecorationCandidate& c) {
  switch (c.kind) {
    case DecorationCandidate::Kind::Attribute: ref.attributes.push_back(c.attribute); break;
    case DecorationCandidate::Kind::Relation: ref.relations.push_back(c.relation); break;
    case DecorationCandidate::Kind::Knowledge: ref.kg_facts.push_back(c.knowledge); break;
  }
  return ref;
}

// All decorations of `target` not yet present in ref, deterministic order:
// attributes, incident edges, entailed knowledge facts.
std::vector<DecorationCandidate> decoration_candidates(
    const RefSpec& ref, const ObjectNode& target, const SceneGraph& sg,
    const KnowledgeGraph& kg, std::size_t hop_bound,
    const std::set<std::string>& banned_attributes) {
  std::vector<DecorationCandidate> out;
  for (const std::string& a : target.attributes) {
    if (banned_attributes.count(a)) continue;
    if (std::find(ref.attributes.begin(), ref.attributes.end(), a) != ref.attributes.end()) {
      continue;
    }
    DecorationCandidate c;
    c.kind = DecorationCandidate::Kind::Attribute;
    c.attribute = a;
    out.push_back(std::move(c));
  }
  auto have_rel = [&](const RelDecoration& r) {
    for (const RelDecoration& x : ref.relations) {
      if (x.predicate == r.predicate && x.other_name == r.other_name &&
          x.ref_is_subject == r.ref_is_subject) {
        return true;
      }
    }
    return false;
  };
  for (const RelationEdge& e : sg.edges) {
    if (e.subject == target.id) {
      RelDecoration r{e.predicate, sg.find_object(e.object)->name, true};
      if (!have_rel(r)) {
        DecorationCandidate c;
        c.kind = DecorationCandidate::Kind::Relation;
        c.relation = std::move(r);
        out.push_back(std::move(c));
      }
    }
    if (e.object == target.id) {
      RelDecoration r{e.predicate, sg.find_object(e.subject)->name, false};
      if (!have_rel(r)) {
        DecorationCandidate c;
        c.kind = DecorationCandidate::Kind::Relation;
        c.relation = std::move(r);
        out.push_back(std::move(c));
      }
    }
  }
  auto have_kg = [&](const KgDecoration& k) {
    if (ref.category && k.relation == kIsA && *ref.category == k.tail) return true;
    for (const KgDecoration& x : ref.kg_facts) {
      if (x.relation == k.relation && x.tail == k.tail) return true;
    }
    return false;
  };
  for (const RelationName& rel : kg.relations()) {
    for (const EntityName& tail : kg.query_tails(target.name, rel, hop_bound)) {
      KgDecoration k{rel, tail};
      if (!have_kg(k)) {
        DecorationCandidate c;
        c.kind = DecorationCandidate::Kind::Knowledge;
        c.knowledge = std::move(k);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

std::optional<DecoratedRef> decorate_until_unique_impl(
    const RefSpec& start, ObjectId target, const SceneGraph& sg, const KnowledgeGraph& kg,
    std::size_t hop_bound, Rng& rng, std::size_t max_decorations,
    const std::set<std::string>& banned_attributes) {
  const ObjectNode* target_node = sg.find_object(target);
  if (!target_node) return std::nullopt;

  RefSpec ref = start;
  auto current = eval_ref(ref, sg, kg, hop_bound);
  if (!current) return std::nullopt;
  for (std::size_t added = 0; added < max_decorations + 1; ++added) {
    const bool contains_target =
        std::binary_search(current->begin(), current->end(), target);
    if (!contains_target) return std::nullopt;
    if (current->size() == 1) return DecoratedRef{ref, *current};
    if (added == max_decorations) break;

    // Keep only decorations that retain the target and strictly shrink the
    // candidate set; pick uniformly among them.
    std::vector<std::pair<DecorationCandidate, std::vector<ObjectId>>> improving;
    for (const DecorationCandidate& c :
         decoration_candidates(ref, *target_node, sg, kg, hop_bound, banned_attributes)) {
      auto result = eval_ref(apply_candidate(ref, c), sg, kg, hop_bound);
      if (!result) continue;
      if (!std::binary_search(result->begin(), result->end(), target)) continue;
      if (result->size() >= current->size()) continue;
      improving.emplace_back(c, std::move(*result));
    }
    if (improving.empty()) return std::nullopt;
    auto& [chosen, result] = improving[rng.index(improving.size())];
    ref = apply_candidate(ref, chosen);
    current = std::move(result);
  }
  return std::nullopt;
}

}  // namespace

std::optional<DecoratedRef> decorate_until_unique(const RefSpec& start, ObjectId target,
                                                  const SceneGraph& sg, const KnowledgeGraph& kg,
                                                  std::size_t hop_bound, Rng& rng,
                                                  std::size_t max_decorations) {
  return decorate_until_unique_impl(start, target, sg, kg, hop_bound, rng, max_decorations, {});
}

// ---- plans ------------------------------------------------------------------

namespace {

enum class PlanKind : std::uint8_t {
  Exist,
  Count,
  ExistOr,
  RecognizeAttribute,
  RecognizeName,
  QueryKg,
  VerifyKg,
};

struct BuildParts {
  Program program;
  std::size_t ref_step = 0;
  std::string core_query;
  std::string group = "object";
  std::vector<DecorationRequest> requests;
  std::map<std::string, std::string> role_bindings;
  std::optional<std::string> intended_tail;
};

using BuildOutcome = std::variant<BuildParts, SkipReason>;

const ObjectNode& object_of(const SceneGraph& sg, ObjectId id) { return *sg.find_object(id); }

// Decoration requests + role bindings for a RefSpec, in the order the
// reference surfaces nest: relations, knowledge facts, attributes innermost.
void bind_reference(const RefSpec& ref, const ComponentLibrary& lib, bool plural,
                    BuildParts& parts) {
  std::size_t d = 0;
  auto role = [&](const std::string& slot) { return "deco" + std::to_string(d) + "." + slot; };
  for (const RelDecoration& rel : ref.relations) {
    DecorationRequest req;
    req.kind = DecorationKind::VisualRelation;
    req.tag = rel.ref_is_subject ? (plural ? "subject_plural" : "subject") : "object";
    parts.requests.push_back(req);
    parts.role_bindings[role("predicate")] = rel.predicate;
    parts.role_bindings[role("other")] = rel.other_name;
    ++d;
  }
  for (const KgDecoration& k : ref.kg_facts) {
    parts.requests.push_back({DecorationKind::Knowledge, ""});
    parts.role_bindings[role("relation")] =
        plural ? lib.relation_surface_plural(k.relation) : lib.relation_surface(k.relation);
    parts.role_bindings[role("tail")] = k.tail;
    ++d;
  }
  for (const std::string& a : ref.attributes) {
    parts.requests.push_back({DecorationKind::Attribute, ""});
    parts.role_bindings[role("attribute")] = a;
    ++d;
  }
  std::string head = ref.head_surface();
  parts.role_bindings["head"] = plural ? pluralize(head) : head;
}

class SampleBuilder {
 public:
  SampleBuilder(const SceneGraph& sg, const GeneratorContext& ctx, Rng& rng)
      : sg_(sg), ctx_(ctx), kg_(*ctx.kg), lib_(*ctx.templates), rng_(rng),
        hop_(ctx.options.hop_bound) {}

  SampleResult build() {
    if (sg_.objects.empty()) return SkipReason::EmptyScene;
    std::optional<CoreFact> core = pick_core(sg_, kg_, hop_, rng_);
    if (!core) return SkipReason::NoCore;

    std::vector<PlanKind> plans = eligible_plans(*core);
    if (plans.empty()) return SkipReason::NoPlan;
    PlanKind plan = plans[rng_.index(plans.size())];

    BuildOutcome outcome = dispatch(plan, *core);
    if (std::holds_alternative<SkipReason>(outcome)) return std::get<SkipReason>(outcome);
    return finish(std::get<BuildParts>(std::move(outcome)));
  }

 private:
  std::vector<PlanKind> eligible_plans(const CoreFact& core) {
    std::vector<PlanKind> plans;
    if (std::holds_alternative<ObjectCore>(core)) {
      const auto& c = std::get<ObjectCore>(core);
      plans = {PlanKind::Exist, PlanKind::Count, PlanKind::ExistOr};
      if (!sorted_categories(kg_, object_of(sg_, c.object).name, hop_).empty()) {
        plans.push_back(PlanKind::RecognizeName);
      }
    } else if (std::holds_alternative<ObjectAttributeCore>(core)) {
      const auto& c = std::get<ObjectAttributeCore>(core);
      plans = {PlanKind::Exist, PlanKind::Count};
      if (!sorted_categories(kg_, c.attribute, kg_.closure_hops()).empty()) {
        plans.push_back(PlanKind::RecognizeAttribute);
      }
    } else if (std::holds_alternative<RelationshipCore>(core)) {
      const auto& c = std::get<RelationshipCore>(core);
      plans = {PlanKind::Exist, PlanKind::Count};
      const std::string& sname = object_of(sg_, c.edge.subject).name;
      const std::string& oname = object_of(sg_, c.edge.object).name;
      if (!sorted_categories(kg_, sname, hop_).empty() ||
          !sorted_categories(kg_, oname, hop_).empty()) {
        plans.push_back(PlanKind::RecognizeName);
      }
    } else {
      const auto& c = std::get<KnowledgeCore>(core);
      const std::string& rel = c.triplet.relation;
      if (rel == kIsA || lib_.has_relation_surface(rel)) {
        plans = {PlanKind::Exist, PlanKind::Count};
      }
      const bool recognizable =
          !sorted_categories(kg_, object_of(sg_, c.object).name, kg_.closure_hops()).empty();
      if (recognizable && lib_.has_core("query_kg", rel)) plans.push_back(PlanKind::QueryKg);
      if (recognizable && lib_.has_core("verify_kg", rel)) plans.push_back(PlanKind::VerifyKg);
      if (rel == kIsA && !sorted_categories(kg_, object_of(sg_, c.object).name, hop_).empty()) {
        plans.push_back(PlanKind::RecognizeName);
      }
    }
    return plans;
  }

  BuildOutcome dispatch(PlanKind plan, const CoreFact& core) {
    switch (plan) {
      case PlanKind::Exist: return build_set_question(core, false);
      case PlanKind::Count: return build_set_question(core, true);
      case PlanKind::ExistOr: return build_exist_or(std::get<ObjectCore>(core));
      case PlanKind::RecognizeAttribute:
        return build_recognize_attribute(std::get<ObjectAttributeCore>(core));
      case PlanKind::RecognizeName: return build_recognize_name(core);
      case PlanKind::QueryKg: return build_kg_question(std::get<KnowledgeCore>(core), false);
      case PlanKind::VerifyKg: return build_kg_question(std::get<KnowledgeCore>(core), true);
    }
    return SkipReason::NoPlan;
  }

  // The object the core is about; used as decoration/uniqueness target.
  ObjectId core_target(const CoreFact& core, bool* picked_subject = nullptr) {
    if (std::holds_alternative<ObjectCore>(core)) return std::get<ObjectCore>(core).object;
    if (std::holds_alternative<ObjectAttributeCore>(core)) {
      return std::get<ObjectAttributeCore>(core).object;
    }
    if (std::holds_alternative<KnowledgeCore>(core)) return std::get<KnowledgeCore>(core).object;
    const RelationEdge& e = std::get<RelationshipCore>(core).edge;
    const bool subject_side = rng_.below(2) == 0;
    if (picked_subject) *picked_subject = subject_side;
    return subject_side ? e.subject : e.object;
  }

  // Initial RefSpec for a core; head is the object's name or, half the time
  // when one exists, an entailed IsA category. target_out receives the
  // object the reference is built around (for relationship cores this is
  // the drawn side, so decoration and reference stay consistent).
  RefSpec base_ref(const CoreFact& core, ObjectId* target_out) {
    if (std::holds_alternative<RelationshipCore>(core)) {
      const RelationEdge& e = std::get<RelationshipCore>(core).edge;
      bool subject_side = rng_.below(2) == 0;
      ObjectId target = subject_side ? e.subject : e.object;
      ObjectId other = subject_side ? e.object : e.subject;
      if (target_out) *target_out = target;
      RefSpec ref = head_ref(object_of(sg_, target).name);
      ref.relations.push_back({e.predicate, object_of(sg_, other).name, subject_side});
      return ref;
    }
    if (target_out) *target_out = core_target(core);
    if (std::holds_alternative<ObjectAttributeCore>(core)) {
      const auto& c = std::get<ObjectAttributeCore>(core);
      RefSpec ref = head_ref(object_of(sg_, c.object).name);
      ref.attributes.push_back(c.attribute);
      return ref;
    }
    if (std::holds_alternative<KnowledgeCore>(core)) {
      const auto& c = std::get<KnowledgeCore>(core);
      const Triplet& t = c.triplet;
      if (t.relation == kIsA) {
        RefSpec ref;
        ref.category = t.tail;
        return ref;
      }
      RefSpec ref;
      if (rng_.below(2) == 0) ref.name = object_of(sg_, c.object).name;
      ref.kg_facts.push_back({t.relation, t.tail});
      return ref;
    }
    return head_ref(object_of(sg_, std::get<ObjectCore>(core).object).name);
  }

  RefSpec head_ref(const std::string& name) {
    RefSpec ref;
    std::vector<std::string> cats = sorted_categories(kg_, name, hop_);
    if (!cats.empty() && rng_.chance(0.5)) {
      ref.category = cats[rng_.index(cats.size())];
    } else {
      ref.name = name;
    }
    return ref;
  }

  void maybe_add_redundant(RefSpec& ref, ObjectId target) {
    if (!rng_.chance(ctx_.options.redundant_decoration_prob)) return;
    const ObjectNode* node = sg_.find_object(target);
    if (!node) return;
    std::vector<DecorationCandidate> keepers;
    for (const DecorationCandidate& c :
         decoration_candidates(ref, *node, sg_, kg_, hop_, {})) {
      auto result = eval_ref(apply_candidate(ref, c), sg_, kg_, hop_);
      if (result && std::binary_search(result->begin(), result->end(), target)) {
        keepers.push_back(c);
      }
    }
    if (!keepers.empty()) ref = apply_candidate(ref, keepers[rng_.index(keepers.size())]);
  }

  BuildOutcome build_set_question(const CoreFact& core, bool counting) {
    ObjectId target = 0;
    RefSpec ref = base_ref(core, &target);
    const bool corrupted = rng_.chance(ctx_.options.corruption_prob);
    if (corrupted) {
      corrupt_reference(ref);
    } else {
      maybe_add_redundant(ref, target);
    }

    if (!ref.name && !ref.category && ref.kg_facts.empty() && ref.relations.empty() &&
        ref.attributes.empty()) {
      return SkipReason::NoPlan;
    }

    BuildParts parts;
    parts.ref_step = append_ref_program(parts.program, ref, rng_);
    Step last;
    last.function = counting ? FunctionName::Count : FunctionName::Exist;
    last.inputs = {parts.ref_step};
    parts.program.steps.push_back(std::move(last));
    parts.core_query = counting ? "count" : "exist";
    bind_reference(ref, lib_, counting, parts);
    return parts;
  }

  // Swap one concept for a distractor so existence/count answers cover the
  // negative side as well; the executor decides the actual truth.
  void corrupt_reference(RefSpec& ref) {
    std::vector<std::size_t> slots;
    if (ref.name) slots.push_back(0);
    for (std::size_t i = 0; i < ref.attributes.size(); ++i) slots.push_back(1 + i);
    if (slots.empty()) return;
    std::size_t slot = slots[rng_.index(slots.size())];
    auto swap_in = [&](std::string& field, const std::vector<std::string>& pool) {
      if (pool.empty()) return;
      for (int tries = 0; tries < 10; ++tries) {
        const std::string& pick = pool[rng_.index(pool.size())];
        if (pick != field) {
          field = pick;
          return;
        }
      }
    };
    if (slot == 0) {
      swap_in(*ref.name, ctx_.distractor_names);
    } else {
      swap_in(ref.attributes[slot - 1], ctx_.distractor_attributes);
    }
  }

  BuildOutcome build_exist_or(const ObjectCore& core) {
    const std::string& first = object_of(sg_, core.object).name;
    std::vector<std::string> pool;
    for (const ObjectNode& o : sg_.objects) {
      if (o.name != first &&
          std::find(pool.begin(), pool.end(), o.name) == pool.end()) {
        pool.push_back(o.name);
      }
    }
    if (rng_.chance(ctx_.options.corruption_prob) || pool.empty()) {
      pool = ctx_.distractor_names;
    }
    if (pool.empty()) return SkipReason::NoPlan;
    std::string second = pool[rng_.index(pool.size())];
    if (second == first) return SkipReason::NoPlan;

    BuildParts parts;
    Program& p = parts.program;
    p.steps.push_back(Step{FunctionName::Initial, {}, {}});
    Step f1;
    f1.function = FunctionName::Find;
    f1.text.object = first;
    f1.inputs = {0};
    p.steps.push_back(std::move(f1));
    Step f2;
    f2.function = FunctionName::Find;
    f2.text.object = second;
    f2.inputs = {0};
    p.steps.push_back(std::move(f2));
    Step either;
    either.function = FunctionName::Or;
    either.inputs = {1, 2};
    p.steps.push_back(std::move(either));
    Step exist;
    exist.function = FunctionName::Exist;
    exist.inputs = {3};
    p.steps.push_back(std::move(exist));
    parts.ref_step = 3;
    parts.core_query = "exist_or";
    parts.role_bindings["head"] = first;
    parts.role_bindings["core.subject2"] = second;
    return parts;
  }

  BuildOutcome build_recognize_attribute(const ObjectAttributeCore& core) {
    std::vector<std::string> groups = sorted_categories(kg_, core.attribute, kg_.closure_hops());
    if (groups.empty()) return SkipReason::NoPlan;
    const std::string group = groups[rng_.index(groups.size())];

    // Decorating with any attribute of the asked group would leak or
    // contradict the answer.
    std::set<std::string> banned;
    for (const std::string& a : object_of(sg_, core.object).attributes) {
      if (kg_.in_category(a, group)) banned.insert(a);
    }
    RefSpec start = head_ref(object_of(sg_, core.object).name);
    auto unique = decorate_until_unique_impl(start, core.object, sg_, kg_, hop_, rng_,
                                             ctx_.options.max_decorations, banned);
    if (!unique) return SkipReason::NotUnique;
    RefSpec ref = unique->ref;
    maybe_add_redundant(ref, core.object);

    BuildParts parts;
    parts.ref_step = append_ref_program(parts.program, ref, rng_);
    Step rec;
    rec.function = FunctionName::Recognition;
    rec.text.type_name = group;
    rec.inputs = {parts.ref_step};
    parts.program.steps.push_back(std::move(rec));
    parts.core_query = "recognize";
    parts.group = group;
    bind_reference(ref, lib_, false, parts);
    return parts;
  }

  BuildOutcome build_recognize_name(const CoreFact& core) {
    bool subject_side = false;
    ObjectId target = core_target(core, &subject_side);
    std::vector<std::string> groups = sorted_categories(kg_, object_of(sg_, target).name, hop_);
    if (groups.empty()) return SkipReason::NoPlan;
    const std::string group = groups[rng_.index(groups.size())];

    RefSpec start;
    start.category = group;
    if (std::holds_alternative<RelationshipCore>(core)) {
      const RelationEdge& e = std::get<RelationshipCore>(core).edge;
      ObjectId other = subject_side ? e.object : e.subject;
      start.relations.push_back({e.predicate, object_of(sg_, other).name, subject_side});
    }
    auto unique = decorate_until_unique_impl(start, target, sg_, kg_, hop_, rng_,
                                             ctx_.options.max_decorations, {});
    if (!unique) return SkipReason::NotUnique;
    RefSpec ref = unique->ref;
    maybe_add_redundant(ref, target);

    BuildParts parts;
    parts.ref_step = append_ref_program(parts.program, ref, rng_);
    Step rec;
    rec.function = FunctionName::Recognition;
    rec.text.type_name = group;
    rec.inputs = {parts.ref_step};
    parts.program.steps.push_back(std::move(rec));
    parts.core_query = "name";
    parts.group = group;
    bind_reference(ref, lib_, false, parts);
    return parts;
  }

  BuildOutcome build_kg_question(const KnowledgeCore& core, bool verify) {
    const Triplet& t = core.triplet;
    const ObjectNode& obj = object_of(sg_, core.object);
    std::vector<std::string> groups = sorted_categories(kg_, obj.name, kg_.closure_hops());
    if (groups.empty()) return SkipReason::NoPlan;
    const std::string rec_group = groups[rng_.index(groups.size())];

    RefSpec start = head_ref(obj.name);
    auto unique = decorate_until_unique_impl(start, core.object, sg_, kg_, hop_, rng_,
                                             ctx_.options.max_decorations, {});
    if (!unique) return SkipReason::NotUnique;
    RefSpec ref = unique->ref;
    maybe_add_redundant(ref, core.object);

    BuildParts parts;
    parts.ref_step = append_ref_program(parts.program, ref, rng_);
    Step rec;
    rec.function = FunctionName::Recognition;
    rec.text.type_name = rec_group;
    rec.inputs = {parts.ref_step};
    parts.program.steps.push_back(std::move(rec));
    const std::size_t concept_step = parts.program.steps.size() - 1;

    if (!verify) {
      Step query;
      query.function = FunctionName::QueryKG;
      query.text.relation = t.relation;
      query.inputs = {concept_step};
      parts.program.steps.push_back(std::move(query));
      parts.core_query = "query_kg";
      parts.group = t.relation;
      parts.intended_tail = t.tail;
      bind_reference(ref, lib_, false, parts);
      return parts;
    }

    // Half the verifications use a corrupted tail so both answers occur.
    std::string tail = t.tail;
    if (rng_.chance(0.5)) {
      std::set<EntityName> pool_set;
      for (const Triplet& x : kg_.triplets()) {
        if (x.relation == t.relation) pool_set.insert(x.tail);
      }
      std::vector<EntityName> pool;
      for (const EntityName& cand : pool_set) {
        if (!kg_.entails(obj.name, t.relation, cand, hop_)) pool.push_back(cand);
      }
      if (!pool.empty()) tail = pool[rng_.index(pool.size())];
    }
    Step ver;
    ver.function = FunctionName::VerifyKG;
    ver.text.relation = t.relation;
    ver.text.tail = tail;
    ver.inputs = {concept_step};
    parts.program.steps.push_back(std::move(ver));
    parts.core_query = "verify_kg";
    parts.group = t.relation;
    bind_reference(ref, lib_, false, parts);
    parts.role_bindings["core.tail"] = tail;
    return parts;
  }

  SampleResult finish(BuildParts parts) {
    ValidationReport validation = validate_program(parts.program);
    if (!validation.ok()) return SkipReason::NoPlan;

    ExecResult result = execute(parts.program, sg_, kg_, hop_);
    if (!exec_ok(result)) {
      switch (exec_error(result).kind) {
        case ExecErrorKind::NoAnswer: return SkipReason::NoAnswer;
        case ExecErrorKind::RecognitionArity:
        case ExecErrorKind::RecognitionAmbiguous: return SkipReason::Ambiguous;
      }
      return SkipReason::ExecError;
    }
    const Trace& trace = exec_trace(result);

    QASample sample;
    try {
      AssembledTemplate tmpl =
          lib_.select_components(parts.core_query, parts.group, parts.requests, rng_);
      std::map<std::string, std::string> bindings;
      for (const auto& [slot, role] : tmpl.binding_plan) {
        auto it = parts.role_bindings.find(role);
        if (it == parts.role_bindings.end()) return SkipReason::TemplateMissing;
        bindings[slot] = it->second;
      }
      sample.question = realize(tmpl, bindings);
    } catch (const ConfigError&) {
      return SkipReason::TemplateMissing;
    }

    sample.image_id = sg_.image_id;
    sample.answer = trace.answer;
    sample.program = std::move(parts.program);
    sample.trace = trace;
    sample.question_type = question_type(sample.program);
    sample.intended_tail = parts.intended_tail;
    extract_subgraphs(sample);
    return sample;
  }

  // Minimal sub scene graph: every object in some non-Initial set output,
  // the edges used by Relate steps, and those edges' endpoints. Minimal sub
  // knowledge graph: one witness per kg-backed step output.
  void extract_subgraphs(QASample& sample) {
    std::set<ObjectId> ids;
    std::set<RelationEdge> edges;
    std::set<Triplet> triplets;
    const Program& p = sample.program;
    const Trace& trace = sample.trace;

    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      const Step& s = p.steps[i];
      const StepValue& v = trace.steps[i];
      if (v.kind == ValueKind::ObjectSet && s.function != FunctionName::Initial) {
        ids.insert(v.object_ids.begin(), v.object_ids.end());
      }
      if (s.function == FunctionName::Relate || s.function == FunctionName::RelateReverse) {
        const auto& input = trace.steps[s.inputs[0]].object_ids;
        const auto& output = v.object_ids;
        auto contains = [](const std::vector<ObjectId>& xs, ObjectId x) {
          return std::binary_search(xs.begin(), xs.end(), x);
        };
        for (const RelationEdge& e : sg_.edges) {
          if (e.predicate != *s.text.predicate) continue;
          const bool forward = s.function == FunctionName::Relate;
          ObjectId in_end = forward ? e.subject : e.object;
          ObjectId out_end = forward ? e.object : e.subject;
          if (contains(input, in_end) && contains(output, out_end)) {
            edges.insert(e);
            ids.insert(e.subject);
            ids.insert(e.object);
          }
        }
      }
      auto add_witness = [&](const std::string& head, const std::string& rel,
                             const std::string& tail) {
        if (auto w = kg_.entail_witness(head, rel, tail, hop_)) {
          triplets.insert(w->begin(), w->end());
        }
      };
      if (s.function == FunctionName::GroundKG) {
        for (ObjectId id : v.object_ids) {
          add_witness(object_of(sg_, id).name, *s.text.relation, *s.text.tail);
        }
      } else if (s.function == FunctionName::QueryKG) {
        add_witness(trace.steps[s.inputs[0]].concept_name, *s.text.relation, v.concept_name);
      } else if (s.function == FunctionName::VerifyKG && v.truth) {
        add_witness(trace.steps[s.inputs[0]].concept_name, *s.text.relation, *s.text.tail);
      }
    }

    sample.sub_scene_graph.image_id = sg_.image_id;
    for (ObjectId id : ids) sample.sub_scene_graph.objects.push_back(object_of(sg_, id));
    sample.sub_scene_graph.edges.assign(edges.begin(), edges.end());
    sample.sub_knowledge_graph.assign(triplets.begin(), triplets.end());
  }

  const SceneGraph& sg_;
  const GeneratorContext& ctx_;
  const KnowledgeGraph& kg_;
  const ComponentLibrary& lib_;
  Rng& rng_;
  std::size_t hop_;
};

}  // namespace

GeneratorContext make_context(const std::vector<SceneGraph>& graphs, const KnowledgeGraph& kg,
                              const ComponentLibrary& templates, GeneratorOptions options) {
  GeneratorContext ctx;
  ctx.kg = &kg;
  ctx.templates = &templates;
  ctx.options = options;
  std::set<std::string> names, attrs;
  for (const SceneGraph& g : graphs) {
    for (const ObjectNode& o : g.objects) {
      names.insert(o.name);
      attrs.insert(o.attributes.begin(), o.attributes.end());
    }
  }
  ctx.distractor_names.assign(names.begin(), names.end());
  ctx.distractor_attributes.assign(attrs.begin(), attrs.end());
  return ctx;
}

SampleResult generate_sample(const SceneGraph& sg, const GeneratorContext& ctx, Rng& rng) {
  return SampleBuilder(sg, ctx, rng).build();
}

void GenerationReport::merge(const GenerationReport& other) {
  attempts += other.attempts;
  emitted += other.emitted;
  for (const auto& [k, v] : other.skips) skips[k] += v;
}

namespace {

struct ImageOutput {
  std::vector<QASample> samples;
  GenerationReport report;
};

ImageOutput generate_for_image(const SceneGraph& sg, const GeneratorContext& ctx,
                               std::size_t quota, std::uint64_t seed) {
  ImageOutput out;
  if (sg.objects.empty()) {
    out.report.attempts = 1;
    out.report.skips[std::string(to_string(SkipReason::EmptyScene))] = 1;
    return out;
  }
  const std::uint64_t image_seed = derive_seed(seed, sg.image_id);
  const std::size_t budget = quota * 10;
  std::set<std::string> seen;
  for (std::size_t draw = 0; draw < budget && out.samples.size() < quota; ++draw) {
    out.report.attempts++;
    const std::uint64_t draw_seed = derive_seed(image_seed, std::to_string(draw));
    Rng rng(draw_seed);
    SampleResult r = generate_sample(sg, ctx, rng);
    if (std::holds_alternative<SkipReason>(r)) {
      out.report.skips[std::string(to_string(std::get<SkipReason>(r)))]++;
      continue;
    }
    QASample sample = std::get<QASample>(std::move(r));
    std::string key = sample.question + '\x1f' + sample.answer + '\x1f' +
                      serialize_program(sample.program);
    if (!seen.insert(std::move(key)).second) {
      out.report.skips[std::string(to_string(SkipReason::Duplicate))]++;
      continue;
    }

    // Post-generation sweep: the stored trace must replay exactly.
    ExecResult replay = execute(sample.program, sg, *ctx.kg, ctx.options.hop_bound);
    if (!exec_ok(replay) || exec_trace(replay) != sample.trace ||
        exec_trace(replay).answer != sample.answer) {
      throw std::logic_error("generator replay mismatch on image " + sg.image_id);
    }

    sample.sample_id = sg.image_id + "#" + std::to_string(out.samples.size());
    sample.seed = draw_seed;
    out.report.emitted++;
    out.samples.push_back(std::move(sample));
  }
  return out;
}

}  // namespace

CorpusResult generate_corpus(const std::vector<SceneGraph>& graphs, const GeneratorContext& ctx,
                             std::size_t quota, std::uint64_t seed, std::size_t workers) {
  if (quota < 1) throw ConfigError("generate_corpus: quota must be >= 1");

  std::vector<const SceneGraph*> ordered;
  ordered.reserve(graphs.size());
  for (const SceneGraph& g : graphs) ordered.push_back(&g);
  std::sort(ordered.begin(), ordered.end(),
            [](const SceneGraph* a, const SceneGraph* b) { return a->image_id < b->image_id; });

  std::vector<ImageOutput> outputs(ordered.size());
  if (workers <= 1 || ordered.size() <= 1) {
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      outputs[i] = generate_for_image(*ordered[i], ctx, quota, seed);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= ordered.size()) return;
        outputs[i] = generate_for_image(*ordered[i], ctx, quota, seed);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, ordered.size()); ++w) {
      pool.emplace_back(run);
    }
    for (std::thread& th : pool) th.join();
  }

  CorpusResult res;
  for (ImageOutput& out : outputs) {
    res.report.merge(out.report);
    for (QASample& s : out.samples) res.samples.push_back(std::move(s));
  }
  return res;
}

}  // namespace cric
