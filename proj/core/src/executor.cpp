#include "cric/executor.hpp"

#include <algorithm>
#include <map>

#include "cric/errors.hpp"

namespace cric {

StepValue StepValue::object_set(std::vector<ObjectId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  StepValue v;
  v.kind = ValueKind::ObjectSet;
  v.object_ids = std::move(ids);
  return v;
}

StepValue StepValue::concept_value(std::string value) {
  StepValue v;
  v.kind = ValueKind::Concept;
  v.concept_name = std::move(value);
  return v;
}

StepValue StepValue::count(std::uint64_t n) {
  StepValue v;
  v.kind = ValueKind::Number;
  v.number = n;
  return v;
}

StepValue StepValue::boolean(bool b) {
  StepValue v;
  v.kind = ValueKind::Boolean;
  v.truth = b;
  return v;
}

std::string render_answer(const StepValue& v) {
  switch (v.kind) {
    case ValueKind::Boolean:
      return v.truth ? "yes" : "no";
    case ValueKind::Number:
      return std::to_string(v.number);
    case ValueKind::Concept:
      return v.concept_name;
    case ValueKind::ObjectSet: {
      std::string out;
      for (std::size_t i = 0; i < v.object_ids.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(v.object_ids[i]);
      }
      return out;
    }
  }
  return {};
}

std::string_view to_string(ExecErrorKind k) {
  switch (k) {
    case ExecErrorKind::RecognitionArity: return "recognition_arity";
    case ExecErrorKind::RecognitionAmbiguous: return "recognition_ambiguous";
    case ExecErrorKind::NoAnswer: return "no_answer";
  }
  return "unknown";
}

namespace {

// Per-scene lookup tables; built once per execution.
struct SceneIndex {
  std::map<std::string, std::vector<ObjectId>> by_name;
  std::map<ObjectId, const ObjectNode*> by_id;
  std::map<std::pair<std::string, ObjectId>, std::vector<ObjectId>> objects_of_subject;
  std::map<std::pair<std::string, ObjectId>, std::vector<ObjectId>> subjects_of_object;

  explicit SceneIndex(const SceneGraph& sg) {
    for (const ObjectNode& o : sg.objects) {
      by_name[o.name].push_back(o.id);
      by_id[o.id] = &o;
    }
    for (const RelationEdge& e : sg.edges) {
      objects_of_subject[{e.predicate, e.subject}].push_back(e.object);
      subjects_of_object[{e.predicate, e.object}].push_back(e.subject);
    }
  }
};

bool has_attribute(const ObjectNode& o, const std::string& a) {
  return std::binary_search(o.attributes.begin(), o.attributes.end(), a);
}

std::vector<ObjectId> intersect(const std::vector<ObjectId>& a, const std::vector<ObjectId>& b) {
  std::vector<ObjectId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<ObjectId> unite(const std::vector<ObjectId>& a, const std::vector<ObjectId>& b) {
  std::vector<ObjectId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

ExecResult execute(const Program& p, const SceneGraph& sg, const KnowledgeGraph& kg,
                   std::size_t hop_bound) {
  {
    ValidationReport report = validate_program(p);
    if (!report.ok()) {
      throw PreconditionError("execute: invalid program at step " +
                              std::to_string(report.violations.front().step) + ": " +
                              report.violations.front().message);
    }
  }
  SceneIndex index(sg);

  Trace trace;
  trace.steps.reserve(p.steps.size());
  auto in = [&](const Step& s, std::size_t k) -> const StepValue& {
    return trace.steps[s.inputs[k]];
  };

  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    StepValue value;
    switch (s.function) {
      case FunctionName::Initial: {
        std::vector<ObjectId> ids;
        ids.reserve(sg.objects.size());
        for (const ObjectNode& o : sg.objects) ids.push_back(o.id);
        value = StepValue::object_set(std::move(ids));
        break;
      }
      case FunctionName::Find: {
        std::vector<ObjectId> out;
        for (ObjectId id : in(s, 0).object_ids) {
          const ObjectNode& o = *index.by_id.at(id);
          if (s.text.object && o.name != *s.text.object) continue;
          if (s.text.attribute && !has_attribute(o, *s.text.attribute)) continue;
          out.push_back(id);
        }
        value = StepValue::object_set(std::move(out));
        break;
      }
      case FunctionName::Relate:
      case FunctionName::RelateReverse: {
        const auto& adj = s.function == FunctionName::Relate ? index.objects_of_subject
                                                             : index.subjects_of_object;
        std::vector<ObjectId> out;
        for (ObjectId id : in(s, 0).object_ids) {
          auto it = adj.find({*s.text.predicate, id});
          if (it == adj.end()) continue;
          out.insert(out.end(), it->second.begin(), it->second.end());
        }
        value = StepValue::object_set(std::move(out));
        break;
      }
      case FunctionName::Recognition: {
        const auto& ids = in(s, 0).object_ids;
        if (ids.size() != 1) {
          return ExecError{ExecErrorKind::RecognitionArity, i,
                           "Recognition needs exactly one object, got " +
                               std::to_string(ids.size())};
        }
        const ObjectNode& o = *index.by_id.at(ids.front());
        std::vector<std::string> matches;
        auto consider = [&](const std::string& c) {
          if (kg.in_category(c, *s.text.type_name)) matches.push_back(c);
        };
        consider(o.name);
        for (const std::string& a : o.attributes) consider(a);
        std::sort(matches.begin(), matches.end());
        matches.erase(std::unique(matches.begin(), matches.end()), matches.end());
        if (matches.size() != 1) {
          return ExecError{ExecErrorKind::RecognitionAmbiguous, i,
                           std::to_string(matches.size()) + " concepts of type '" +
                               *s.text.type_name + "' on object " +
                               std::to_string(o.id)};
        }
        value = StepValue::concept_value(matches.front());
        break;
      }
      case FunctionName::And:
        value = StepValue::object_set(intersect(in(s, 0).object_ids, in(s, 1).object_ids));
        break;
      case FunctionName::Or:
        value = StepValue::object_set(unite(in(s, 0).object_ids, in(s, 1).object_ids));
        break;
      case FunctionName::Exist:
        value = StepValue::boolean(!in(s, 0).object_ids.empty());
        break;
      case FunctionName::Count:
        value = StepValue::count(in(s, 0).object_ids.size());
        break;
      case FunctionName::GroundKG: {
        std::vector<ObjectId> out;
        for (ObjectId id : in(s, 0).object_ids) {
          const ObjectNode& o = *index.by_id.at(id);
          if (kg.entails(o.name, *s.text.relation, *s.text.tail, hop_bound)) {
            out.push_back(id);
          }
        }
        value = StepValue::object_set(std::move(out));
        break;
      }
      case FunctionName::QueryKG: {
        std::vector<EntityName> tails =
            kg.query_tails(in(s, 0).concept_name, *s.text.relation, hop_bound);
        if (tails.empty()) {
          return ExecError{ExecErrorKind::NoAnswer, i,
                           "no tail for <" + in(s, 0).concept_name + ", " +
                               *s.text.relation + ", _>"};
        }
        value = StepValue::concept_value(tails.front());  // smallest; ties documented by generator
        break;
      }
      case FunctionName::VerifyKG:
        value = StepValue::boolean(
            kg.entails(in(s, 0).concept_name, *s.text.relation, *s.text.tail, hop_bound));
        break;
    }
    trace.steps.push_back(std::move(value));
  }
  if (!trace.steps.empty()) trace.answer = render_answer(trace.steps.back());
  return trace;
}

}  // namespace cric
