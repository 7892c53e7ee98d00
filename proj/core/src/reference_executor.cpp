#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "cric/errors.hpp"
#include "cric/executor.hpp"

// Differential-testing oracle. Everything here is deliberately naive: raw
// vector scans over sg.objects / sg.edges / kg.triplets(), set<> algebra,
// and its own IsA reachability by repeated full-table sweeps. It must not
// call the query methods of KnowledgeGraph or share executor helpers.

namespace cric {

namespace {

const ObjectNode* scan_object(const SceneGraph& sg, ObjectId id) {
  for (const ObjectNode& o : sg.objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

bool scan_has_attribute(const ObjectNode& o, const std::string& a) {
  for (const std::string& x : o.attributes) {
    if (x == a) return true;
  }
  return false;
}

bool scan_has_triplet(const KnowledgeGraph& kg, const std::string& h, const std::string& r,
                      const std::string& t) {
  for (const Triplet& trip : kg.triplets()) {
    if (trip.head == h && trip.relation == r && trip.tail == t) return true;
  }
  return false;
}

// Entities reachable from `from` via 1..hops IsA edges, by sweeping the
// whole triplet table once per hop.
std::set<std::string> sweep_isa(const KnowledgeGraph& kg, const std::string& from,
                                std::size_t hops) {
  std::set<std::string> reached;
  std::set<std::string> frontier{from};
  for (std::size_t depth = 0; depth < hops && !frontier.empty(); ++depth) {
    std::set<std::string> next;
    for (const Triplet& trip : kg.triplets()) {
      if (trip.relation != kIsA) continue;
      if (!frontier.count(trip.head)) continue;
      if (reached.insert(trip.tail).second) next.insert(trip.tail);
    }
    frontier = std::move(next);
  }
  return reached;
}

bool naive_entails(const KnowledgeGraph& kg, const std::string& h, const std::string& r,
                   const std::string& t, std::size_t max_hops) {
  if (max_hops == 0) return false;
  if (scan_has_triplet(kg, h, r, t)) return true;
  if (max_hops == 1) return false;
  for (const std::string& lifted : sweep_isa(kg, h, max_hops - 1)) {
    if (scan_has_triplet(kg, lifted, r, t)) return true;
  }
  return false;
}

StepValue make_set(const std::set<ObjectId>& ids) {
  return StepValue::object_set({ids.begin(), ids.end()});
}

}  // namespace

ExecResult brute_force_reference(const Program& p, const SceneGraph& sg,
                                 const KnowledgeGraph& kg, std::size_t hop_bound) {
  {
    ValidationReport report = validate_program(p);
    if (!report.ok()) {
      throw PreconditionError("brute_force_reference: invalid program at step " +
                              std::to_string(report.violations.front().step) + ": " +
                              report.violations.front().message);
    }
  }

  Trace trace;
  auto input_ids = [&](const Step& s, std::size_t k) {
    const auto& v = trace.steps[s.inputs[k]].object_ids;
    return std::set<ObjectId>(v.begin(), v.end());
  };

  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    StepValue value;
    switch (s.function) {
      case FunctionName::Initial: {
        std::set<ObjectId> all;
        for (const ObjectNode& o : sg.objects) all.insert(o.id);
        value = make_set(all);
        break;
      }
      case FunctionName::Find: {
        std::set<ObjectId> in = input_ids(s, 0), out;
        for (const ObjectNode& o : sg.objects) {
          if (!in.count(o.id)) continue;
          if (s.text.object && o.name != *s.text.object) continue;
          if (s.text.attribute && !scan_has_attribute(o, *s.text.attribute)) continue;
          out.insert(o.id);
        }
        value = make_set(out);
        break;
      }
      case FunctionName::Relate: {
        std::set<ObjectId> in = input_ids(s, 0), out;
        for (const RelationEdge& e : sg.edges) {
          if (e.predicate == *s.text.predicate && in.count(e.subject)) out.insert(e.object);
        }
        value = make_set(out);
        break;
      }
      case FunctionName::RelateReverse: {
        std::set<ObjectId> in = input_ids(s, 0), out;
        for (const RelationEdge& e : sg.edges) {
          if (e.predicate == *s.text.predicate && in.count(e.object)) out.insert(e.subject);
        }
        value = make_set(out);
        break;
      }
      case FunctionName::Recognition: {
        std::set<ObjectId> in = input_ids(s, 0);
        if (in.size() != 1) {
          return ExecError{ExecErrorKind::RecognitionArity, i, "input size != 1"};
        }
        const ObjectNode* o = scan_object(sg, *in.begin());
        std::set<std::string> matches;
        std::vector<std::string> candidates = o->attributes;
        candidates.push_back(o->name);
        for (const std::string& c : candidates) {
          if (kg.closure_hops() == 0) break;
          if (sweep_isa(kg, c, kg.closure_hops()).count(*s.text.type_name)) {
            matches.insert(c);
          }
        }
        if (matches.size() != 1) {
          return ExecError{ExecErrorKind::RecognitionAmbiguous, i,
                           std::to_string(matches.size()) + " matches"};
        }
        value = StepValue::concept_value(*matches.begin());
        break;
      }
      case FunctionName::And: {
        std::set<ObjectId> a = input_ids(s, 0), b = input_ids(s, 1), out;
        for (ObjectId id : a) {
          if (b.count(id)) out.insert(id);
        }
        value = make_set(out);
        break;
      }
      case FunctionName::Or: {
        std::set<ObjectId> out = input_ids(s, 0);
        for (ObjectId id : input_ids(s, 1)) out.insert(id);
        value = make_set(out);
        break;
      }
      case FunctionName::Exist:
        value = StepValue::boolean(!input_ids(s, 0).empty());
        break;
      case FunctionName::Count:
        value = StepValue::count(input_ids(s, 0).size());
        break;
      case FunctionName::GroundKG: {
        std::set<ObjectId> out;
        for (ObjectId id : input_ids(s, 0)) {
          const ObjectNode* o = scan_object(sg, id);
          if (naive_entails(kg, o->name, *s.text.relation, *s.text.tail, hop_bound)) {
            out.insert(id);
          }
        }
        value = make_set(out);
        break;
      }
      case FunctionName::QueryKG: {
        const std::string& head = trace.steps[s.inputs[0]].concept_name;
        std::set<std::string> tails;
        for (const Triplet& trip : kg.triplets()) {
          if (trip.relation != *s.text.relation) continue;
          if (naive_entails(kg, head, trip.relation, trip.tail, hop_bound)) {
            tails.insert(trip.tail);
          }
        }
        if (tails.empty()) {
          return ExecError{ExecErrorKind::NoAnswer, i, "empty tail set"};
        }
        value = StepValue::concept_value(*tails.begin());
        break;
      }
      case FunctionName::VerifyKG:
        value = StepValue::boolean(naive_entails(kg, trace.steps[s.inputs[0]].concept_name,
                                                 *s.text.relation, *s.text.tail, hop_bound));
        break;
    }
    trace.steps.push_back(std::move(value));
  }
  if (!trace.steps.empty()) trace.answer = render_answer(trace.steps.back());
  return trace;
}

}  // namespace cric
