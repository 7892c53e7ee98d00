#include "cric/program.hpp"

#include <algorithm>

namespace cric {

namespace {

constexpr std::array<std::string_view, 4> kValueKindNames = {"ObjectSet", "Concept", "Number",
                                                             "Boolean"};

constexpr std::array<std::string_view, kFunctionCount> kFunctionNames = {
    "Initial", "Find",  "Relate", "RelateReverse", "Recognition", "And",
    "Or",      "Exist", "Count",  "GroundKG",      "QueryKG",     "VerifyKG"};

constexpr std::array<std::string_view, 7> kTextFieldNames = {
    "object", "attribute", "predicate", "type", "relation", "tail", "head"};

using VK = ValueKind;
using TF = TextField;

std::array<FunctionSignature, kFunctionCount> make_table() {
  return {{
      {FunctionName::Initial, 0, {VK::ObjectSet, VK::ObjectSet}, VK::ObjectSet, {}, {}, 0},
      {FunctionName::Find, 1, {VK::ObjectSet, VK::ObjectSet}, VK::ObjectSet,
       {}, {TF::Object, TF::Attribute}, 1},
      {FunctionName::Relate, 1, {VK::ObjectSet, VK::ObjectSet}, VK::ObjectSet,
       {TF::Predicate}, {}, 0},
      {FunctionName::RelateReverse, 1, {VK::ObjectSet, VK::ObjectSet}, VK::ObjectSet,
       {TF::Predicate}, {}, 0},
      {FunctionName::Recognition, 1, {VK::ObjectSet, VK::ObjectSet}, VK::Concept,
       {TF::Type}, {}, 0},
      {FunctionName::And, 2, {VK::ObjectSet, VK::ObjectSet}, VK::ObjectSet, {}, {}, 0},
      {FunctionName::Or, 2, {VK::ObjectSet, VK::ObjectSet}, VK::ObjectSet, {}, {}, 0},
      {FunctionName::Exist, 1, {VK::ObjectSet, VK::ObjectSet}, VK::Boolean, {}, {}, 0},
      {FunctionName::Count, 1, {VK::ObjectSet, VK::ObjectSet}, VK::Number, {}, {}, 0},
      {FunctionName::GroundKG, 1, {VK::ObjectSet, VK::ObjectSet}, VK::ObjectSet,
       {TF::Relation, TF::Tail}, {}, 0},
      {FunctionName::QueryKG, 1, {VK::Concept, VK::ObjectSet}, VK::Concept,
       {TF::Relation}, {}, 0},
      {FunctionName::VerifyKG, 1, {VK::Concept, VK::ObjectSet}, VK::Boolean,
       {TF::Relation, TF::Tail}, {}, 0},
  }};
}

const std::array<FunctionSignature, kFunctionCount>& table() {
  static const std::array<FunctionSignature, kFunctionCount> t = make_table();
  return t;
}

}  // namespace

std::string_view to_string(ValueKind k) { return kValueKindNames[static_cast<std::size_t>(k)]; }

std::string_view to_string(FunctionName f) {
  return kFunctionNames[static_cast<std::size_t>(f)];
}

std::optional<FunctionName> parse_function_name(std::string_view s) {
  for (std::size_t i = 0; i < kFunctionNames.size(); ++i) {
    if (kFunctionNames[i] == s) return static_cast<FunctionName>(i);
  }
  return std::nullopt;
}

std::string_view to_string(TextField f) { return kTextFieldNames[static_cast<std::size_t>(f)]; }

const FunctionSignature& signature_of(FunctionName f) {
  return table()[static_cast<std::size_t>(f)];
}

const std::array<FunctionSignature, kFunctionCount>& signature_table() { return table(); }

bool signature_registry_complete() {
  static_assert(kFunctionCount == 12, "the DSL defines exactly 12 basic functions");
  for (std::size_t i = 0; i < kFunctionCount; ++i) {
    if (table()[i].function != static_cast<FunctionName>(i)) return false;
  }
  return true;
}

ValueKind output_kind(const Step& s) { return signature_of(s.function).output_kind; }

ValueKind program_output_kind(const Program& p) {
  return p.steps.empty() ? ValueKind::ObjectSet : output_kind(p.steps.back());
}

bool is_answer_program(const Program& p) {
  return !p.steps.empty() && program_output_kind(p) != ValueKind::ObjectSet;
}

const std::optional<std::string>& text_field(const TextArgs& t, TextField f) {
  switch (f) {
    case TF::Object: return t.object;
    case TF::Attribute: return t.attribute;
    case TF::Predicate: return t.predicate;
    case TF::Type: return t.type_name;
    case TF::Relation: return t.relation;
    case TF::Tail: return t.tail;
    case TF::Head: return t.head;
  }
  return t.object;  // unreachable
}

void set_text_field(TextArgs& t, TextField f, std::string value) {
  switch (f) {
    case TF::Object: t.object = std::move(value); return;
    case TF::Attribute: t.attribute = std::move(value); return;
    case TF::Predicate: t.predicate = std::move(value); return;
    case TF::Type: t.type_name = std::move(value); return;
    case TF::Relation: t.relation = std::move(value); return;
    case TF::Tail: t.tail = std::move(value); return;
    case TF::Head: t.head = std::move(value); return;
  }
}

std::vector<std::pair<TextField, std::string>> present_text_fields(const TextArgs& t) {
  std::vector<std::pair<TextField, std::string>> out;
  for (TextField f : {TF::Object, TF::Attribute, TF::Predicate, TF::Type, TF::Relation,
                      TF::Tail, TF::Head}) {
    if (const auto& v = text_field(t, f)) out.emplace_back(f, *v);
  }
  return out;
}

ValidationReport validate_program(const Program& p) {
  ValidationReport report;
  auto violation = [&](std::size_t step, std::string msg) {
    report.violations.push_back({step, std::move(msg)});
  };

  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    const FunctionSignature& sig = signature_of(s.function);
    const std::string fname(to_string(s.function));

    if (s.inputs.size() != sig.arity) {
      violation(i, fname + " takes " + std::to_string(sig.arity) + " input(s), got " +
                       std::to_string(s.inputs.size()));
    }
    for (std::size_t k = 0; k < s.inputs.size(); ++k) {
      if (s.inputs[k] >= i) {
        violation(i, fname + " input #" + std::to_string(k) + " references step " +
                         std::to_string(s.inputs[k]) + ", which is not earlier");
        continue;
      }
      if (k < sig.arity) {
        ValueKind got = output_kind(p.steps[s.inputs[k]]);
        ValueKind want = sig.input_kinds[k];
        if (got != want) {
          violation(i, fname + " consumes " + std::string(to_string(want)) +
                           " but receives " + std::string(to_string(got)) + " from step " +
                           std::to_string(s.inputs[k]));
        }
      }
    }

    // Exact text-field discipline: required present, nothing extraneous,
    // and at least min_text of the optional group.
    std::size_t optional_present = 0;
    for (const auto& [field, value] : present_text_fields(s.text)) {
      const bool required = std::find(sig.required_text.begin(), sig.required_text.end(),
                                      field) != sig.required_text.end();
      const bool optional = std::find(sig.optional_text.begin(), sig.optional_text.end(),
                                      field) != sig.optional_text.end();
      if (!required && !optional) {
        violation(i, fname + " does not accept text field '" +
                         std::string(to_string(field)) + "'");
      }
      if (optional) ++optional_present;
      if (value.empty()) {
        violation(i, fname + " has empty text field '" + std::string(to_string(field)) + "'");
      }
    }
    for (TextField f : sig.required_text) {
      if (!text_field(s.text, f)) {
        violation(i, fname + " requires text field '" + std::string(to_string(f)) + "'");
      }
    }
    if (optional_present < sig.min_text) {
      violation(i, fname + " needs at least " + std::to_string(sig.min_text) +
                       " of its optional text fields");
    }
  }
  return report;
}

FunctionName question_type(const Program& p) {
  return p.steps.empty() ? FunctionName::Initial : p.steps.back().function;
}

}  // namespace cric
