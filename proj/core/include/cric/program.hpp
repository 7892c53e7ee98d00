#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cric {

enum class ValueKind : std::uint8_t { ObjectSet, Concept, Number, Boolean };

std::string_view to_string(ValueKind k);

// The 12 basic functions. The registry below is the single source of truth
// for arities, input kinds, output kinds and required text fields.
enum class FunctionName : std::uint8_t {
  Initial,
  Find,
  Relate,
  RelateReverse,
  Recognition,
  And,
  Or,
  Exist,
  Count,
  GroundKG,
  QueryKG,
  VerifyKG,
};

inline constexpr std::size_t kFunctionCount = 12;

std::string_view to_string(FunctionName f);
std::optional<FunctionName> parse_function_name(std::string_view s);

// Text inputs bound from the graphs. Which fields must be present is
// dictated by the owning function's signature.
struct TextArgs {
  std::optional<std::string> object;
  std::optional<std::string> attribute;
  std::optional<std::string> predicate;
  std::optional<std::string> type_name;
  std::optional<std::string> relation;
  std::optional<std::string> tail;
  std::optional<std::string> head;

  bool operator==(const TextArgs&) const = default;
};

struct Step {
  FunctionName function = FunctionName::Initial;
  TextArgs text;
  std::vector<std::size_t> inputs;  // indices of earlier steps

  bool operator==(const Step&) const = default;
};

struct Program {
  std::vector<Step> steps;

  bool empty() const { return steps.empty(); }
  std::size_t size() const { return steps.size(); }
  bool operator==(const Program&) const = default;
};

enum class TextField : std::uint8_t { Object, Attribute, Predicate, Type, Relation, Tail, Head };

std::string_view to_string(TextField f);

// One row of the signature table.
struct FunctionSignature {
  FunctionName function;
  std::size_t arity;                      // number of step inputs
  std::array<ValueKind, 2> input_kinds;   // first `arity` entries meaningful
  ValueKind output_kind;
  std::vector<TextField> required_text;   // must be present
  std::vector<TextField> optional_text;   // may be present
  std::size_t min_text = 0;               // at least this many of the above
};

// Indexed by FunctionName; a static check asserts it covers exactly the 12
// functions so a new function cannot ship without a signature.
const FunctionSignature& signature_of(FunctionName f);
const std::array<FunctionSignature, kFunctionCount>& signature_table();
bool signature_registry_complete();

ValueKind output_kind(const Step& s);
ValueKind program_output_kind(const Program& p);

// A DSL-valid program additionally qualifies as a question program only if
// its final step yields Concept, Number or Boolean.
bool is_answer_program(const Program& p);

struct Violation {
  std::size_t step = 0;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Structural validation against the signature table: wiring bounds, arity,
// input kinds, exact text-field sets. Report-style; never throws.
ValidationReport validate_program(const Program& p);

// Question type of a sample = the function producing the final answer.
FunctionName question_type(const Program& p);

// Text-args field presence helpers shared by validator/serializer/executor.
std::vector<std::pair<TextField, std::string>> present_text_fields(const TextArgs& t);
const std::optional<std::string>& text_field(const TextArgs& t, TextField f);
void set_text_field(TextArgs& t, TextField f, std::string value);

}  // namespace cric
