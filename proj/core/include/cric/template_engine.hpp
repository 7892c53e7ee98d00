#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cric/rng.hpp"

namespace cric {

enum class ComponentKind : std::uint8_t {
  QueryObject,
  QueryElement,
  DecorateByAttribute,
  DecorateByVisualRelation,
  DecorateByKnowledge,
};

std::string_view to_string(ComponentKind k);
std::optional<ComponentKind> parse_component_kind(std::string_view s);

// A reusable surface fragment. Core components (QueryObject/QueryElement)
// carry a query family ("exist", "count", "recognize", "name", "query_kg",
// "verify_kg", "exist_or") and an applicable group ("*" = any). Decoration
// components nest inside the core's <subject> slot; a tag distinguishes
// same-kind alternatives (e.g. subject-side vs object-side relations).
struct TemplateComponent {
  std::string id;
  ComponentKind kind = ComponentKind::QueryObject;
  std::string query;                        // core components only
  std::string group = "*";
  std::string tag;                          // decoration components only
  std::map<std::string, std::string> slots; // name -> slot kind
  std::vector<std::string> variants;
};

enum class DecorationKind : std::uint8_t { Attribute, VisualRelation, Knowledge };

struct DecorationRequest {
  DecorationKind kind = DecorationKind::Attribute;
  std::string tag;  // optional component tag ("subject", "object", ...)
};

// Fully composed question skeleton. Slot names are unique; binding_plan maps
// each remaining slot to the graph-element role the generator must bind
// ("head" for the innermost subject, "core.<slot>", "deco<i>.<slot>").
struct AssembledTemplate {
  std::vector<std::string> component_ids;
  std::string surface;
  std::map<std::string, std::string> binding_plan;
};

class ComponentLibrary {
 public:
  // Library file: {"version":1, "relation_surfaces":{...}, "components":[...]}.
  static ComponentLibrary load(std::istream& in);
  static ComponentLibrary load_file(const std::string& path);
  static ComponentLibrary from_components(std::vector<TemplateComponent> comps,
                                          std::map<std::string, std::string> surfaces);

  const std::vector<TemplateComponent>& components() const { return components_; }

  // Natural-language phrasing of a relation ("UsedFor" -> "is used for"),
  // with a plural-agreement form for plural subjects ("are used for").
  const std::string& relation_surface(const std::string& relation) const;
  const std::string& relation_surface_plural(const std::string& relation) const;
  bool has_relation_surface(const std::string& relation) const;

  bool has_core(const std::string& query, const std::string& group) const {
    return find_core(query, group) != nullptr;
  }

  // Dynamic assembly: pick the core component for (core_query, group) --
  // exact group first, then "*" -- then nest each decoration into the
  // current <subject> slot. Variant choice is uniform under rng. Throws
  // ConfigError naming the (query, group) pair when no component covers it.
  AssembledTemplate select_components(const std::string& core_query, const std::string& group,
                                      const std::vector<DecorationRequest>& decorations,
                                      Rng& rng) const;

  // Query-element coverage over the given concept categories; returns the
  // categories with neither a dedicated nor a generic recognition component.
  std::vector<std::string> missing_recognition_groups(
      const std::vector<std::string>& categories) const;

 private:
  std::vector<TemplateComponent> components_;
  std::map<std::string, std::string> relation_surfaces_;
  std::map<std::string, std::string> relation_surfaces_plural_;

  void validate() const;
  const TemplateComponent* find_core(const std::string& query, const std::string& group) const;
  const TemplateComponent* find_decoration(DecorationKind kind, const std::string& tag) const;
};

// Fill every slot, normalize whitespace, apply indefinite-article agreement
// and guarantee '?' termination. Throws ConfigError naming any unbound slot.
std::string realize(const AssembledTemplate& t, const std::map<std::string, std::string>& bindings);

}  // namespace cric
