#include "cric/template_engine.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cric/errors.hpp"
#include "cric/text_util.hpp"

namespace cric {

namespace {

constexpr std::array<std::string_view, 5> kKindNames = {
    "QueryObject", "QueryElement", "DecorateByAttribute", "DecorateByVisualRelation",
    "DecorateByKnowledge"};

// Collect <slot> names appearing in a surface string.
std::vector<std::string> slots_in(const std::string& surface) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = surface.find('<', pos)) != std::string::npos) {
    std::size_t end = surface.find('>', pos);
    if (end == std::string::npos) break;
    out.push_back(surface.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return out;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

ComponentKind kind_of(DecorationKind k) {
  switch (k) {
    case DecorationKind::Attribute: return ComponentKind::DecorateByAttribute;
    case DecorationKind::VisualRelation: return ComponentKind::DecorateByVisualRelation;
    case DecorationKind::Knowledge: return ComponentKind::DecorateByKnowledge;
  }
  return ComponentKind::DecorateByAttribute;
}

}  // namespace

std::string_view to_string(ComponentKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<ComponentKind> parse_component_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<ComponentKind>(i);
  }
  return std::nullopt;
}

ComponentLibrary ComponentLibrary::load(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("template library: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc.contains("components")) {
    throw ParseError("template library: expected {version, components[]}");
  }
  if (doc["version"].get<int>() != 1) {
    throw ParseError("template library: unsupported version");
  }
  ComponentLibrary lib;
  if (doc.contains("relation_surfaces")) {
    for (auto& [k, v] : doc["relation_surfaces"].items()) {
      lib.relation_surfaces_[k] = v.get<std::string>();
    }
  }
  if (doc.contains("relation_surfaces_plural")) {
    for (auto& [k, v] : doc["relation_surfaces_plural"].items()) {
      lib.relation_surfaces_plural_[k] = v.get<std::string>();
    }
  }
  for (const auto& jc : doc["components"]) {
    TemplateComponent c;
    c.id = jc.at("id").get<std::string>();
    auto kind = parse_component_kind(jc.at("kind").get<std::string>());
    if (!kind) throw ParseError("template component '" + c.id + "': unknown kind");
    c.kind = *kind;
    if (jc.contains("query")) c.query = jc["query"].get<std::string>();
    if (jc.contains("group")) c.group = jc["group"].get<std::string>();
    if (jc.contains("tag")) c.tag = jc["tag"].get<std::string>();
    for (auto& [name, kind_str] : jc.at("slots").items()) {
      c.slots[name] = kind_str.get<std::string>();
    }
    for (const auto& v : jc.at("variants")) c.variants.push_back(v.get<std::string>());
    lib.components_.push_back(std::move(c));
  }
  lib.validate();
  return lib;
}

ComponentLibrary ComponentLibrary::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template library: " + path);
  return load(in);
}

ComponentLibrary ComponentLibrary::from_components(std::vector<TemplateComponent> comps,
                                                   std::map<std::string, std::string> surfaces) {
  ComponentLibrary lib;
  lib.components_ = std::move(comps);
  lib.relation_surfaces_ = std::move(surfaces);
  lib.validate();
  return lib;
}

void ComponentLibrary::validate() const {
  for (const TemplateComponent& c : components_) {
    if (c.variants.empty()) {
      throw ParseError("template component '" + c.id + "': needs at least one variant");
    }
    for (const std::string& v : c.variants) {
      std::set<std::string> mentioned;
      for (const std::string& s : slots_in(v)) {
        if (s == "group") continue;  // substituted at assembly time
        if (!c.slots.count(s)) {
          throw ParseError("template component '" + c.id +
                           "': variant mentions undeclared slot <" + s + ">");
        }
        mentioned.insert(s);
      }
      for (const auto& [name, unused] : c.slots) {
        (void)unused;
        if (!mentioned.count(name)) {
          throw ParseError("template component '" + c.id + "': variant '" + v +
                           "' omits declared slot <" + name + ">");
        }
      }
    }
  }
}

const std::string& ComponentLibrary::relation_surface(const std::string& relation) const {
  auto it = relation_surfaces_.find(relation);
  if (it == relation_surfaces_.end()) {
    throw ConfigError("no relation surface configured for '" + relation + "'");
  }
  return it->second;
}

const std::string& ComponentLibrary::relation_surface_plural(const std::string& relation) const {
  auto it = relation_surfaces_plural_.find(relation);
  if (it != relation_surfaces_plural_.end()) return it->second;
  return relation_surface(relation);
}

bool ComponentLibrary::has_relation_surface(const std::string& relation) const {
  return relation_surfaces_.count(relation) > 0;
}

const TemplateComponent* ComponentLibrary::find_core(const std::string& query,
                                                     const std::string& group) const {
  const TemplateComponent* generic = nullptr;
  for (const TemplateComponent& c : components_) {
    if (c.kind != ComponentKind::QueryObject && c.kind != ComponentKind::QueryElement) continue;
    if (c.query != query) continue;
    if (c.group == group) return &c;
    if (c.group == "*" && !generic) generic = &c;
  }
  return generic;
}

const TemplateComponent* ComponentLibrary::find_decoration(DecorationKind kind,
                                                           const std::string& tag) const {
  const ComponentKind want = kind_of(kind);
  const TemplateComponent* untagged = nullptr;
  for (const TemplateComponent& c : components_) {
    if (c.kind != want) continue;
    if (c.tag == tag) return &c;
    if (c.tag.empty() && !untagged) untagged = &c;
  }
  return tag.empty() ? untagged : nullptr;
}

AssembledTemplate ComponentLibrary::select_components(
    const std::string& core_query, const std::string& group,
    const std::vector<DecorationRequest>& decorations, Rng& rng) const {
  const TemplateComponent* core = find_core(core_query, group);
  if (!core) {
    throw ConfigError("no template component for (" + core_query + ", " + group + ")");
  }

  AssembledTemplate t;
  t.component_ids.push_back(core->id);
  t.surface = core->variants[rng.index(core->variants.size())];
  t.surface = replace_all(t.surface, "<group>", group);

  std::set<std::string> used;
  for (const std::string& s : slots_in(t.surface)) {
    used.insert(s);
    if (s != "subject") t.binding_plan[s] = "core." + s;
  }

  for (std::size_t d = 0; d < decorations.size(); ++d) {
    const DecorationRequest& req = decorations[d];
    const TemplateComponent* deco = find_decoration(req.kind, req.tag);
    if (!deco) {
      throw ConfigError("no template component for (" + std::string(to_string(kind_of(req.kind))) +
                        ", tag '" + req.tag + "')");
    }
    t.component_ids.push_back(deco->id);
    std::string fragment = deco->variants[rng.index(deco->variants.size())];

    // Rename the decoration's non-subject slots to stay unique, then expand
    // the current <subject> with the fragment; the fragment's own <subject>
    // becomes the new nesting point.
    for (const auto& [name, unused] : deco->slots) {
      (void)unused;
      if (name == "subject") continue;
      std::string unique = name;
      for (int n = 2; used.count(unique); ++n) unique = name + std::to_string(n);
      used.insert(unique);
      if (unique != name) fragment = replace_all(fragment, "<" + name + ">", "<" + unique + ">");
      t.binding_plan[unique] = "deco" + std::to_string(d) + "." + name;
    }
    t.surface = replace_all(t.surface, "<subject>", fragment);
  }
  t.binding_plan["subject"] = "head";
  return t;
}

std::vector<std::string> ComponentLibrary::missing_recognition_groups(
    const std::vector<std::string>& categories) const {
  std::vector<std::string> missing;
  for (const std::string& g : categories) {
    if (!find_core("recognize", g)) missing.push_back(g);
  }
  return missing;
}

std::string realize(const AssembledTemplate& t,
                    const std::map<std::string, std::string>& bindings) {
  std::string s = t.surface;
  for (const std::string& slot : slots_in(s)) {
    auto it = bindings.find(slot);
    if (it == bindings.end()) {
      throw ConfigError("realize: no binding for slot <" + slot + ">");
    }
    s = replace_all(s, "<" + slot + ">", it->second);
  }
  if (s.find('<') != std::string::npos || s.find('>') != std::string::npos) {
    throw ConfigError("realize: unresolved slot marker in '" + s + "'");
  }
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  while (!s.empty() && (s.back() == '?' || s.back() == ' ')) s.pop_back();
  s = fix_articles(collapse_spaces(s));
  s.push_back('?');
  return s;
}

}  // namespace cric
