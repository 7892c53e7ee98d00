#include "cric/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cric/errors.hpp"
#include "cric/program_text.hpp"
#include "cric/text_util.hpp"

namespace cric {

namespace {

using ojson = nlohmann::ordered_json;

ojson step_value_to_json(const StepValue& v) {
  ojson j;
  j["kind"] = std::string(to_string(v.kind));
  switch (v.kind) {
    case ValueKind::ObjectSet: j["ids"] = v.object_ids; break;
    case ValueKind::Concept: j["value"] = v.concept_name; break;
    case ValueKind::Number: j["value"] = v.number; break;
    case ValueKind::Boolean: j["value"] = v.truth; break;
  }
  return j;
}

StepValue step_value_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ObjectSet") return StepValue::object_set(j.at("ids").get<std::vector<ObjectId>>());
  if (kind == "Concept") return StepValue::concept_value(j.at("value").get<std::string>());
  if (kind == "Number") return StepValue::count(j.at("value").get<std::uint64_t>());
  if (kind == "Boolean") return StepValue::boolean(j.at("value").get<bool>());
  throw ParseError("unknown step value kind '" + kind + "'");
}

ojson scene_graph_to_json(const SceneGraph& g) {
  ojson rec;
  rec["objects"] = ojson::array();
  for (const ObjectNode& o : g.objects) {
    ojson jo;
    jo["id"] = o.id;
    jo["name"] = o.name;
    jo["attributes"] = o.attributes;
    jo["box"] = {{"x", o.box.x}, {"y", o.box.y}, {"w", o.box.w}, {"h", o.box.h}};
    rec["objects"].push_back(std::move(jo));
  }
  rec["relations"] = ojson::array();
  for (const RelationEdge& e : g.edges) {
    rec["relations"].push_back(
        {{"subject_id", e.subject}, {"predicate", e.predicate}, {"object_id", e.object}});
  }
  return rec;
}

SceneGraph scene_graph_from_json(const nlohmann::json& rec, const std::string& image_id) {
  SceneGraph g;
  g.image_id = image_id;
  for (const auto& jo : rec.at("objects")) {
    ObjectNode o;
    o.id = jo.at("id").get<ObjectId>();
    o.name = jo.at("name").get<std::string>();
    for (const auto& a : jo.at("attributes")) o.attributes.push_back(a.get<std::string>());
    const auto& jb = jo.at("box");
    o.box = {jb.at("x").get<double>(), jb.at("y").get<double>(), jb.at("w").get<double>(),
             jb.at("h").get<double>()};
    g.objects.push_back(std::move(o));
  }
  for (const auto& je : rec.at("relations")) {
    g.edges.push_back({je.at("subject_id").get<ObjectId>(),
                       je.at("predicate").get<std::string>(),
                       je.at("object_id").get<ObjectId>()});
  }
  return g;
}

std::vector<std::string> program_lines(const Program& p) {
  std::vector<std::string> lines;
  lines.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) lines.push_back(serialize_step(p.steps[i], i));
  return lines;
}

Program program_from_lines(const std::vector<std::string>& lines) {
  std::string text;
  for (const std::string& l : lines) {
    text += l;
    text.push_back('\n');
  }
  return parse_program(text);
}

}  // namespace

std::string sample_to_jsonl(const QASample& s) {
  ojson j;
  j["schema_version"] = kDatasetSchemaVersion;
  j["sample_id"] = s.sample_id;
  j["image_id"] = s.image_id;
  j["question"] = s.question;
  j["answer"] = s.answer;
  j["question_type"] = std::string(to_string(s.question_type));
  j["program"] = program_lines(s.program);
  ojson trace = ojson::array();
  for (const StepValue& v : s.trace.steps) trace.push_back(step_value_to_json(v));
  j["trace"] = std::move(trace);
  j["sub_scene_graph"] = scene_graph_to_json(s.sub_scene_graph);
  ojson kg = ojson::array();
  for (const Triplet& t : s.sub_knowledge_graph) {
    kg.push_back(ojson::array({t.head, t.relation, t.tail}));
  }
  j["sub_knowledge_graph"] = std::move(kg);
  if (s.intended_tail) j["intended_tail"] = *s.intended_tail;
  j["seed"] = s.seed;
  return j.dump();
}

QASample sample_from_jsonl(const std::string& line, std::size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
  }
  try {
    QASample s;
    if (j.at("schema_version").get<int>() != kDatasetSchemaVersion) {
      throw ParseError("unsupported schema version");
    }
    s.sample_id = j.at("sample_id").get<std::string>();
    s.image_id = j.at("image_id").get<std::string>();
    s.question = j.at("question").get<std::string>();
    s.answer = j.at("answer").get<std::string>();
    auto qt = parse_function_name(j.at("question_type").get<std::string>());
    if (!qt) throw ParseError("bad question_type");
    s.question_type = *qt;
    s.program = program_from_lines(j.at("program").get<std::vector<std::string>>());
    for (const auto& sv : j.at("trace")) s.trace.steps.push_back(step_value_from_json(sv));
    if (!s.trace.steps.empty()) s.trace.answer = s.answer;
    s.sub_scene_graph = scene_graph_from_json(j.at("sub_scene_graph"), s.image_id);
    for (const auto& t : j.at("sub_knowledge_graph")) {
      s.sub_knowledge_graph.push_back(
          {t.at(0).get<std::string>(), t.at(1).get<std::string>(), t.at(2).get<std::string>()});
    }
    if (j.contains("intended_tail")) s.intended_tail = j["intended_tail"].get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
  }
}

void write_corpus(const std::vector<QASample>& samples, std::ostream& out) {
  for (const QASample& s : samples) out << sample_to_jsonl(s) << '\n';
}

std::vector<QASample> read_corpus(std::istream& in) {
  std::vector<QASample> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    samples.push_back(sample_from_jsonl(line, lineno));
  }
  return samples;
}

std::vector<QASample> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus: " + path);
  return read_corpus(in);
}

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("prediction line " + std::to_string(lineno) + ": " + e.what());
    }
    PredictionRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    if (j.contains("steps")) {
      for (const auto& sv : j["steps"]) r.steps.push_back(step_value_from_json(sv));
    }
    if (j.contains("program")) {
      r.program = program_from_lines(j["program"].get<std::vector<std::string>>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PredictionRecord> read_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prediction file: " + path);
  return read_predictions(in);
}

void write_predictions(const std::vector<PredictionRecord>& predictions, std::ostream& out) {
  for (const PredictionRecord& p : predictions) {
    ojson j;
    j["sample_id"] = p.sample_id;
    j["answer"] = p.answer;
    if (!p.steps.empty()) {
      ojson steps = ojson::array();
      for (const StepValue& v : p.steps) steps.push_back(step_value_to_json(v));
      j["steps"] = std::move(steps);
    }
    if (p.program) j["program"] = program_lines(*p.program);
    out << j.dump() << '\n';
  }
}

std::string generation_report_to_json(const GenerationReport& report) {
  ojson j;
  j["attempts"] = report.attempts;
  j["emitted"] = report.emitted;
  j["skips"] = ojson::object();
  for (const auto& [reason, n] : report.skips) j["skips"][reason] = n;
  return j.dump(2) + "\n";
}

std::string balance_report_to_json(const BalanceReport& report) {
  ojson j;
  j["input"] = report.input;
  j["retained"] = report.retained;
  j["rounds"] = report.rounds;
  ojson buckets = ojson::array();
  for (const BucketReport& b : report.buckets) {
    ojson jb;
    jb["function"] = std::string(to_string(b.key.function));
    jb["group"] = b.key.group;
    jb["before"] = b.before;
    jb["after"] = b.after;
    jb["singleton"] = b.singleton;
    jb["before_values"] = ojson::object();
    for (const auto& [v, n] : b.before_values) jb["before_values"][v] = n;
    jb["after_values"] = ojson::object();
    for (const auto& [v, n] : b.after_values) jb["after_values"][v] = n;
    buckets.push_back(std::move(jb));
  }
  j["buckets"] = std::move(buckets);
  return j.dump(2) + "\n";
}

std::string stats_to_json(const CorpusStats& stats) {
  ojson j;
  j["samples"] = stats.samples;
  j["avg_question_words"] = stats.avg_question_words;
  j["avg_program_length"] = stats.avg_program_length;
  j["function_distribution"] = ojson::object();
  for (const auto& [fn, n] : stats.function_distribution) j["function_distribution"][fn] = n;
  j["question_type_distribution"] = ojson::object();
  for (const auto& [qt, n] : stats.question_type_distribution) {
    j["question_type_distribution"][qt] = n;
  }
  j["program_length_distribution"] = ojson::object();
  for (const auto& [len, n] : stats.program_length_distribution) {
    j["program_length_distribution"][std::to_string(len)] = n;
  }
  return j.dump(2) + "\n";
}

}  // namespace cric
