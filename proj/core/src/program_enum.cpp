#include "cric/program_enum.hpp"

#include "cric/errors.hpp"

namespace cric {

namespace {

class Enumerator {
 public:
  Enumerator(std::size_t max_len, const ProgramVocabulary& vocab,
             const std::function<bool(const Program&)>& visit)
      : max_len_(max_len), vocab_(vocab), visit_(visit) {}

  std::size_t run() {
    Program p;
    extend(p);
    return visited_;
  }

 private:
  bool emit(const Program& p) {
    ++visited_;
    return visit_(p);
  }

  // Depth-first: try every candidate step at the current position, emit the
  // program at every length, recurse while below the bound.
  bool extend(Program& p) {
    if (p.size() >= max_len_) return true;
    std::vector<std::size_t> object_sets;
    std::vector<std::size_t> concepts;
    for (std::size_t i = 0; i < p.size(); ++i) {
      switch (output_kind(p.steps[i])) {
        case ValueKind::ObjectSet: object_sets.push_back(i); break;
        case ValueKind::Concept: concepts.push_back(i); break;
        default: break;
      }
    }

    auto push = [&](Step step) {
      p.steps.push_back(std::move(step));
      bool keep = emit(p) && extend(p);
      p.steps.pop_back();
      return keep;
    };
    auto unary = [&](FunctionName f, std::size_t input, TextArgs text = {}) {
      Step s;
      s.function = f;
      s.inputs = {input};
      s.text = std::move(text);
      return push(std::move(s));
    };

    // Initial: the only zero-input producer; valid at any index.
    if (!push(Step{FunctionName::Initial, {}, {}})) return false;

    for (std::size_t in : object_sets) {
      for (const std::string& o : vocab_.objects) {
        TextArgs t;
        t.object = o;
        if (!unary(FunctionName::Find, in, std::move(t))) return false;
      }
      for (const std::string& a : vocab_.attributes) {
        TextArgs t;
        t.attribute = a;
        if (!unary(FunctionName::Find, in, std::move(t))) return false;
      }
      for (const std::string& o : vocab_.objects) {
        for (const std::string& a : vocab_.attributes) {
          TextArgs t;
          t.object = o;
          t.attribute = a;
          if (!unary(FunctionName::Find, in, std::move(t))) return false;
        }
      }
      for (FunctionName f : {FunctionName::Relate, FunctionName::RelateReverse}) {
        for (const std::string& pred : vocab_.predicates) {
          TextArgs t;
          t.predicate = pred;
          if (!unary(f, in, std::move(t))) return false;
        }
      }
      for (const std::string& type : vocab_.types) {
        TextArgs t;
        t.type_name = type;
        if (!unary(FunctionName::Recognition, in, std::move(t))) return false;
      }
      if (!unary(FunctionName::Exist, in)) return false;
      if (!unary(FunctionName::Count, in)) return false;
      for (const std::string& rel : vocab_.relations) {
        for (const std::string& tail : vocab_.tails) {
          TextArgs t;
          t.relation = rel;
          t.tail = tail;
          if (!unary(FunctionName::GroundKG, in, std::move(t))) return false;
        }
      }
    }

    for (FunctionName f : {FunctionName::And, FunctionName::Or}) {
      for (std::size_t a : object_sets) {
        for (std::size_t b : object_sets) {
          Step s;
          s.function = f;
          s.inputs = {a, b};
          if (!push(std::move(s))) return false;
        }
      }
    }

    for (std::size_t in : concepts) {
      for (const std::string& rel : vocab_.relations) {
        TextArgs t;
        t.relation = rel;
        if (!unary(FunctionName::QueryKG, in, std::move(t))) return false;
        for (const std::string& tail : vocab_.tails) {
          TextArgs t2;
          t2.relation = rel;
          t2.tail = tail;
          if (!unary(FunctionName::VerifyKG, in, std::move(t2))) return false;
        }
      }
    }
    return true;
  }

  std::size_t max_len_;
  const ProgramVocabulary& vocab_;
  const std::function<bool(const Program&)>& visit_;
  std::size_t visited_ = 0;
};

}  // namespace

std::size_t enumerate_programs(std::size_t max_len, const ProgramVocabulary& vocab,
                               const std::function<bool(const Program&)>& visit) {
  if (max_len < 1) throw PreconditionError("enumerate_programs: max_len must be >= 1");
  return Enumerator(max_len, vocab, visit).run();
}

std::vector<Program> enumerate_programs_collect(std::size_t max_len,
                                                const ProgramVocabulary& vocab) {
  std::vector<Program> out;
  enumerate_programs(max_len, vocab, [&](const Program& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

}  // namespace cric
