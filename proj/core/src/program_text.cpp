#include "cric/program_text.hpp"

#include <cctype>
#include <sstream>

#include "cric/errors.hpp"

namespace cric {

namespace {

std::string quote(const std::string& v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class LineParser {
 public:
  LineParser(const std::string& line, std::size_t lineno) : s_(line), lineno_(lineno) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("program line " + std::to_string(lineno_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::size_t parse_index() {
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      fail("expected step index");
    }
    std::size_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(s_[pos_++] - '0');
    }
    return v;
  }

  std::string parse_word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  std::string parse_quoted() {
    if (!eat('"')) fail("expected quoted value");
    std::string out;
    while (pos_ < s_.size()) {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("dangling escape");
        out.push_back(s_[pos_++]);
      } else if (c == '"') {
        return out;
      } else {
        out.push_back(c);
      }
    }
    fail("unterminated quoted value");
  }

  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
  std::size_t lineno_;
};

constexpr TextField kFieldOrder[] = {TextField::Object,   TextField::Attribute,
                                     TextField::Predicate, TextField::Type,
                                     TextField::Relation,  TextField::Tail,
                                     TextField::Head};

}  // namespace

std::string serialize_step(const Step& s, std::size_t index) {
  std::ostringstream out;
  out << index << ": " << to_string(s.function);
  if (!s.inputs.empty()) {
    out << '[';
    for (std::size_t i = 0; i < s.inputs.size(); ++i) {
      if (i) out << ',';
      out << s.inputs[i];
    }
    out << ']';
  }
  for (TextField f : kFieldOrder) {
    if (const auto& v = text_field(s.text, f)) {
      out << ' ' << to_string(f) << '=' << quote(*v);
    }
  }
  return out.str();
}

std::string serialize_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    out += serialize_step(p.steps[i], i);
    out.push_back('\n');
  }
  return out;
}

Program parse_program(const std::string& text) {
  Program p;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    LineParser lp(line, lineno);

    std::size_t index = lp.parse_index();
    if (index != p.steps.size()) {
      lp.fail("expected step index " + std::to_string(p.steps.size()) + ", got " +
              std::to_string(index));
    }
    lp.expect(':');

    Step step;
    std::string name = lp.parse_word();
    auto fn = parse_function_name(name);
    if (!fn) lp.fail("unknown function name \"" + name + "\"");
    step.function = *fn;

    lp.skip_ws();
    if (lp.eat('[')) {
      while (true) {
        step.inputs.push_back(lp.parse_index());
        lp.skip_ws();
        if (lp.eat(']')) break;
        lp.expect(',');
      }
    }

    while (!lp.done()) {
      std::string key = lp.parse_word();
      lp.skip_ws();
      lp.expect('=');
      lp.skip_ws();
      std::string value = lp.parse_quoted();
      bool known = false;
      for (TextField f : kFieldOrder) {
        if (to_string(f) == key) {
          set_text_field(step.text, f, std::move(value));
          known = true;
          break;
        }
      }
      if (!known) lp.fail("unknown text field \"" + key + "\"");
    }
    p.steps.push_back(std::move(step));
  }
  return p;
}

}  // namespace cric
