#include "cric/text_util.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "cric/errors.hpp"

namespace cric {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_vowel(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string collapse_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string canonical_concept(std::string_view s) {
  std::string out = collapse_spaces(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> tokenize_ws(std::string_view s) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : s) {
    if (is_space(c)) {
      if (!cur.empty()) toks.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  return toks;
}

std::string pluralize(std::string_view noun) {
  std::string s(noun);
  auto space = s.rfind(' ');
  std::string head = space == std::string::npos ? s : s.substr(space + 1);
  std::string rest = space == std::string::npos ? "" : s.substr(0, space + 1);
  if (head.empty()) return s;
  auto ends_with = [&](std::string_view suf) {
    return head.size() >= suf.size() &&
           head.compare(head.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with("s") || ends_with("x") || ends_with("z") || ends_with("ch") ||
      ends_with("sh")) {
    head += "es";
  } else if (head.size() >= 2 && head.back() == 'y' && !is_vowel(head[head.size() - 2])) {
    head.replace(head.size() - 1, 1, "ies");
  } else {
    head += "s";
  }
  return rest + head;
}

std::string fix_articles(std::string_view s) {
  std::vector<std::string> toks = tokenize_ws(s);
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i] == "a" && i + 1 < toks.size() && is_vowel(toks[i + 1][0])) {
      toks[i] = "an";
    }
    if (i) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

std::string format_double17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double_strict(const std::string& s) {
  if (s.empty()) throw ParseError("empty number");
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError("bad number: '" + s + "'");
  return v;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace cric
