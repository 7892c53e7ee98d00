#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cric {

// Canonical concept form shared by scene-graph and knowledge-graph entities:
// lowercase, trimmed, internal whitespace collapsed to single spaces.
std::string canonical_concept(std::string_view s);

// Collapse runs of whitespace to single spaces and trim the ends.
std::string collapse_spaces(std::string_view s);

std::vector<std::string> tokenize_ws(std::string_view s);

// Naive English plural for question surfaces ("cat"->"cats", "box"->"boxes",
// "body"->"bodies"). Multi-word phrases pluralize the last word.
std::string pluralize(std::string_view noun);

// Rewrite the standalone article "a" to "an" before vowel-initial words.
std::string fix_articles(std::string_view s);

// Round-trip exact double formatting (17 significant digits).
std::string format_double17(double v);

// strtod with full-string validation; throws ParseError on junk.
double parse_double_strict(const std::string& s);

bool starts_with(std::string_view s, std::string_view prefix);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace cric
