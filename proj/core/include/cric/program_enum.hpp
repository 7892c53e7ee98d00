#pragma once

#include <functional>
#include <vector>

#include "cric/program.hpp"

namespace cric {

// Concept pools available to enumerated programs. Empty pools simply make
// the functions needing them unavailable.
struct ProgramVocabulary {
  std::vector<std::string> objects;
  std::vector<std::string> attributes;
  std::vector<std::string> predicates;
  std::vector<std::string> types;
  std::vector<std::string> relations;
  std::vector<std::string> tails;
};

// Stream every well-typed program of 1..max_len steps over the vocabulary,
// in a fixed deterministic order (function order, then input wiring, then
// vocabulary order), including programs whose final step is not answer-like.
// The visitor returns false to stop early. Returns the number of programs
// visited.
std::size_t enumerate_programs(std::size_t max_len, const ProgramVocabulary& vocab,
                               const std::function<bool(const Program&)>& visit);

// Convenience collector for small bounds (tests).
std::vector<Program> enumerate_programs_collect(std::size_t max_len,
                                                const ProgramVocabulary& vocab);

}  // namespace cric
