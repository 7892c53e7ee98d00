#pragma once

#include <string>

#include "cric/program.hpp"

namespace cric {

// Canonical program text: one line per step,
//
//   <index>: <Function>
//   <index>: <Function>[<input>,<input>]
//   <index>: <Function>[<input>] key="value" key="value"
//
// The bracket list appears iff the function takes step inputs; text fields
// appear in fixed order (object, attribute, predicate, type, relation, tail,
// head) with quoted values ('\' escapes '"' and '\'). parse(serialize(p))
// is the identity, and serialize(parse(t)) reproduces canonical text
// byte for byte.
std::string serialize_program(const Program& p);

// Throws ParseError naming the offending line or symbol.
Program parse_program(const std::string& text);

std::string serialize_step(const Step& s, std::size_t index);

}  // namespace cric
