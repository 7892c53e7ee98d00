#pragma once

#include <stdexcept>
#include <string>

namespace cric {

// Malformed input files (scene graphs, triplets, program text, configs).
// Messages carry a locus: record index, row number, or field path.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A structurally valid file whose contents violate a cross-reference
// invariant (e.g. an edge pointing at a missing object id).
class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration: out-of-range values, missing paths, cyclic merge maps.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Violated operation precondition (programming error at the call site).
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

// Invalid evaluation input (unmatched prediction ids, arity mismatches).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failures surfaced by the pipeline layer.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Unknown entity/relation lookups in the embedding table.
class LookupError : public std::runtime_error {
 public:
  explicit LookupError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cric
