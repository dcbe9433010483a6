#pragma once

#include <stdexcept>
#include <string>

namespace sgparse {

// Base for every error the library raises. Callers that only need a
// one-line diagnostic can catch this and print what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two aligned nodes claim overlapping token spans.
class AlignmentConflict : public Error {
 public:
  using Error::Error;
};

// An arc set cannot be read back as a scene graph (type clash, bad CONT
// chain, broken ArcSet invariant).
class MalformedArcs : public Error {
 public:
  using Error::Error;
};

// A transition was applied outside its preconditions.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

// No zero-cost transition exists: the gold arcs are unreachable from the
// current configuration (non-projective or corrupt instance).
class OracleStuck : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorpusCorrupt : public Error {
 public:
  using Error::Error;
};

}  // namespace sgparse
