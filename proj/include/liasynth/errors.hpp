#pragma once

#include <stdexcept>
#include <string>

namespace liasynth {

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ill-sorted term, or an operation applied to a term of the wrong sort.
class SortError : public SynthError {
 public:
  using SynthError::SynthError;
};

class UnboundVariableError : public SynthError {
 public:
  using SynthError::SynthError;
};

/// Solution does not bind a function, or binds it with the wrong arity.
class SolutionError : public SynthError {
 public:
  using SynthError::SynthError;
};

class GrammarError : public SynthError {
 public:
  using SynthError::SynthError;
};

/// An iteration or node cap was hit, or the deadline passed. The answer is
/// unknown; callers must not treat this as Sat or Unsat.
class ResourceLimit : public SynthError {
 public:
  using SynthError::SynthError;
};

class ParseError : public SynthError {
 public:
  ParseError(const std::string& msg, int line, int column)
      : SynthError(std::to_string(line) + ":" + std::to_string(column) +
                   ": " + msg),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace liasynth
