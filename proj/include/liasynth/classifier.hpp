#pragma once

#include <string>
#include <variant>
#include <vector>

#include "liasynth/problem.hpp"

namespace liasynth {

struct IOPoint {
  std::vector<Integer> inputs;
  /// One output per function, in declaration order.
  std::vector<Integer> outputs;
};

enum class ConjectureKind { IOExamples, SingleInvocation, NonSingleInvocation };
const char* conjecture_kind_name(ConjectureKind k);

struct ConjectureClass {
  ConjectureKind kind = ConjectureKind::NonSingleInvocation;
  std::vector<IOPoint> points;  // IOExamples only
};

ConjectureClass classify(const SynthProblem& p);

/// The common argument tuple of a single-invocation problem: distinct
/// universals, shared by every application. Empty optional otherwise.
std::optional<std::vector<Term>> invocation_tuple(const SynthProblem& p);

/// Throws SynthError if p is not an input/output example conjecture.
std::vector<IOPoint> extract_io_examples(const SynthProblem& p);
std::vector<std::vector<Integer>> input_points(const std::vector<IOPoint>& pts);

struct Failure {
  std::string reason;
};

/// Lifts ground invocations onto fresh universals and eliminates auxiliary
/// universals through unit-coefficient equalities.
std::variant<SynthProblem, Failure> to_single_invocation(const SynthProblem& p);

struct FirstOrderForm {
  std::vector<std::string> functions;
  std::vector<Term> skolems;   // the argument tuple, now free constants
  std::vector<Term> instvars;  // one per function
  Term body;                   // not P[instvars, skolems]

  /// P[instvars, skolems], i.e. the body without its outer negation.
  Term positive() const;
};

/// Throws SynthError unless p is single invocation.
FirstOrderForm to_first_order(const SynthProblem& p);

}  // namespace liasynth
