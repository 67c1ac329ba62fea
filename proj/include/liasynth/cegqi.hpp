#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "liasynth/classifier.hpp"
#include "liasynth/limits.hpp"
#include "liasynth/problem.hpp"
#include "liasynth/term_ops.hpp"

namespace liasynth {

struct InstanceTrace {
  /// One tuple per iteration, one term per function, over the skolems only.
  std::vector<std::vector<Term>> instances;
  /// gamma[i] is the first-order body with instvars replaced by instances[i].
  std::vector<Term> gamma;
};

struct CegqiResult {
  bool solved = false;
  std::string reason;  // when not solved
  InstanceTrace trace;
  std::optional<Solution> solution;
  std::size_t iterations = 0;
};

/// Instantiation terms for `kvars` chosen from `model`, which satisfies
/// `positive` (the body P[k, x] without its outer negation) and `gamma`.
/// Preference: a satisfied unit equality k = t, then the greatest lower
/// bound, then the least upper bound, then the model value of k. Every
/// returned term keeps `positive` true under the model.
std::vector<Term> select_terms(const Assignment& model, const std::vector<Term>& kvars,
                               const std::vector<Term>& gamma, const Term& positive);

/// The instantiation loop. Gives up at the iteration cap, when the body uses
/// an instvar under an integer ite, or when P is unsatisfiable together with
/// gamma (no function can exist).
CegqiResult solve_cegqi(const FirstOrderForm& fo, std::size_t max_iters = 64,
                        const Limits& limits = {});
/// to_first_order, the loop, then extract_solution.
CegqiResult solve_cegqi(const SynthProblem& p, std::size_t max_iters = 64,
                        const Limits& limits = {});

/// Nested conditional over the instances, last instance as default, in the
/// function's own parameters, normalized. Throws SynthError on an empty trace.
Solution extract_solution(const InstanceTrace& trace, const SynthProblem& p);

/// A grammar-generated body equivalent to `body`, or nullopt. Subterms that
/// the grammar cannot derive are repaired through equivalent operator forms,
/// then by searching grammar terms of size <= budget.
std::optional<Term> reconstruct_term(const Term& body, const Grammar& g, std::size_t budget,
                                     const Limits& limits = {});
/// Reconstructs every binding whose function has a grammar.
std::variant<Solution, Failure> reconstruct(const Solution& s, const SynthProblem& p,
                                            std::size_t budget, const Limits& limits = {});

}  // namespace liasynth
