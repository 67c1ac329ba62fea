#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liasynth/term.hpp"

namespace liasynth {

struct NonTerminal {
  std::string name;
  BaseSort sort = BaseSort::Int;
};

/// A production lhs -> rhs. Nonterminals occur in rhs as Vars named after
/// the nonterminal.
struct Rule {
  std::string lhs;
  Term rhs;
};

class Grammar {
 public:
  std::string start;
  std::vector<NonTerminal> nonterminals;
  std::vector<Rule> rules;
  /// Formal parameters of the function the grammar restricts.
  std::vector<Term> params;

  const NonTerminal* find(const std::string& name) const;
  bool is_nonterminal(const Term& t) const;
  BaseSort start_sort() const;
  std::vector<const Rule*> rules_for(const std::string& nt) const;

  /// Throws GrammarError unless the start symbol and every lhs are declared,
  /// every rhs is well sorted over parameters and nonterminals, and every
  /// nonterminal is productive and reachable from the start symbol.
  void validate() const;
};

/// Does `nt` derive `t`? Memoized bottom-up matching against productions.
bool generated_from(const Grammar& g, const std::string& nt, const Term& t);
bool generated_by(const Grammar& g, const Term& t);

struct SynthFun {
  std::string name;
  std::vector<Term> params;
  BaseSort ret = BaseSort::Int;
  std::optional<Grammar> grammar;

  FunSort sort() const;
};

struct SynthProblem {
  std::vector<SynthFun> functions;
  std::vector<Term> universals;
  Term constraint;

  const SynthFun* find(const std::string& name) const;
  bool has_grammar() const;
  /// Throws SortError / GrammarError on violated invariants.
  void validate() const;
};

struct Solution {
  std::map<std::string, Term> bindings;
};

/// Beta-reduces lambda applied to args.
Term beta_reduce(const Term& lambda, const std::vector<Term>& args);

/// The constraint with every application replaced by the reduced body of its
/// binding. Throws SolutionError on a missing binding or arity mismatch.
Term apply_solution(const SynthProblem& p, const Solution& s);

}  // namespace liasynth
