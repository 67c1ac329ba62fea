#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "liasynth/term.hpp"

namespace liasynth {

using Value = std::variant<Integer, bool>;
using Assignment = std::map<std::string, Value>;

std::string to_string(const Value& v);

/// True iff every operator receives arguments of the right sort, ite branches
/// agree, and Lambda occurs (if at all) only at the root.
bool well_sorted(const Term& t);

/// Ground evaluation. Throws UnboundVariableError for a free variable missing
/// from `a`, SortError for ill-sorted input, applications, or lambdas.
Value evaluate(const Term& t, const Assignment& a);
Integer evaluate_int(const Term& t, const Assignment& a);
bool evaluate_bool(const Term& t, const Assignment& a);

using Substitution = std::unordered_map<std::string, Term>;

/// Simultaneous replacement of free variables by name. Lambda parameters are
/// bound; they are renamed when a replacement would capture them.
Term substitute(const Term& t, const Substitution& m);

/// Free variables in first-occurrence order (pre-order, left to right).
std::vector<Term> free_vars(const Term& t);
/// Names of applied functions, first-occurrence order.
std::vector<std::string> applied_functions(const Term& t);
bool contains_apply(const Term& t);

/// Number of non-nullary operator nodes; leaves cost nothing.
std::size_t term_size(const Term& t);

/// Replaces every Var in the term by its value in `a` (others kept).
Term ground(const Term& t, const Assignment& a);
Term value_term(const Value& v);

}  // namespace liasynth
