#pragma once

#include <string>
#include <utility>
#include <vector>

#include "liasynth/term.hpp"

namespace liasynth {

/// c + sum a_i * t_i, where each t_i is an atom (anything that is not a
/// constant, sum or scaled term). Monomials are kept in canonical order:
/// variables by name first, then other atoms by key; coefficients non-zero.
struct LinearForm {
  Integer constant = 0;
  std::vector<std::pair<Term, Integer>> monomials;

  bool is_constant() const { return monomials.empty(); }
  Integer coefficient_of(const Term& atom) const;
  LinearForm& add(const LinearForm& o, const Integer& scale = 1);
  LinearForm negated() const;
};

/// Decomposes an Int term through +, scalar * and constants. Other subterms
/// become atoms unchanged.
LinearForm linearize(const Term& t);
/// Renders as constant first, then monomials; 0 for the empty sum.
Term from_linear(const LinearForm& f);

/// Structural serialization; injective on terms.
std::string term_key(const Term& t);

/// Simplified, T-equivalent form. Throws SortError on ill-sorted input.
Term normalize(const Term& t);
/// One rewriting step at the root, assuming the children are already normal.
/// normalize(t) == simplify_node(rebuild(t, normalize(children))).
Term simplify_node(const Term& t);

/// term_key(normalize(t)).
std::string canonical_key(const Term& t);

}  // namespace liasynth
