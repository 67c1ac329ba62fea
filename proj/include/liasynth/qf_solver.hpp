#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "liasynth/limits.hpp"
#include "liasynth/term.hpp"
#include "liasynth/term_ops.hpp"

namespace liasynth {

struct SatResult {
  bool sat = false;
  /// Values for every free variable of the query (when sat).
  Assignment model;

  static SatResult unsat() { return {}; }
  static SatResult with_model(Assignment m) { return {true, std::move(m)}; }
};

/// Decides a quantifier-free LIA+Bool formula; free variables are existential.
/// Throws SortError on ill-sorted input or applications, ResourceLimit when
/// a limit is hit.
SatResult check_sat(const Term& f, const Limits& limits = {});
bool check_valid(const Term& f, const Limits& limits = {});
bool are_equivalent(const Term& a, const Term& b, const Limits& limits = {});

/// Integer feasibility of sum_j a_ij x_j + c_i <= 0 over the given number of
/// variables; a model when feasible.
struct LinearConstraint {
  std::vector<std::pair<int, Integer>> coeffs;
  Integer constant = 0;
};
std::optional<std::vector<Integer>> solve_ilp(int num_vars,
                                              const std::vector<LinearConstraint>& cs,
                                              const Limits& limits = {});

}  // namespace liasynth
