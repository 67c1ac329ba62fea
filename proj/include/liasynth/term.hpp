#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "liasynth/integer.hpp"

namespace liasynth {

enum class BaseSort { Int, Bool };

/// Sort of a function-to-synthesize. Parameters and return are base sorts only.
struct FunSort {
  std::vector<BaseSort> params;
  BaseSort ret = BaseSort::Int;

  bool operator==(const FunSort&) const = default;
};

const char* sort_name(BaseSort s);

enum class Kind {
  IntConst,
  BoolConst,
  Var,
  Add,      // n-ary sum
  Mul,      // integer literal coefficient times a single term
  Le,
  Lt,
  Ge,
  Gt,
  Eq,
  Not,
  And,
  Or,
  Implies,
  Ite,
  Apply,    // application of a function-to-synthesize
  Lambda,   // children: parameters (Vars) followed by the body
};

const char* kind_name(Kind k);
bool is_comparison(Kind k);

struct TermNode;

/// Immutable, shared term. Copying a Term copies a pointer.
///
/// Construction never rejects ill-sorted input; well_sorted() decides that.
/// Subtraction and unary minus are rewritten into Add/Mul at construction.
class Term {
 public:
  Term() = default;

  Kind kind() const;
  /// Nominal result sort: declared sort for Var/Apply, Int for arithmetic,
  /// Bool for predicates and connectives, the then-branch sort for Ite.
  BaseSort sort() const;
  const std::vector<Term>& children() const;
  std::size_t num_children() const { return children().size(); }
  const Term& operator[](std::size_t i) const { return children()[i]; }

  /// Literal of an IntConst, or the coefficient of a Mul.
  const Integer& value() const;
  bool bool_value() const;
  /// Variable name, or the applied function's name.
  const std::string& name() const;

  std::size_t hash() const;
  bool is_null() const { return node_ == nullptr; }

  bool is_var() const { return kind() == Kind::Var; }
  bool is_int_const() const { return kind() == Kind::IntConst; }
  bool is_bool_const() const { return kind() == Kind::BoolConst; }
  bool is_const() const { return is_int_const() || is_bool_const(); }

  /// Lambda accessors.
  std::vector<Term> lambda_params() const;
  const Term& lambda_body() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;

  friend Term make_node(Kind, BaseSort, Integer, bool, std::string,
                        std::vector<Term>);
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

Term mk_int(Integer v);
Term mk_int(long v);
Term mk_bool(bool b);
Term mk_true();
Term mk_false();
Term mk_var(std::string name, BaseSort sort);

Term mk_add(std::vector<Term> args);
Term mk_add(Term a, Term b);
Term mk_sub(Term a, Term b);
Term mk_neg(Term a);
Term mk_mul(Integer coeff, Term t);

Term mk_le(Term a, Term b);
Term mk_lt(Term a, Term b);
Term mk_ge(Term a, Term b);
Term mk_gt(Term a, Term b);
Term mk_eq(Term a, Term b);
Term mk_cmp(Kind k, Term a, Term b);

Term mk_not(Term a);
Term mk_and(std::vector<Term> args);
Term mk_and(Term a, Term b);
Term mk_or(std::vector<Term> args);
Term mk_or(Term a, Term b);
Term mk_implies(Term a, Term b);
Term mk_ite(Term c, Term t, Term e);

Term mk_apply(std::string fname, BaseSort ret, std::vector<Term> args);
Term mk_lambda(std::vector<Term> params, Term body);

/// Rebuilds a term of the same kind (and name/coefficient) over new children.
Term rebuild(const Term& t, std::vector<Term> children);

/// SMT-LIB style rendering; negative literals print as (- n).
std::string to_string(const Term& t);
std::ostream& operator<<(std::ostream& os, const Term& t);

}  // namespace liasynth
