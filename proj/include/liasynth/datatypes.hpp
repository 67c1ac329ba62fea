#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liasynth/problem.hpp"
#include "liasynth/term_ops.hpp"

namespace liasynth {

/// One constructor of a flattened datatype. It applies exactly one symbol:
/// either a leaf term (constant or parameter) or an operator whose arguments
/// are values of the datatypes in `args`.
struct Constructor {
  std::string name;
  std::vector<int> args;
  Term leaf;                 // non-null for leaves
  Kind op = Kind::IntConst;  // operator for non-leaves
  Integer coeff = 0;         // for Kind::Mul

  bool is_leaf() const { return !leaf.is_null(); }
  /// Builds the analog over the given argument terms.
  Term build(const std::vector<Term>& children) const;
};

struct Datatype {
  std::string name;
  BaseSort sort = BaseSort::Int;
  std::vector<Constructor> ctors;
  std::string nonterminal;  // empty for auxiliary datatypes made by flattening
};

struct DatatypeFamily {
  std::vector<Datatype> datatypes;
  int start = 0;
  std::vector<Term> params;

  int index_of(const std::string& name) const;  // -1 if absent
  const Datatype& dt(int i) const { return datatypes.at(i); }
  /// Copy of this family enumerating from another datatype.
  DatatypeFamily with_start(int dt) const;
};

struct EncodingOptions {
  bool minimize = true;
};

/// Throws GrammarError for an invalid grammar.
DatatypeFamily grammar_to_datatypes(const Grammar& g, const EncodingOptions& opts = {});

/// Int -> 0 | 1 | int params | Int+Int | ite(Bool,Int,Int);
/// Bool -> Int<=Int | Int=Int | not Bool (| bool params).
Grammar default_grammar(const std::vector<Term>& params, BaseSort ret);

struct DtNode;
using DtValue = std::shared_ptr<const DtNode>;

/// Immutable datatype value. The analog and its normal form are computed
/// once, bottom-up, when the node is built.
struct DtNode {
  int dt = 0;
  int ctor = 0;
  std::vector<DtValue> children;
  std::size_t size = 0;  // non-nullary constructors
  Term analog;
  Term normal;
  std::string key;  // term_key(normal)
  std::uint64_t id = 0;
};

/// Builds a node; the children must match the constructor's argument types.
DtValue make_value(const DatatypeFamily& fam, int dt, int ctor, std::vector<DtValue> children);
/// Looks a constructor up by name; throws GrammarError if absent.
DtValue make_value(const DatatypeFamily& fam, const std::string& dt, const std::string& ctor,
                   std::vector<DtValue> children);

Term to_analog(const DtValue& v);
std::string value_to_string(const DatatypeFamily& fam, const DtValue& v);

using Point = std::vector<Integer>;

/// Recursive unfolding over constructors. Throws SynthError on arity mismatch.
Value eval_dt(const DatatypeFamily& fam, const DtValue& v, const Point& point);
std::vector<Value> signature_of(const DatatypeFamily& fam, const DtValue& v,
                                const std::vector<Point>& points);

/// Every value of datatype `dt` with exactly `size` non-nullary constructors,
/// in enumeration order.
std::vector<DtValue> all_values(const DatatypeFamily& fam, int dt, std::size_t size);

}  // namespace liasynth
