#include "liasynth/qf_solver.hpp"

#include <map>
#include <stdexcept>
#include <unordered_map>

#include "liasynth/errors.hpp"
#include "liasynth/rewriter.hpp"

namespace liasynth {

namespace {

// Literal encoding: 2*var for the positive literal, 2*var+1 for its negation.
// Variable 0 is the constant true.
using Lit = int;
constexpr Lit kTrue = 0;
constexpr Lit kFalse = 1;
inline Lit neg(Lit l) { return l ^ 1; }
inline int var_of(Lit l) { return l >> 1; }

struct Atom {
  // sum coeffs + constant <= 0; the leading coefficient is positive.
  std::vector<std::pair<int, Integer>> coeffs;
  Integer constant;
};

class Encoder {
 public:
  explicit Encoder(const Limits& limits) : limits_(limits) { num_vars_ = 1; }

  // Replaces Int-sorted ite by fresh variables with guarded definitions.
  Term eliminate_ite(const Term& t, std::vector<Term>& side) {
    if (t.num_children() == 0) return t;
    auto it = ite_memo_.find(t);
    if (it != ite_memo_.end()) return it->second;
    std::vector<Term> ch;
    for (const auto& c : t.children()) ch.push_back(eliminate_ite(c, side));
    Term out;
    if (t.kind() == Kind::Ite && t.sort() == BaseSort::Int) {
      Term v = mk_var("#ite" + std::to_string(ite_count_++), BaseSort::Int);
      side.push_back(mk_implies(ch[0], mk_eq(v, ch[1])));
      side.push_back(mk_implies(mk_not(ch[0]), mk_eq(v, ch[2])));
      out = v;
    } else {
      out = rebuild(t, std::move(ch));
    }
    ite_memo_.emplace(t, out);
    return out;
  }

  // Returns a literal l such that the emitted clauses entail l -> (t xor !pol).
  Lit encode(const Term& t, bool pol) {
    auto key = std::make_pair(t, pol);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Lit l = encode_uncached(t, pol);
    memo_.emplace(key, l);
    return l;
  }

  void assert_lit(Lit l) { clauses_.push_back({l}); }

  std::vector<std::vector<Lit>>& clauses() { return clauses_; }
  int num_vars() const { return num_vars_; }
  const std::map<int, Atom>& atoms() const { return atoms_; }
  const std::map<std::string, int>& bool_vars() const { return bool_vars_; }
  const std::vector<std::string>& int_names() const { return int_names_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<Term, bool>& k) const {
      return k.first.hash() * 2 + (k.second ? 1 : 0);
    }
  };

  Lit fresh() { return 2 * num_vars_++; }

  int int_index(const std::string& name) {
    auto it = int_index_.find(name);
    if (it != int_index_.end()) return it->second;
    int idx = static_cast<int>(int_names_.size());
    int_names_.push_back(name);
    int_index_.emplace(name, idx);
    return idx;
  }

  Lit conj(const std::vector<Lit>& ls) {
    std::vector<Lit> keep;
    for (Lit l : ls) {
      if (l == kFalse) return kFalse;
      if (l != kTrue) keep.push_back(l);
    }
    if (keep.empty()) return kTrue;
    if (keep.size() == 1) return keep[0];
    Lit d = fresh();
    for (Lit l : keep) clauses_.push_back({neg(d), l});
    return d;
  }

  Lit disj(const std::vector<Lit>& ls) {
    std::vector<Lit> keep{};
    for (Lit l : ls) {
      if (l == kTrue) return kTrue;
      if (l != kFalse) keep.push_back(l);
    }
    if (keep.empty()) return kFalse;
    if (keep.size() == 1) return keep[0];
    Lit d = fresh();
    std::vector<Lit> cl{neg(d)};
    cl.insert(cl.end(), keep.begin(), keep.end());
    clauses_.push_back(std::move(cl));
    return d;
  }

  // Literal for p <= 0.
  Lit atom(LinearForm p) {
    if (p.is_constant()) return p.constant <= 0 ? kTrue : kFalse;
    Integer g = 0;
    for (const auto& m : p.monomials) g = gcd_int(g, m.second);
    for (auto& m : p.monomials) m.second /= g;
    p.constant = ceil_div(p.constant, g);
    bool flip = p.monomials.front().second < 0;
    if (flip) {
      // not (q <= 0) with q = -p + 1 is p <= 0
      p = p.negated();
      p.constant += 1;
    }
    std::string key;
    Atom a;
    for (const auto& [t, c] : p.monomials) {
      if (!t.is_var()) throw std::logic_error("non-variable atom after ite elimination");
      int idx = int_index(t.name());
      a.coeffs.emplace_back(idx, c);
      key += std::to_string(idx) + "*" + c.str() + " ";
    }
    a.constant = p.constant;
    key += p.constant.str();
    auto it = atom_index_.find(key);
    Lit l;
    if (it != atom_index_.end()) {
      l = it->second;
    } else {
      l = fresh();
      atom_index_.emplace(key, l);
      atoms_.emplace(var_of(l), std::move(a));
    }
    return flip ? neg(l) : l;
  }

  static LinearForm diff(const Term& a, const Term& b, int extra) {
    LinearForm p = linearize(a);
    p.add(linearize(b), -1);
    p.constant += extra;
    return p;
  }

  Lit encode_uncached(const Term& t, bool pol) {
    if ((memo_.size() & 63) == 0) limits_.check();
    const auto& ch = t.children();
    switch (t.kind()) {
      case Kind::BoolConst:
        return t.bool_value() == pol ? kTrue : kFalse;
      case Kind::Var: {
        if (t.sort() != BaseSort::Bool) throw SortError("Int variable used as formula");
        auto it = bool_vars_.find(t.name());
        Lit l;
        if (it == bool_vars_.end()) {
          l = fresh();
          bool_vars_.emplace(t.name(), l);
        } else {
          l = it->second;
        }
        return pol ? l : neg(l);
      }
      case Kind::Not:
        return encode(ch[0], !pol);
      case Kind::And:
      case Kind::Or: {
        std::vector<Lit> ls;
        for (const auto& c : ch) ls.push_back(encode(c, pol));
        bool conjunctive = (t.kind() == Kind::And) == pol;
        return conjunctive ? conj(ls) : disj(ls);
      }
      case Kind::Implies:
        return encode(mk_or(mk_not(ch[0]), ch[1]), pol);
      case Kind::Ite: {
        // ite(c,a,b) == (not c or a) and (c or b)
        Term a = pol ? ch[1] : mk_not(ch[1]);
        Term b = pol ? ch[2] : mk_not(ch[2]);
        return conj({encode(mk_or(mk_not(ch[0]), a), true),
                     encode(mk_or(ch[0], b), true)});
      }
      case Kind::Le:
        return pol ? atom(diff(ch[0], ch[1], 0)) : atom(diff(ch[1], ch[0], 1));
      case Kind::Lt:
        return pol ? atom(diff(ch[0], ch[1], 1)) : atom(diff(ch[1], ch[0], 0));
      case Kind::Ge:
        return pol ? atom(diff(ch[1], ch[0], 0)) : atom(diff(ch[0], ch[1], 1));
      case Kind::Gt:
        return pol ? atom(diff(ch[1], ch[0], 1)) : atom(diff(ch[0], ch[1], 0));
      case Kind::Eq: {
        if (ch[0].sort() == BaseSort::Bool) {
          Term same = mk_and(mk_or(mk_not(ch[0]), ch[1]), mk_or(ch[0], mk_not(ch[1])));
          return encode(same, pol);
        }
        if (pol) {
          return conj({atom(diff(ch[0], ch[1], 0)), atom(diff(ch[1], ch[0], 0))});
        }
        return disj({atom(diff(ch[0], ch[1], 1)), atom(diff(ch[1], ch[0], 1))});
      }
      default:
        throw SortError("unsupported term in ground formula: " + to_string(t));
    }
  }

  const Limits& limits_;
  int num_vars_;
  int ite_count_ = 0;
  std::vector<std::vector<Lit>> clauses_;
  std::unordered_map<std::pair<Term, bool>, Lit, KeyHash> memo_;
  std::unordered_map<Term, Term, TermHash> ite_memo_;
  std::map<std::string, Lit> bool_vars_;
  std::map<std::string, int> int_index_;
  std::vector<std::string> int_names_;
  std::map<std::string, Lit> atom_index_;
  std::map<int, Atom> atoms_;
};

// Chronological-backtracking DPLL with a theory check whenever new atoms
// are assigned. Decisions take the last unassigned literal of the last
// clause not yet satisfied.
class Dpll {
 public:
  Dpll(Encoder& enc, const Limits& limits)
      : enc_(enc), limits_(limits), value_(enc.num_vars(), -1) {
    value_[0] = 1;
  }

  bool solve() {
    for (;;) {
      limits_.check();
      bool ok = propagate() && theory_check();
      if (!ok) {
        if (!backtrack()) return false;
        continue;
      }
      Lit d = pick();
      if (d < 0) return true;
      decisions_.push_back({trail_.size(), false});
      assign(d);
    }
  }

  bool lit_value(Lit l) const { return value_[var_of(l)] == ((l & 1) ? 0 : 1); }
  int var_value(int v) const { return value_[v]; }
  const std::vector<Integer>& int_model() const { return int_model_; }

 private:
  struct Decision {
    std::size_t trail_pos;
    bool flipped;
  };

  int lit_state(Lit l) const {
    int v = value_[var_of(l)];
    if (v < 0) return -1;
    return (l & 1) ? 1 - v : v;
  }

  void assign(Lit l) {
    value_[var_of(l)] = (l & 1) ? 0 : 1;
    trail_.push_back(l);
  }

  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& cl : enc_.clauses()) {
        int unassigned = 0;
        Lit last = -1;
        bool sat = false;
        for (Lit l : cl) {
          int s = lit_state(l);
          if (s == 1) {
            sat = true;
            break;
          }
          if (s < 0) {
            ++unassigned;
            last = l;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          assign(last);
          changed = true;
        }
      }
    }
    return true;
  }

  bool theory_check() {
    std::size_t count = 0;
    std::vector<LinearConstraint> cs;
    for (const auto& [v, a] : enc_.atoms()) {
      int val = value_[v];
      if (val < 0) continue;
      ++count;
      LinearConstraint c;
      if (val == 1) {
        c.coeffs = a.coeffs;
        c.constant = a.constant;
      } else {
        for (const auto& [x, k] : a.coeffs) c.coeffs.emplace_back(x, -k);
        c.constant = -a.constant + 1;
      }
      cs.push_back(std::move(c));
    }
    if (count == checked_count_ && have_model_) return true;
    auto model = solve_ilp(static_cast<int>(enc_.int_names().size()), cs, limits_);
    if (!model) {
      have_model_ = false;
      return false;
    }
    int_model_ = std::move(*model);
    checked_count_ = count;
    have_model_ = true;
    return true;
  }

  bool backtrack() {
    while (!decisions_.empty()) {
      Decision d = decisions_.back();
      Lit dl = trail_[d.trail_pos];
      while (trail_.size() > d.trail_pos) {
        value_[var_of(trail_.back())] = -1;
        trail_.pop_back();
      }
      have_model_ = false;
      if (d.flipped) {
        decisions_.pop_back();
        continue;
      }
      decisions_.back().flipped = true;
      assign(neg(dl));
      return true;
    }
    return false;
  }

  Lit pick() const {
    const auto& cls = enc_.clauses();
    for (std::size_t i = cls.size(); i-- > 0;) {
      const auto& cl = cls[i];
      bool sat = false;
      Lit cand = -1;
      for (Lit l : cl) {
        int s = lit_state(l);
        if (s == 1) {
          sat = true;
          break;
        }
        if (s < 0) cand = l;
      }
      if (!sat && cand >= 0) return cand;
    }
    return -1;
  }

  Encoder& enc_;
  const Limits& limits_;
  std::vector<int> value_;
  std::vector<Lit> trail_;
  std::vector<Decision> decisions_;
  std::vector<Integer> int_model_;
  std::size_t checked_count_ = 0;
  bool have_model_ = false;
};

}  // namespace

SatResult check_sat(const Term& f, const Limits& limits) {
  if (!well_sorted(f) || f.sort() != BaseSort::Bool || f.kind() == Kind::Lambda) {
    throw SortError("check_sat expects a well-sorted Bool formula");
  }
  if (contains_apply(f)) throw SortError("check_sat: formula applies a function");

  Encoder enc(limits);
  std::vector<Term> side;
  Term g = enc.eliminate_ite(f, side);
  enc.assert_lit(enc.encode(g, true));
  for (const auto& s : side) enc.assert_lit(enc.encode(s, true));

  Dpll dpll(enc, limits);
  if (!dpll.solve()) return SatResult::unsat();

  Assignment model;
  std::map<std::string, Integer> ints;
  const auto& names = enc.int_names();
  const auto& im = dpll.int_model();
  for (std::size_t i = 0; i < names.size() && i < im.size(); ++i) ints[names[i]] = im[i];
  for (const auto& v : free_vars(f)) {
    if (v.sort() == BaseSort::Int) {
      auto it = ints.find(v.name());
      model[v.name()] = it == ints.end() ? Integer(0) : it->second;
    } else {
      auto it = enc.bool_vars().find(v.name());
      bool b = it != enc.bool_vars().end() && dpll.var_value(var_of(it->second)) == 1;
      model[v.name()] = b;
    }
  }
  if (!evaluate_bool(f, model)) {
    throw std::logic_error("check_sat produced a model that does not satisfy " + to_string(f));
  }
  return SatResult::with_model(std::move(model));
}

bool check_valid(const Term& f, const Limits& limits) {
  return !check_sat(mk_not(f), limits).sat;
}

bool are_equivalent(const Term& a, const Term& b, const Limits& limits) {
  if (a.sort() != b.sort()) throw SortError("are_equivalent: different sorts");
  return !check_sat(mk_not(mk_eq(a, b)), limits).sat;
}

}  // namespace liasynth
