// Rewrites a solution body into a form the function's grammar derives.

#include <map>
#include <set>

#include "liasynth/cegqi.hpp"
#include "liasynth/datatypes.hpp"
#include "liasynth/enumerate.hpp"
#include "liasynth/errors.hpp"
#include "liasynth/qf_solver.hpp"
#include "liasynth/rewriter.hpp"

namespace liasynth {

namespace {

// Same-meaning variants of t's top operator.
std::vector<Term> alternatives(const Term& t) {
  std::vector<Term> out;
  auto flip = [](Kind k) {
    switch (k) {
      case Kind::Le: return Kind::Ge;
      case Kind::Lt: return Kind::Gt;
      case Kind::Ge: return Kind::Le;
      case Kind::Gt: return Kind::Lt;
      default: return k;
    }
  };
  auto negation = [](Kind k) {
    switch (k) {
      case Kind::Le: return Kind::Gt;
      case Kind::Lt: return Kind::Ge;
      case Kind::Ge: return Kind::Lt;
      default: return Kind::Le;
    }
  };
  auto nest = [](Term (*mk)(Term, Term), const std::vector<Term>& xs, bool left) {
    if (left) {
      Term acc = xs[0];
      for (std::size_t i = 1; i < xs.size(); ++i) acc = mk(acc, xs[i]);
      return acc;
    }
    Term acc = xs.back();
    for (std::size_t i = xs.size() - 1; i-- > 0;) acc = mk(xs[i], acc);
    return acc;
  };
  switch (t.kind()) {
    case Kind::Le:
    case Kind::Lt:
    case Kind::Ge:
    case Kind::Gt:
      out.push_back(mk_not(mk_cmp(negation(t.kind()), t[0], t[1])));
      out.push_back(mk_cmp(flip(t.kind()), t[1], t[0]));
      out.push_back(mk_not(mk_cmp(flip(negation(t.kind())), t[1], t[0])));
      break;
    case Kind::Eq:
      out.push_back(mk_eq(t[1], t[0]));
      if (t[0].sort() == BaseSort::Int) out.push_back(mk_and(mk_le(t[0], t[1]), mk_le(t[1], t[0])));
      break;
    case Kind::Not: {
      const Term& a = t[0];
      if (a.kind() == Kind::Not) out.push_back(a[0]);
      if (is_comparison(a.kind()) && a.kind() != Kind::Eq) {
        out.push_back(mk_cmp(negation(a.kind()), a[0], a[1]));
      }
      if (a.kind() == Kind::And || a.kind() == Kind::Or) {
        std::vector<Term> neg;
        for (const auto& c : a.children()) neg.push_back(mk_not(c));
        out.push_back(a.kind() == Kind::And ? mk_or(neg) : mk_and(neg));
      }
      break;
    }
    case Kind::And:
    case Kind::Or: {
      bool is_and = t.kind() == Kind::And;
      std::vector<Term> neg;
      for (const auto& c : t.children()) neg.push_back(mk_not(c));
      out.push_back(mk_not(is_and ? mk_or(neg) : mk_and(neg)));
      if (t.num_children() > 2) {
        Term (*mk)(Term, Term) = is_and ? static_cast<Term (*)(Term, Term)>(mk_and)
                                        : static_cast<Term (*)(Term, Term)>(mk_or);
        out.push_back(nest(mk, t.children(), true));
        out.push_back(nest(mk, t.children(), false));
      } else {
        out.push_back(rebuild(t, {t[1], t[0]}));
      }
      break;
    }
    case Kind::Implies:
      out.push_back(mk_or(mk_not(t[0]), t[1]));
      break;
    case Kind::Ite:
      out.push_back(mk_ite(mk_not(t[0]), t[2], t[1]));
      if (t[0].kind() == Kind::Not) out.push_back(mk_ite(t[0][0], t[2], t[1]));
      break;
    case Kind::Add: {
      Term (*mk)(Term, Term) = static_cast<Term (*)(Term, Term)>(mk_add);
      if (t.num_children() > 2) {
        out.push_back(nest(mk, t.children(), true));
        out.push_back(nest(mk, t.children(), false));
      } else {
        out.push_back(mk_add(t[1], t[0]));
      }
      break;
    }
    case Kind::Mul: {
      const Integer& c = t.value();
      if (c > 1 && c <= 8) {
        std::vector<Term> xs(static_cast<std::size_t>(c), t[0]);
        out.push_back(nest(static_cast<Term (*)(Term, Term)>(mk_add), xs, true));
      }
      break;
    }
    default:
      break;
  }
  return out;
}

// Matches t against a production's right-hand side, binding nonterminal
// positions to subterms.
bool match_rule(const Grammar& g, const Term& rhs, const Term& t,
                std::vector<std::pair<std::string, Term>>& binds) {
  if (g.is_nonterminal(rhs)) {
    if (rhs.sort() != t.sort()) return false;
    binds.emplace_back(rhs.name(), t);
    return true;
  }
  if (rhs.kind() != t.kind() || rhs.num_children() != t.num_children()) return false;
  switch (rhs.kind()) {
    case Kind::IntConst:
    case Kind::BoolConst:
    case Kind::Var:
      return rhs == t;
    case Kind::Mul:
      if (rhs.value() != t.value()) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < rhs.num_children(); ++i) {
    if (!match_rule(g, rhs[i], t[i], binds)) return false;
  }
  return true;
}

Term fill_rule(const Grammar& g, const Term& rhs, const std::vector<Term>& parts, std::size_t& next) {
  if (g.is_nonterminal(rhs)) return parts[next++];
  if (rhs.num_children() == 0) return rhs;
  std::vector<Term> ch;
  for (const auto& c : rhs.children()) ch.push_back(fill_rule(g, c, parts, next));
  return rebuild(rhs, std::move(ch));
}

class Reconstructor {
 public:
  Reconstructor(const Grammar& g, std::size_t budget, const Limits& limits)
      : g_(g), budget_(budget), limits_(limits), fam_(grammar_to_datatypes(g)) {
    // A few fixed probe points for the equivalence pre-filter.
    static const long vals[] = {0, 1, -1, 2, 3, -2, 5, 7, -4, 11};
    for (std::size_t j = 0; j < 8; ++j) {
      Assignment a;
      for (std::size_t i = 0; i < g.params.size(); ++i) {
        long v = vals[(j * 3 + i * 7 + i * j) % 10];
        const Term& x = g.params[i];
        if (x.sort() == BaseSort::Bool) {
          a[x.name()] = (v & 1) != 0;
        } else {
          a[x.name()] = Integer(v);
        }
      }
      probes_.push_back(std::move(a));
    }
  }

  std::optional<Term> run(const std::string& nt, const Term& t) {
    limits_.check();
    if (generated_from(g_, nt, t)) return t;
    std::string key = nt + "|" + term_key(t);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    if (!active_.insert(key).second) return std::nullopt;
    std::optional<Term> r = by_rules(nt, t);
    if (!r) {
      for (const auto& alt : alternatives(t)) {
        r = by_rules(nt, alt);
        if (r) break;
      }
    }
    if (!r) r = by_search(nt, t);
    active_.erase(key);
    memo_.emplace(key, r);
    return r;
  }

 private:
  std::vector<std::string> closure(const std::string& nt) const {
    std::vector<std::string> out{nt};
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (const Rule* r : g_.rules_for(out[k])) {
        if (!g_.is_nonterminal(r->rhs)) continue;
        const std::string& n = r->rhs.name();
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
      }
    }
    return out;
  }

  std::optional<Term> by_rules(const std::string& nt, const Term& t) {
    for (const auto& n : closure(nt)) {
      for (const Rule* r : g_.rules_for(n)) {
        if (g_.is_nonterminal(r->rhs)) continue;
        std::vector<std::pair<std::string, Term>> binds;
        if (!match_rule(g_, r->rhs, t, binds)) continue;
        std::vector<Term> parts;
        for (const auto& [sub_nt, sub] : binds) {
          auto p = run(sub_nt, sub);
          if (!p) break;
          parts.push_back(*p);
        }
        if (parts.size() != binds.size()) continue;
        std::size_t next = 0;
        return fill_rule(g_, r->rhs, parts, next);
      }
    }
    return std::nullopt;
  }

  const std::vector<DtValue>& values_of(const std::string& nt) {
    auto it = values_.find(nt);
    if (it != values_.end()) return it->second;
    int dt = fam_.index_of(nt);
    std::vector<DtValue> vals;
    if (dt >= 0) vals = enumerate_values(fam_.with_start(dt), budget_);
    return values_.emplace(nt, std::move(vals)).first->second;
  }

  std::optional<Term> by_search(const std::string& nt, const Term& t) {
    for (const auto& v : free_vars(t)) {
      bool param = std::any_of(g_.params.begin(), g_.params.end(),
                               [&](const Term& p) { return p == v; });
      if (!param) return std::nullopt;
    }
    const auto& vals = values_of(nt);
    std::string key = canonical_key(t);
    for (const auto& v : vals) {
      if (v->key == key) return v->analog;
    }
    std::vector<Value> want;
    for (const auto& a : probes_) want.push_back(evaluate(t, a));
    for (const auto& v : vals) {
      limits_.check();
      bool same = true;
      for (std::size_t i = 0; i < probes_.size() && same; ++i) {
        same = evaluate(v->analog, probes_[i]) == want[i];
      }
      if (same && are_equivalent(v->analog, t, limits_)) return v->analog;
    }
    return std::nullopt;
  }

  const Grammar& g_;
  std::size_t budget_;
  const Limits& limits_;
  DatatypeFamily fam_;
  std::vector<Assignment> probes_;
  std::map<std::string, std::optional<Term>> memo_;
  std::set<std::string> active_;
  std::map<std::string, std::vector<DtValue>> values_;
};

}  // namespace

std::optional<Term> reconstruct_term(const Term& body, const Grammar& g, std::size_t budget,
                                     const Limits& limits) {
  if (generated_by(g, body)) return body;
  Reconstructor r(g, budget, limits);
  auto out = r.run(g.start, body);
  if (!out || !generated_by(g, *out) || !are_equivalent(*out, body, limits)) return std::nullopt;
  return out;
}

std::variant<Solution, Failure> reconstruct(const Solution& s, const SynthProblem& p,
                                            std::size_t budget, const Limits& limits) {
  Solution out = s;
  for (const auto& f : p.functions) {
    if (!f.grammar) continue;
    auto it = s.bindings.find(f.name);
    if (it == s.bindings.end()) return Failure{"no binding for " + f.name};
    const Term& lam = it->second;
    // The grammar speaks about its own parameter names.
    Substitution rename;
    auto params = lam.lambda_params();
    for (std::size_t i = 0; i < params.size() && i < f.grammar->params.size(); ++i) {
      rename.emplace(params[i].name(), f.grammar->params[i]);
    }
    Term body = substitute(lam.lambda_body(), rename);
    auto r = reconstruct_term(body, *f.grammar, budget, limits);
    if (!r) return Failure{"reconstruction budget exhausted for " + f.name};
    out.bindings[f.name] = mk_lambda(f.grammar->params, *r);
  }
  return out;
}

}  // namespace liasynth
