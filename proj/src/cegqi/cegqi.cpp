#include "liasynth/cegqi.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "liasynth/errors.hpp"
#include "liasynth/qf_solver.hpp"
#include "liasynth/rewriter.hpp"
#include "liasynth/term_ops.hpp"

namespace liasynth {

namespace {

bool mentions(const Term& t, const std::set<std::string>& names) {
  if (t.is_var()) return names.count(t.name()) > 0;
  return std::any_of(t.children().begin(), t.children().end(),
                     [&](const Term& c) { return mentions(c, names); });
}

// Integer comparisons reachable through the Boolean structure.
void collect_atoms(const Term& t, std::vector<Term>& out) {
  if (is_comparison(t.kind()) && t[0].sort() == BaseSort::Int) {
    out.push_back(t);
    return;
  }
  if (t.sort() != BaseSort::Bool) return;
  for (const auto& c : t.children()) collect_atoms(c, out);
}

// An instvar inside an integer ite cannot be bounded linearly.
bool nonlinear_use(const Term& t, const std::set<std::string>& k) {
  if (t.kind() == Kind::Ite && t.sort() == BaseSort::Int && mentions(t, k)) return true;
  return std::any_of(t.children().begin(), t.children().end(),
                     [&](const Term& c) { return nonlinear_use(c, k); });
}

struct Bound {
  Term term;
  Integer value;
};

// Bounds on k from one atom, oriented by its truth value under the model.
void bounds_from_atom(const Term& atom, const Term& k, const std::set<std::string>& other_k,
                      const Assignment& model, std::vector<Term>& eqs, std::vector<Bound>& lower,
                      std::vector<Bound>& upper) {
  LinearForm d = linearize(atom[0]);
  d.add(linearize(atom[1]), -1);
  Integer c = d.coefficient_of(k);
  if (c != 1 && c != -1) return;
  LinearForm rest;
  rest.constant = d.constant;
  for (const auto& [a, coeff] : d.monomials) {
    if (a == k) continue;
    if (mentions(a, other_k) || (!a.is_var() && mentions(a, {k.name()}))) return;
    rest.monomials.emplace_back(a, coeff);
  }
  bool truth = evaluate_bool(atom, model);
  // Normalize to  c*k + rest  (<= 0 | = 0).
  bool equality = false;
  auto scale = [&](const Integer& s, const Integer& shift) {
    c *= s;
    LinearForm r;
    r.add(rest, s);
    r.constant += shift;
    rest = r;
  };
  switch (atom.kind()) {
    case Kind::Le: break;
    case Kind::Lt: scale(1, 1); break;
    case Kind::Ge: scale(-1, 0); break;
    case Kind::Gt: scale(-1, 1); break;
    case Kind::Eq: equality = true; break;
    default: return;
  }
  if (equality) {
    if (truth) {
      // k = -rest / c
      Term t = from_linear(c == 1 ? rest.negated() : rest);
      eqs.push_back(t);
      return;
    }
    // A violated equality becomes whichever strict side the model takes.
    Integer lhs = evaluate_int(atom[0], model), rhs = evaluate_int(atom[1], model);
    if (lhs < rhs) {
      scale(1, 1);
    } else {
      scale(-1, 1);
    }
  } else if (!truth) {
    // not (c*k + rest <= 0)  ==  -c*k - rest + 1 <= 0
    scale(-1, 1);
  }
  Term t = from_linear(c == 1 ? rest.negated() : rest);
  Integer v = evaluate_int(t, model);
  if (c == 1) {
    upper.push_back({t, v});  // k <= -rest
  } else {
    lower.push_back({t, v});  // k >= rest
  }
}

}  // namespace

std::vector<Term> select_terms(const Assignment& model, const std::vector<Term>& kvars,
                               const std::vector<Term>& /*gamma: already satisfied by model*/,
                               const Term& positive) {
  std::vector<Term> chosen;
  Term p = positive;
  for (std::size_t i = 0; i < kvars.size(); ++i) {
    const Term& k = kvars[i];
    std::set<std::string> other;
    for (std::size_t j = i + 1; j < kvars.size(); ++j) other.insert(kvars[j].name());
    Term fallback = value_term(model.at(k.name()));
    Term pick = fallback;
    if (k.sort() == BaseSort::Int) {
      std::vector<Term> atoms, eqs;
      std::vector<Bound> lower, upper;
      collect_atoms(p, atoms);
      for (const auto& a : atoms) {
        if (!mentions(a, {k.name()})) continue;
        bounds_from_atom(a, k, other, model, eqs, lower, upper);
      }
      auto best = [](const std::vector<Bound>& bs, bool max) {
        const Bound* b = &bs[0];
        for (const auto& x : bs) {
          if (max ? x.value > b->value : x.value < b->value) b = &x;
        }
        return b->term;
      };
      if (!eqs.empty()) {
        pick = eqs[0];
      } else if (!lower.empty()) {
        pick = best(lower, true);
      } else if (!upper.empty()) {
        pick = best(upper, false);
      }
    }
    Term next = substitute(p, {{k.name(), pick}});
    if (pick != fallback && !evaluate_bool(next, model)) {
      pick = fallback;
      next = substitute(p, {{k.name(), pick}});
    }
    chosen.push_back(pick);
    p = next;
  }
  return chosen;
}

CegqiResult solve_cegqi(const FirstOrderForm& fo, std::size_t max_iters, const Limits& limits) {
  CegqiResult res;
  Term pos = fo.positive();
  std::set<std::string> k;
  for (const auto& z : fo.instvars) k.insert(z.name());
  if (nonlinear_use(pos, k)) {
    res.reason = "body not supported: instantiation variable under an integer ite";
    return res;
  }
  std::vector<Term> conj;
  for (std::size_t it = 0; it < max_iters; ++it) {
    limits.check();
    std::vector<Term> q = conj;
    q.push_back(pos);
    SatResult r = check_sat(mk_and(q), limits);
    if (!r.sat) {
      res.reason = "unrealizable: some input admits no output";
      return res;
    }
    std::vector<Term> ts = select_terms(r.model, fo.instvars, conj, pos);
    Substitution sub;
    for (std::size_t i = 0; i < ts.size(); ++i) sub.emplace(fo.instvars[i].name(), ts[i]);
    Term g = substitute(fo.body, sub);
    conj.push_back(g);
    res.trace.instances.push_back(ts);
    res.trace.gamma.push_back(g);
    res.iterations = it + 1;
    if (!check_sat(mk_and(conj), limits).sat) {
      res.solved = true;
      return res;
    }
  }
  res.reason = "iteration cap reached";
  return res;
}

CegqiResult solve_cegqi(const SynthProblem& p, std::size_t max_iters, const Limits& limits) {
  CegqiResult res = solve_cegqi(to_first_order(p), max_iters, limits);
  if (res.solved) res.solution = extract_solution(res.trace, p);
  return res;
}

Solution extract_solution(const InstanceTrace& trace, const SynthProblem& p) {
  if (trace.instances.empty()) throw SynthError("extract_solution: empty trace");
  FirstOrderForm fo = to_first_order(p);
  Term pos = fo.positive();
  std::vector<Term> conds;
  for (const auto& inst : trace.instances) {
    Substitution sub;
    for (std::size_t i = 0; i < inst.size(); ++i) sub.emplace(fo.instvars.at(i).name(), inst[i]);
    conds.push_back(substitute(pos, sub));
  }
  Solution s;
  for (std::size_t f = 0; f < p.functions.size(); ++f) {
    const SynthFun& fn = p.functions[f];
    const auto& last = trace.instances.back();
    Term body = last.at(f);
    for (std::size_t j = trace.instances.size() - 1; j-- > 0;) {
      body = mk_ite(conds[j], trace.instances[j].at(f), body);
    }
    Substitution rename;
    for (std::size_t i = 0; i < fo.skolems.size() && i < fn.params.size(); ++i) {
      rename.emplace(fo.skolems[i].name(), fn.params[i]);
    }
    body = normalize(substitute(body, rename));
    s.bindings[fn.name] = mk_lambda(fn.params, body);
  }
  return s;
}

}  // namespace liasynth
