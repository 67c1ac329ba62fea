#include "liasynth/classifier.hpp"

#include <functional>
#include <set>

#include "liasynth/errors.hpp"
#include "liasynth/rewriter.hpp"
#include "liasynth/term_ops.hpp"

namespace liasynth {

const char* conjecture_kind_name(ConjectureKind k) {
  switch (k) {
    case ConjectureKind::IOExamples: return "io-examples";
    case ConjectureKind::SingleInvocation: return "single-invocation";
    case ConjectureKind::NonSingleInvocation: return "non-single-invocation";
  }
  return "?";
}

namespace {

void collect_applies(const Term& t, std::vector<Term>& out) {
  if (t.kind() == Kind::Apply) out.push_back(t);
  for (const auto& c : t.children()) collect_applies(c, out);
}

void flatten_and(const Term& t, std::vector<Term>& out) {
  if (t.kind() == Kind::And) {
    for (const auto& c : t.children()) flatten_and(c, out);
  } else if (!(t.is_bool_const() && t.bool_value())) {
    out.push_back(t);
  }
}

bool is_universal(const SynthProblem& p, const Term& v) {
  if (!v.is_var()) return false;
  for (const auto& u : p.universals) {
    if (u.name() == v.name()) return true;
  }
  return false;
}

// Matches var = const or const = var.
bool var_const_eq(const Term& t, Term& var, Integer& value) {
  if (t.kind() != Kind::Eq) return false;
  for (int i = 0; i < 2; ++i) {
    const Term& a = t[i];
    const Term& b = t[1 - i];
    if (a.is_var() && a.sort() == BaseSort::Int && b.is_int_const()) {
      var = a;
      value = b.value();
      return true;
    }
  }
  return false;
}

bool app_const_eq(const Term& t, Term& app, Integer& value) {
  if (t.kind() != Kind::Eq) return false;
  for (int i = 0; i < 2; ++i) {
    if (t[i].kind() == Kind::Apply && t[1 - i].is_int_const()) {
      app = t[i];
      value = t[1 - i].value();
      return true;
    }
  }
  return false;
}

// Splits an implication-shaped conjunct into antecedent and consequent;
// accepts a => b and the normalized (or (not a) b) in either order.
bool split_implication(const Term& t, Term& ante, Term& cons) {
  if (t.kind() == Kind::Implies) {
    ante = t[0];
    cons = t[1];
    return true;
  }
  if (t.kind() == Kind::Or && t.num_children() == 2) {
    for (int i = 0; i < 2; ++i) {
      if (t[i].kind() == Kind::Not && !contains_apply(t[i])) {
        ante = t[i][0];
        cons = t[1 - i];
        return true;
      }
    }
  }
  return false;
}

std::optional<std::vector<IOPoint>> io_points(const SynthProblem& p,
                                              const std::vector<Term>& tuple) {
  std::vector<Term> conjuncts;
  flatten_and(p.constraint, conjuncts);
  std::vector<IOPoint> points;
  for (const auto& c : conjuncts) {
    Term ante, cons;
    if (!split_implication(c, ante, cons)) return std::nullopt;
    std::vector<Term> eqs;
    flatten_and(ante, eqs);
    if (eqs.size() != tuple.size()) return std::nullopt;
    IOPoint pt;
    pt.inputs.assign(tuple.size(), 0);
    std::vector<bool> bound(tuple.size(), false);
    for (const auto& e : eqs) {
      Term v;
      Integer val;
      if (!var_const_eq(e, v, val)) return std::nullopt;
      bool found = false;
      for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (tuple[i] == v && !bound[i]) {
          bound[i] = true;
          pt.inputs[i] = val;
          found = true;
          break;
        }
      }
      if (!found) return std::nullopt;
    }
    std::vector<Term> outs;
    flatten_and(cons, outs);
    if (outs.size() != p.functions.size()) return std::nullopt;
    pt.outputs.assign(p.functions.size(), 0);
    std::vector<bool> seen(p.functions.size(), false);
    for (const auto& o : outs) {
      Term app;
      Integer val;
      if (!app_const_eq(o, app, val)) return std::nullopt;
      bool found = false;
      for (std::size_t i = 0; i < p.functions.size(); ++i) {
        if (p.functions[i].name == app.name() && !seen[i]) {
          seen[i] = true;
          pt.outputs[i] = val;
          found = true;
        }
      }
      if (!found) return std::nullopt;
    }
    points.push_back(std::move(pt));
  }
  return points;
}

}  // namespace

std::optional<std::vector<Term>> invocation_tuple(const SynthProblem& p) {
  std::vector<Term> apps;
  collect_applies(p.constraint, apps);
  std::vector<Term> tuple;
  if (apps.empty()) {
    tuple = free_vars(p.constraint);
  } else {
    tuple = apps[0].children();
    std::set<std::string> names;
    for (const auto& a : tuple) {
      if (!is_universal(p, a) || !names.insert(a.name()).second) return std::nullopt;
    }
    for (const auto& app : apps) {
      if (app.children() != tuple) return std::nullopt;
    }
  }
  std::set<std::string> names;
  for (const auto& a : tuple) names.insert(a.name());
  for (const auto& v : free_vars(p.constraint)) {
    if (!names.count(v.name())) return std::nullopt;
  }
  for (const auto& f : p.functions) {
    bool applied = false;
    for (const auto& app : apps) applied = applied || app.name() == f.name;
    if (applied && f.params.size() != tuple.size()) return std::nullopt;
  }
  return tuple;
}

ConjectureClass classify(const SynthProblem& p) {
  ConjectureClass out;
  auto tuple = invocation_tuple(p);
  if (!tuple) {
    out.kind = ConjectureKind::NonSingleInvocation;
    return out;
  }
  if (auto pts = io_points(p, *tuple)) {
    out.kind = ConjectureKind::IOExamples;
    out.points = std::move(*pts);
    return out;
  }
  out.kind = ConjectureKind::SingleInvocation;
  return out;
}

std::vector<IOPoint> extract_io_examples(const SynthProblem& p) {
  ConjectureClass c = classify(p);
  if (c.kind != ConjectureKind::IOExamples) {
    throw SynthError("not an input/output example conjecture");
  }
  return c.points;
}

std::vector<std::vector<Integer>> input_points(const std::vector<IOPoint>& pts) {
  std::vector<std::vector<Integer>> out;
  for (const auto& p : pts) out.push_back(p.inputs);
  return out;
}

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  if (!used.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string n = base + std::to_string(i);
    if (!used.count(n)) return n;
  }
}

std::set<std::string> used_names(const SynthProblem& p) {
  std::set<std::string> used;
  for (const auto& u : p.universals) used.insert(u.name());
  for (const auto& v : free_vars(p.constraint)) used.insert(v.name());
  for (const auto& f : p.functions) used.insert(f.name);
  return used;
}

Term replace_apps(const Term& t, const std::function<std::optional<Term>(const Term&)>& f) {
  if (t.kind() == Kind::Apply) {
    if (auto r = f(t)) return *r;
  }
  if (t.num_children() == 0) return t;
  std::vector<Term> ch;
  for (const auto& c : t.children()) ch.push_back(replace_apps(c, f));
  return rebuild(t, std::move(ch));
}

bool ground_args(const Term& app) {
  for (const auto& a : app.children()) {
    if (!a.is_const()) return false;
  }
  return true;
}

// Step (a): f(c) in a conjunct becomes  x = c => conjunct[f(c) := f(x)].
std::optional<SynthProblem> lift_ground(const SynthProblem& p) {
  std::vector<Term> conjuncts;
  flatten_and(p.constraint, conjuncts);
  std::vector<Term> apps;
  collect_applies(p.constraint, apps);
  if (apps.empty()) return std::nullopt;

  std::optional<std::vector<Term>> var_tuple;
  bool any_ground = false;
  for (const auto& a : apps) {
    if (ground_args(a)) {
      any_ground = any_ground || a.num_children() > 0;
      continue;
    }
    if (!var_tuple) var_tuple = a.children();
    if (a.children() != *var_tuple) return std::nullopt;
  }
  if (!any_ground) return std::nullopt;
  std::size_t arity = apps[0].num_children();
  for (const auto& a : apps) {
    if (a.num_children() != arity) return std::nullopt;
  }

  SynthProblem q = p;
  std::vector<Term> xs;
  if (var_tuple) {
    for (const auto& v : *var_tuple) {
      if (!is_universal(p, v)) return std::nullopt;
    }
    xs = *var_tuple;
  } else {
    std::set<std::string> used = used_names(p);
    const SynthFun* f = p.find(apps[0].name());
    for (std::size_t i = 0; i < arity; ++i) {
      std::string n = fresh_name(f->params[i].name(), used);
      used.insert(n);
      Term v = mk_var(n, apps[0][i].sort());
      xs.push_back(v);
      q.universals.push_back(v);
    }
  }

  std::vector<Term> out;
  for (const auto& c : conjuncts) {
    std::vector<Term> capps;
    collect_applies(c, capps);
    std::optional<std::vector<Term>> consts;
    bool mixed = false;
    for (const auto& a : capps) {
      if (!ground_args(a)) continue;
      if (!consts) consts = a.children();
      if (a.children() != *consts) mixed = true;
    }
    if (!consts || consts->empty()) {
      out.push_back(c);
      continue;
    }
    if (mixed) return std::nullopt;
    std::vector<Term> guard;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i].sort() != (*consts)[i].sort()) return std::nullopt;
      guard.push_back(mk_eq(xs[i], (*consts)[i]));
    }
    const auto& cs = *consts;
    Term body = replace_apps(c, [&](const Term& a) -> std::optional<Term> {
      if (a.children() == cs) return mk_apply(a.name(), a.sort(), xs);
      return std::nullopt;
    });
    out.push_back(mk_implies(mk_and(guard), body));
  }
  q.constraint = mk_and(out);
  return q;
}

using Disjuncts = std::vector<std::vector<Term>>;
constexpr std::size_t kMaxDisjuncts = 64;

// Disjunctive normal form of t (pol) or its negation (!pol).
Disjuncts dnf(const Term& t, bool pol) {
  auto product = [](const Disjuncts& a, const Disjuncts& b) {
    Disjuncts out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        auto z = x;
        z.insert(z.end(), y.begin(), y.end());
        out.push_back(std::move(z));
        if (out.size() > kMaxDisjuncts) throw SynthError("disjunctive form too large");
      }
    }
    return out;
  };
  auto sum = [](Disjuncts a, const Disjuncts& b) {
    a.insert(a.end(), b.begin(), b.end());
    if (a.size() > kMaxDisjuncts) throw SynthError("disjunctive form too large");
    return a;
  };
  const auto& ch = t.children();
  switch (t.kind()) {
    case Kind::BoolConst:
      return t.bool_value() == pol ? Disjuncts{{}} : Disjuncts{};
    case Kind::Not:
      return dnf(ch[0], !pol);
    case Kind::And:
    case Kind::Or: {
      bool conjunctive = (t.kind() == Kind::And) == pol;
      Disjuncts acc = conjunctive ? Disjuncts{{}} : Disjuncts{};
      for (const auto& c : ch) {
        acc = conjunctive ? product(acc, dnf(c, pol)) : sum(acc, dnf(c, pol));
      }
      return acc;
    }
    case Kind::Implies:
      return dnf(mk_or(mk_not(ch[0]), ch[1]), pol);
    case Kind::Ite: {
      Term a = pol ? ch[1] : mk_not(ch[1]);
      Term b = pol ? ch[2] : mk_not(ch[2]);
      return dnf(mk_or(mk_and(ch[0], a), mk_and(mk_not(ch[0]), b)), true);
    }
    case Kind::Eq:
      if (ch[0].sort() == BaseSort::Bool) {
        Term same = mk_or(mk_and(ch[0], ch[1]), mk_and(mk_not(ch[0]), mk_not(ch[1])));
        return dnf(same, pol);
      }
      [[fallthrough]];
    default:
      return Disjuncts{{pol ? t : mk_not(t)}};
  }
}

Term negate_literal(const Term& l) { return l.kind() == Kind::Not ? l[0] : mk_not(l); }

bool mentions(const Term& t, const std::string& name) {
  for (const auto& v : free_vars(t)) {
    if (v.name() == name) return true;
  }
  return false;
}

// Solves a positive Int equality for z when z has coefficient +-1.
std::optional<Term> solve_for(const Term& lit, const Term& z) {
  if (lit.kind() != Kind::Eq || lit[0].sort() != BaseSort::Int) return std::nullopt;
  LinearForm p = linearize(lit[0]);
  p.add(linearize(lit[1]), -1);
  Integer c = p.coefficient_of(z);
  if (c != 1 && c != -1) return std::nullopt;
  LinearForm rest;
  rest.constant = p.constant;
  for (const auto& [a, k] : p.monomials) {
    if (a == z) continue;
    if (mentions(a, z.name())) return std::nullopt;
    rest.monomials.emplace_back(a, k);
  }
  // c*z + rest = 0  =>  z = -rest / c
  if (c == 1) rest = rest.negated();
  return from_linear(rest);
}

// Step (b): eliminate universals that are not invocation arguments.
std::optional<SynthProblem> eliminate_aux(const SynthProblem& p, std::string& why) {
  std::vector<Term> apps;
  collect_applies(p.constraint, apps);
  if (apps.empty()) {
    why = "no invocation to anchor the argument tuple";
    return std::nullopt;
  }
  std::vector<Term> tuple = apps[0].children();
  std::set<std::string> tuple_names;
  for (const auto& a : tuple) {
    if (!is_universal(p, a) || !tuple_names.insert(a.name()).second) {
      why = "invocation arguments are not distinct universals";
      return std::nullopt;
    }
  }
  for (const auto& a : apps) {
    if (a.children() != tuple) {
      why = "invocations use different argument tuples";
      return std::nullopt;
    }
  }
  std::vector<Term> aux;
  for (const auto& v : free_vars(p.constraint)) {
    if (!tuple_names.count(v.name())) aux.push_back(v);
  }
  if (aux.empty()) {
    why = "no auxiliary variable to eliminate";
    return std::nullopt;
  }
  for (const auto& z : aux) {
    if (z.sort() != BaseSort::Int) {
      why = "cannot eliminate Bool variable " + z.name();
      return std::nullopt;
    }
  }

  Disjuncts ds;
  try {
    ds = dnf(p.constraint, false);
  } catch (const SynthError& e) {
    why = e.what();
    return std::nullopt;
  }

  std::vector<Term> conjuncts;
  for (auto& d : ds) {
    for (const auto& z : aux) {
      // Prefer a defining equality without invocations.
      std::optional<std::size_t> pick;
      std::optional<Term> value;
      for (int pass = 0; pass < 2 && !pick; ++pass) {
        for (std::size_t i = 0; i < d.size(); ++i) {
          if ((pass == 0) == contains_apply(d[i])) continue;
          if (auto v = solve_for(d[i], z)) {
            pick = i;
            value = v;
            break;
          }
        }
      }
      if (!pick) {
        bool used = false;
        for (const auto& l : d) used = used || mentions(l, z.name());
        if (!used) continue;
        why = "no unit equality defines " + z.name();
        return std::nullopt;
      }
      d.erase(d.begin() + static_cast<std::ptrdiff_t>(*pick));
      Substitution s{{z.name(), *value}};
      for (auto& l : d) l = substitute(l, s);
    }
    std::vector<Term> plain;
    std::vector<Term> with_app;
    for (const auto& l : d) (contains_apply(l) ? with_app : plain).push_back(l);
    Term consequent;
    if (with_app.size() == 1) {
      consequent = negate_literal(with_app[0]);
    } else {
      std::vector<Term> negs;
      for (const auto& l : with_app) negs.push_back(negate_literal(l));
      consequent = mk_or(negs);
    }
    if (plain.empty()) {
      conjuncts.push_back(consequent);
    } else if (with_app.empty()) {
      conjuncts.push_back(plain.size() == 1 ? negate_literal(plain[0]) : mk_not(mk_and(plain)));
    } else {
      conjuncts.push_back(mk_implies(mk_and(plain), consequent));
    }
  }

  SynthProblem q = p;
  q.constraint = mk_and(conjuncts);
  q.universals.clear();
  for (const auto& u : p.universals) {
    bool is_aux = false;
    for (const auto& z : aux) is_aux = is_aux || z.name() == u.name();
    if (!is_aux) q.universals.push_back(u);
  }
  return q;
}

}  // namespace

std::variant<SynthProblem, Failure> to_single_invocation(const SynthProblem& p) {
  if (classify(p).kind != ConjectureKind::NonSingleInvocation) return p;
  SynthProblem cur = p;
  if (auto lifted = lift_ground(cur)) {
    cur = std::move(*lifted);
    if (classify(cur).kind != ConjectureKind::NonSingleInvocation) return cur;
  }
  std::string why;
  auto q = eliminate_aux(cur, why);
  if (!q) return Failure{why};
  if (classify(*q).kind == ConjectureKind::NonSingleInvocation) {
    return Failure{"transformed conjecture is still not single invocation"};
  }
  return *q;
}

Term FirstOrderForm::positive() const {
  if (body.kind() == Kind::Not) return body[0];
  return mk_not(body);
}

FirstOrderForm to_first_order(const SynthProblem& p) {
  auto tuple = invocation_tuple(p);
  if (!tuple) throw SynthError("conjecture is not single invocation");
  FirstOrderForm fo;
  fo.skolems = *tuple;
  std::set<std::string> used = used_names(p);
  std::map<std::string, Term> inst;
  for (const auto& f : p.functions) {
    std::string base = p.functions.size() == 1 ? "z" : "z_" + f.name;
    std::string n = fresh_name(base, used);
    used.insert(n);
    Term z = mk_var(n, f.ret);
    fo.functions.push_back(f.name);
    fo.instvars.push_back(z);
    inst.emplace(f.name, z);
  }
  Term pos = replace_apps(p.constraint, [&](const Term& a) -> std::optional<Term> {
    return inst.at(a.name());
  });
  fo.body = mk_not(pos);
  return fo;
}

}  // namespace liasynth
