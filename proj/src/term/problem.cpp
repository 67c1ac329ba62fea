#include "liasynth/problem.hpp"

#include <deque>
#include <set>
#include <unordered_map>

#include "liasynth/errors.hpp"
#include "liasynth/term_ops.hpp"

namespace liasynth {

const NonTerminal* Grammar::find(const std::string& name) const {
  for (const auto& nt : nonterminals) {
    if (nt.name == name) return &nt;
  }
  return nullptr;
}

bool Grammar::is_nonterminal(const Term& t) const {
  return t.kind() == Kind::Var && find(t.name()) != nullptr;
}

BaseSort Grammar::start_sort() const {
  const NonTerminal* s = find(start);
  if (!s) throw GrammarError("undeclared start symbol " + start);
  return s->sort;
}

std::vector<const Rule*> Grammar::rules_for(const std::string& nt) const {
  std::vector<const Rule*> out;
  for (const auto& r : rules) {
    if (r.lhs == nt) out.push_back(&r);
  }
  return out;
}

namespace {

void nonterminals_in(const Grammar& g, const Term& t, std::vector<std::string>& out) {
  if (g.is_nonterminal(t)) {
    out.push_back(t.name());
    return;
  }
  for (const auto& c : t.children()) nonterminals_in(g, c, out);
}

}  // namespace

void Grammar::validate() const {
  if (!find(start)) throw GrammarError("start symbol " + start + " is not declared");
  std::set<std::string> names;
  for (const auto& nt : nonterminals) {
    if (!names.insert(nt.name).second) {
      throw GrammarError("nonterminal " + nt.name + " declared twice");
    }
  }
  std::set<std::string> param_names;
  for (const auto& p : params) {
    if (names.count(p.name())) {
      throw GrammarError("parameter " + p.name() + " clashes with a nonterminal");
    }
    param_names.insert(p.name());
  }
  for (const auto& r : rules) {
    const NonTerminal* lhs = find(r.lhs);
    if (!lhs) throw GrammarError("rule for undeclared nonterminal " + r.lhs);
    if (!well_sorted(r.rhs) || r.rhs.kind() == Kind::Lambda) {
      throw GrammarError("ill-sorted production for " + r.lhs);
    }
    if (r.rhs.sort() != lhs->sort) {
      throw GrammarError("production sort differs from " + r.lhs);
    }
    if (contains_apply(r.rhs)) {
      throw GrammarError("production for " + r.lhs + " applies a function");
    }
    for (const auto& v : free_vars(r.rhs)) {
      if (const NonTerminal* nt = find(v.name())) {
        if (nt->sort != v.sort()) {
          throw GrammarError("nonterminal " + v.name() + " used at the wrong sort");
        }
      } else if (!param_names.count(v.name())) {
        throw GrammarError("production for " + r.lhs + " uses unknown symbol " +
                           v.name());
      }
    }
  }

  // Productivity: least fixpoint.
  std::set<std::string> productive;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : rules) {
      if (productive.count(r.lhs)) continue;
      std::vector<std::string> used;
      nonterminals_in(*this, r.rhs, used);
      bool ok = true;
      for (const auto& u : used) ok = ok && productive.count(u);
      if (ok) {
        productive.insert(r.lhs);
        changed = true;
      }
    }
  }
  for (const auto& nt : nonterminals) {
    if (!productive.count(nt.name)) {
      throw GrammarError("nonterminal " + nt.name + " generates no term");
    }
  }

  std::set<std::string> reached{start};
  std::deque<std::string> work{start};
  while (!work.empty()) {
    std::string cur = work.front();
    work.pop_front();
    for (const Rule* r : rules_for(cur)) {
      std::vector<std::string> used;
      nonterminals_in(*this, r->rhs, used);
      for (const auto& u : used) {
        if (reached.insert(u).second) work.push_back(u);
      }
    }
  }
  for (const auto& nt : nonterminals) {
    if (!reached.count(nt.name)) {
      throw GrammarError("nonterminal " + nt.name + " is unreachable");
    }
  }
}

namespace {

class Generability {
 public:
  explicit Generability(const Grammar& g) : g_(g) {
    for (const auto& nt : g.nonterminals) {
      // Nonterminals reachable through chain rules (rhs is a bare nonterminal).
      std::set<std::string> closure{nt.name};
      std::deque<std::string> work{nt.name};
      while (!work.empty()) {
        std::string cur = work.front();
        work.pop_front();
        for (const Rule* r : g.rules_for(cur)) {
          if (g.is_nonterminal(r->rhs) && closure.insert(r->rhs.name()).second) {
            work.push_back(r->rhs.name());
          }
        }
      }
      chains_[nt.name] = closure;
    }
  }

  bool from(const std::string& nt, const Term& t) {
    auto& memo = memo_[nt];
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    bool ok = false;
    for (const auto& reach : chains_[nt]) {
      for (const Rule* r : g_.rules_for(reach)) {
        if (g_.is_nonterminal(r->rhs)) continue;
        if (match(r->rhs, t)) {
          ok = true;
          break;
        }
      }
      if (ok) break;
    }
    memo.emplace(t, ok);
    return ok;
  }

 private:
  bool match(const Term& skel, const Term& t) {
    if (g_.is_nonterminal(skel)) {
      if (t.sort() != skel.sort()) return false;
      return from(skel.name(), t);
    }
    if (skel.kind() != t.kind() || skel.num_children() != t.num_children()) return false;
    switch (skel.kind()) {
      case Kind::IntConst:
      case Kind::Mul:
        if (skel.value() != t.value()) return false;
        break;
      case Kind::BoolConst:
        if (skel.bool_value() != t.bool_value()) return false;
        break;
      case Kind::Var:
        return skel.name() == t.name() && skel.sort() == t.sort();
      default:
        break;
    }
    for (std::size_t i = 0; i < skel.num_children(); ++i) {
      if (!match(skel[i], t[i])) return false;
    }
    return true;
  }

  const Grammar& g_;
  std::map<std::string, std::set<std::string>> chains_;
  std::map<std::string, std::unordered_map<Term, bool, TermHash>> memo_;
};

}  // namespace

bool generated_from(const Grammar& g, const std::string& nt, const Term& t) {
  if (!g.find(nt)) throw GrammarError("unknown nonterminal " + nt);
  Generability gen(g);
  return gen.from(nt, t);
}

bool generated_by(const Grammar& g, const Term& t) {
  return generated_from(g, g.start, t);
}

FunSort SynthFun::sort() const {
  FunSort s;
  for (const auto& p : params) s.params.push_back(p.sort());
  s.ret = ret;
  return s;
}

const SynthFun* SynthProblem::find(const std::string& name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool SynthProblem::has_grammar() const {
  for (const auto& f : functions) {
    if (f.grammar) return true;
  }
  return false;
}

namespace {

void check_applications(const SynthProblem& p, const Term& t) {
  if (t.kind() == Kind::Apply) {
    const SynthFun* f = p.find(t.name());
    if (!f) throw SortError("application of undeclared function " + t.name());
    if (f->params.size() != t.num_children()) {
      throw SortError("function " + t.name() + " is not fully applied");
    }
    for (std::size_t i = 0; i < f->params.size(); ++i) {
      if (f->params[i].sort() != t[i].sort()) {
        throw SortError("argument " + std::to_string(i + 1) + " of " + t.name() +
                        " has the wrong sort");
      }
    }
    if (t.sort() != f->ret) throw SortError("result sort of " + t.name());
  }
  for (const auto& c : t.children()) check_applications(p, c);
}

}  // namespace

void SynthProblem::validate() const {
  if (constraint.is_null() || !well_sorted(constraint) ||
      constraint.sort() != BaseSort::Bool || constraint.kind() == Kind::Lambda) {
    throw SortError("constraint must be a well-sorted Bool term");
  }
  check_applications(*this, constraint);
  std::set<std::string> known;
  for (const auto& v : universals) known.insert(v.name());
  for (const auto& v : free_vars(constraint)) {
    if (!known.count(v.name())) {
      throw UnboundVariableError("undeclared variable " + v.name() + " in constraint");
    }
  }
  for (const auto& v : free_vars(constraint)) {
    for (const auto& u : universals) {
      if (u.name() == v.name() && u.sort() != v.sort()) {
        throw SortError("variable " + v.name() + " used at the wrong sort");
      }
    }
  }
  for (const auto& f : functions) {
    if (!f.grammar) continue;
    f.grammar->validate();
    if (f.grammar->start_sort() != f.ret) {
      throw GrammarError("start symbol sort of " + f.name + " differs from its return sort");
    }
  }
}

Term beta_reduce(const Term& lambda, const std::vector<Term>& args) {
  if (lambda.kind() != Kind::Lambda) throw SolutionError("binding is not a lambda");
  auto params = lambda.lambda_params();
  if (params.size() != args.size()) throw SolutionError("arity mismatch");
  Substitution m;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].sort() != args[i].sort()) throw SolutionError("argument sort mismatch");
    m.emplace(params[i].name(), args[i]);
  }
  return substitute(lambda.lambda_body(), m);
}

namespace {

Term apply_rec(const Term& t, const Solution& s,
               std::unordered_map<Term, Term, TermHash>& memo) {
  if (t.num_children() == 0 && t.kind() != Kind::Apply) return t;
  auto it = memo.find(t);
  if (it != memo.end()) return it->second;
  std::vector<Term> ch;
  ch.reserve(t.num_children());
  for (const auto& c : t.children()) ch.push_back(apply_rec(c, s, memo));
  Term out;
  if (t.kind() == Kind::Apply) {
    auto b = s.bindings.find(t.name());
    if (b == s.bindings.end()) throw SolutionError("no binding for " + t.name());
    if (b->second.lambda_params().size() != ch.size()) {
      throw SolutionError("arity mismatch for " + t.name());
    }
    out = beta_reduce(b->second, ch);
    if (contains_apply(out)) {
      throw SolutionError("body of " + t.name() + " applies a function to synthesize");
    }
  } else {
    out = rebuild(t, std::move(ch));
  }
  memo.emplace(t, out);
  return out;
}

}  // namespace

Term apply_solution(const SynthProblem& p, const Solution& s) {
  for (const auto& f : p.functions) {
    auto b = s.bindings.find(f.name);
    if (b == s.bindings.end()) throw SolutionError("no binding for " + f.name);
    if (b->second.kind() != Kind::Lambda) {
      throw SolutionError("binding for " + f.name + " is not a lambda");
    }
    auto params = b->second.lambda_params();
    if (params.size() != f.params.size()) throw SolutionError("arity mismatch for " + f.name);
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].sort() != f.params[i].sort()) {
        throw SolutionError("parameter sort mismatch for " + f.name);
      }
    }
  }
  std::unordered_map<Term, Term, TermHash> memo;
  return apply_rec(p.constraint, s, memo);
}

}  // namespace liasynth
