#include "liasynth/term_ops.hpp"

#include <functional>
#include <set>
#include <unordered_set>

#include "liasynth/errors.hpp"

namespace liasynth {

std::string to_string(const Value& v) {
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return std::get<Integer>(v).str();
}

namespace {

bool ws(const Term& t, bool root) {
  const auto& ch = t.children();
  auto all_sort = [&](BaseSort s) {
    for (const auto& c : ch) {
      if (c.sort() != s || !ws(c, false)) return false;
    }
    return true;
  };
  switch (t.kind()) {
    case Kind::IntConst:
      return t.sort() == BaseSort::Int;
    case Kind::BoolConst:
      return t.sort() == BaseSort::Bool;
    case Kind::Var:
      return true;
    case Kind::Add:
      return !ch.empty() && all_sort(BaseSort::Int);
    case Kind::Mul:
      return ch.size() == 1 && all_sort(BaseSort::Int);
    case Kind::Le:
    case Kind::Lt:
    case Kind::Ge:
    case Kind::Gt:
      return ch.size() == 2 && all_sort(BaseSort::Int);
    case Kind::Eq:
      return ch.size() == 2 && ch[0].sort() == ch[1].sort() &&
             ws(ch[0], false) && ws(ch[1], false);
    case Kind::Not:
      return ch.size() == 1 && all_sort(BaseSort::Bool);
    case Kind::And:
    case Kind::Or:
      return !ch.empty() && all_sort(BaseSort::Bool);
    case Kind::Implies:
      return ch.size() == 2 && all_sort(BaseSort::Bool);
    case Kind::Ite:
      return ch.size() == 3 && ch[0].sort() == BaseSort::Bool &&
             ch[1].sort() == ch[2].sort() && t.sort() == ch[1].sort() &&
             ws(ch[0], false) && ws(ch[1], false) && ws(ch[2], false);
    case Kind::Apply:
      for (const auto& c : ch) {
        if (!ws(c, false)) return false;
      }
      return true;
    case Kind::Lambda: {
      if (!root) return false;
      for (std::size_t i = 0; i + 1 < ch.size(); ++i) {
        if (!ch[i].is_var()) return false;
      }
      return ws(ch.back(), false);
    }
  }
  return false;
}

}  // namespace

bool well_sorted(const Term& t) { return !t.is_null() && ws(t, true); }

namespace {

Integer as_int(const Value& v) {
  if (!std::holds_alternative<Integer>(v)) throw SortError("expected Int value");
  return std::get<Integer>(v);
}

bool as_bool(const Value& v) {
  if (!std::holds_alternative<bool>(v)) throw SortError("expected Bool value");
  return std::get<bool>(v);
}

Value eval(const Term& t, const Assignment& a) {
  const auto& ch = t.children();
  switch (t.kind()) {
    case Kind::IntConst:
      return t.value();
    case Kind::BoolConst:
      return t.bool_value();
    case Kind::Var: {
      auto it = a.find(t.name());
      if (it == a.end()) throw UnboundVariableError("unbound variable " + t.name());
      bool is_bool = std::holds_alternative<bool>(it->second);
      if (is_bool != (t.sort() == BaseSort::Bool)) {
        throw SortError("value of wrong sort for " + t.name());
      }
      return it->second;
    }
    case Kind::Add: {
      Integer s = 0;
      for (const auto& c : ch) s += as_int(eval(c, a));
      return s;
    }
    case Kind::Mul:
      return Integer(t.value() * as_int(eval(ch[0], a)));
    case Kind::Le:
      return as_int(eval(ch[0], a)) <= as_int(eval(ch[1], a));
    case Kind::Lt:
      return as_int(eval(ch[0], a)) < as_int(eval(ch[1], a));
    case Kind::Ge:
      return as_int(eval(ch[0], a)) >= as_int(eval(ch[1], a));
    case Kind::Gt:
      return as_int(eval(ch[0], a)) > as_int(eval(ch[1], a));
    case Kind::Eq: {
      Value l = eval(ch[0], a);
      Value r = eval(ch[1], a);
      if (l.index() != r.index()) throw SortError("= over different sorts");
      return l == r;
    }
    case Kind::Not:
      return !as_bool(eval(ch[0], a));
    case Kind::And:
      for (const auto& c : ch) {
        if (!as_bool(eval(c, a))) return false;
      }
      return true;
    case Kind::Or:
      for (const auto& c : ch) {
        if (as_bool(eval(c, a))) return true;
      }
      return false;
    case Kind::Implies:
      return !as_bool(eval(ch[0], a)) || as_bool(eval(ch[1], a));
    case Kind::Ite:
      return as_bool(eval(ch[0], a)) ? eval(ch[1], a) : eval(ch[2], a);
    case Kind::Apply:
      throw SortError("cannot evaluate application of " + t.name());
    case Kind::Lambda:
      throw SortError("cannot evaluate lambda");
  }
  throw SortError("unknown term kind");
}

}  // namespace

Value evaluate(const Term& t, const Assignment& a) { return eval(t, a); }
Integer evaluate_int(const Term& t, const Assignment& a) { return as_int(eval(t, a)); }
bool evaluate_bool(const Term& t, const Assignment& a) { return as_bool(eval(t, a)); }

namespace {

void collect_vars(const Term& t, std::set<std::string>& bound,
                  std::unordered_set<std::string>& seen, std::vector<Term>& out) {
  if (t.kind() == Kind::Var) {
    if (!bound.count(t.name()) && seen.insert(t.name()).second) out.push_back(t);
    return;
  }
  if (t.kind() == Kind::Lambda) {
    std::set<std::string> inner = bound;
    for (const auto& p : t.lambda_params()) inner.insert(p.name());
    collect_vars(t.lambda_body(), inner, seen, out);
    return;
  }
  for (const auto& c : t.children()) collect_vars(c, bound, seen, out);
}

Term subst(const Term& t, const Substitution& m) {
  switch (t.kind()) {
    case Kind::IntConst:
    case Kind::BoolConst:
      return t;
    case Kind::Var: {
      auto it = m.find(t.name());
      if (it == m.end()) return t;
      if (it->second.sort() != t.sort()) {
        throw SortError("substitution changes sort of " + t.name());
      }
      return it->second;
    }
    case Kind::Lambda: {
      auto params = t.lambda_params();
      Substitution inner = m;
      for (const auto& p : params) inner.erase(p.name());
      // Rename parameters that would capture a free variable of a replacement.
      std::unordered_set<std::string> incoming;
      for (const auto& [k, v] : inner) {
        for (const auto& fv : free_vars(v)) incoming.insert(fv.name());
      }
      std::unordered_set<std::string> taken = incoming;
      for (const auto& fv : free_vars(t.lambda_body())) taken.insert(fv.name());
      std::vector<Term> new_params;
      for (const auto& p : params) {
        if (!incoming.count(p.name())) {
          new_params.push_back(p);
          continue;
        }
        std::string fresh = p.name();
        int n = 0;
        while (taken.count(fresh)) fresh = p.name() + "_" + std::to_string(++n);
        taken.insert(fresh);
        Term np = mk_var(fresh, p.sort());
        inner[p.name()] = np;
        new_params.push_back(np);
      }
      return mk_lambda(new_params, subst(t.lambda_body(), inner));
    }
    default:
      break;
  }
  std::vector<Term> ch;
  ch.reserve(t.num_children());
  bool changed = false;
  for (const auto& c : t.children()) {
    ch.push_back(subst(c, m));
    if (ch.back() != c) changed = true;
  }
  if (!changed) return t;
  return rebuild(t, std::move(ch));
}

}  // namespace

Term substitute(const Term& t, const Substitution& m) {
  if (m.empty()) return t;
  return subst(t, m);
}

std::vector<Term> free_vars(const Term& t) {
  std::set<std::string> bound;
  std::unordered_set<std::string> seen;
  std::vector<Term> out;
  collect_vars(t, bound, seen, out);
  return out;
}

std::vector<std::string> applied_functions(const Term& t) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::function<void(const Term&)> go = [&](const Term& u) {
    if (u.kind() == Kind::Apply && seen.insert(u.name()).second) out.push_back(u.name());
    for (const auto& c : u.children()) go(c);
  };
  go(t);
  return out;
}

bool contains_apply(const Term& t) {
  if (t.kind() == Kind::Apply) return true;
  for (const auto& c : t.children()) {
    if (contains_apply(c)) return true;
  }
  return false;
}

std::size_t term_size(const Term& t) {
  if (t.num_children() == 0) return 0;
  std::size_t n = 1;
  for (const auto& c : t.children()) n += term_size(c);
  return n;
}

Term value_term(const Value& v) {
  if (std::holds_alternative<bool>(v)) return mk_bool(std::get<bool>(v));
  return mk_int(std::get<Integer>(v));
}

Term ground(const Term& t, const Assignment& a) {
  Substitution m;
  for (const auto& v : free_vars(t)) {
    auto it = a.find(v.name());
    if (it != a.end()) m.emplace(v.name(), value_term(it->second));
  }
  return substitute(t, m);
}

}  // namespace liasynth
