#include "liasynth/rewriter.hpp"

#include <algorithm>
#include <map>

#include "liasynth/errors.hpp"
#include "liasynth/term_ops.hpp"

namespace liasynth {

namespace {

void write_key(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Kind::IntConst:
      out += '#';
      out += t.value().str();
      out += ' ';
      return;
    case Kind::BoolConst:
      out += t.bool_value() ? "T " : "F ";
      return;
    case Kind::Var:
      out += t.sort() == BaseSort::Int ? "$i" : "$b";
      out += t.name();
      out += ' ';
      return;
    case Kind::Mul:
      out += "(*";
      out += t.value().str();
      out += ' ';
      write_key(t[0], out);
      out += ')';
      return;
    case Kind::Apply:
      out += t.sort() == BaseSort::Int ? "(@i" : "(@b";
      out += t.name();
      out += ' ';
      break;
    case Kind::Ite:
      out += t.sort() == BaseSort::Int ? "(?i " : "(?b ";
      break;
    default:
      out += '(';
      out += kind_name(t.kind());
      out += ' ';
      break;
  }
  for (const auto& c : t.children()) write_key(c, out);
  out += ')';
}

void lin_rec(const Term& t, const Integer& scale, Integer& constant,
             std::vector<std::pair<Term, Integer>>& acc) {
  switch (t.kind()) {
    case Kind::IntConst:
      constant += scale * t.value();
      return;
    case Kind::Add:
      for (const auto& c : t.children()) lin_rec(c, scale, constant, acc);
      return;
    case Kind::Mul:
      lin_rec(t[0], scale * t.value(), constant, acc);
      return;
    default:
      acc.emplace_back(t, scale);
      return;
  }
}

// Variables come first, by name; other atoms by key. Like atoms are merged.
void canonicalize(std::vector<std::pair<Term, Integer>>& ms) {
  std::vector<std::pair<std::string, std::pair<Term, Integer>>> keyed;
  keyed.reserve(ms.size());
  for (auto& m : ms) {
    std::string k = m.first.is_var() ? std::string("0") + m.first.name()
                                     : std::string("1") + term_key(m.first);
    keyed.emplace_back(std::move(k), std::move(m));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  ms.clear();
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i;
    Integer sum = 0;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) {
      sum += keyed[j].second.second;
      ++j;
    }
    if (sum != 0) ms.emplace_back(keyed[i].second.first, sum);
    i = j;
  }
}

}  // namespace

std::string term_key(const Term& t) {
  std::string out;
  write_key(t, out);
  return out;
}

Integer LinearForm::coefficient_of(const Term& atom) const {
  for (const auto& [a, c] : monomials) {
    if (a == atom) return c;
  }
  return 0;
}

LinearForm& LinearForm::add(const LinearForm& o, const Integer& scale) {
  constant += scale * o.constant;
  for (const auto& [a, c] : o.monomials) monomials.emplace_back(a, scale * c);
  canonicalize(monomials);
  return *this;
}

LinearForm LinearForm::negated() const {
  LinearForm r;
  r.constant = -constant;
  for (const auto& [a, c] : monomials) r.monomials.emplace_back(a, -c);
  return r;
}

LinearForm linearize(const Term& t) {
  LinearForm f;
  lin_rec(t, 1, f.constant, f.monomials);
  canonicalize(f.monomials);
  return f;
}

namespace {

Term monomial(const Term& atom, const Integer& c) {
  if (c == 1) return atom;
  return mk_mul(c, atom);
}

Term sum_of(const Integer& constant, const std::vector<Term>& parts) {
  std::vector<Term> args;
  if (constant != 0) args.push_back(mk_int(constant));
  args.insert(args.end(), parts.begin(), parts.end());
  return mk_add(std::move(args));
}

}  // namespace

Term from_linear(const LinearForm& f) {
  std::vector<Term> parts;
  for (const auto& [a, c] : f.monomials) parts.push_back(monomial(a, c));
  return sum_of(f.constant, parts);
}

namespace {

// Renders p <= 0 or p = 0 with positive monomials on the left and negative
// ones on the right; a constant goes to whichever side keeps it positive.
Term render_atom(Kind k, const LinearForm& p) {
  std::vector<Term> pos;
  std::vector<Term> neg;
  for (const auto& [a, c] : p.monomials) {
    if (c > 0) {
      pos.push_back(monomial(a, c));
    } else {
      neg.push_back(monomial(a, Integer(-c)));
    }
  }
  Term lhs;
  Term rhs;
  if (p.constant > 0) {
    lhs = sum_of(p.constant, pos);
    rhs = sum_of(0, neg);
  } else {
    lhs = sum_of(0, pos);
    rhs = sum_of(-p.constant, neg);
  }
  return mk_cmp(k, lhs, rhs);
}

Term leq_zero(LinearForm p) {
  if (p.is_constant()) return mk_bool(p.constant <= 0);
  Integer g = 0;
  for (const auto& m : p.monomials) g = gcd_int(g, m.second);
  if (g > 1) {
    for (auto& m : p.monomials) m.second /= g;
    p.constant = ceil_div(p.constant, g);
  }
  return render_atom(Kind::Le, p);
}

Term eq_zero(LinearForm p) {
  if (p.is_constant()) return mk_bool(p.constant == 0);
  Integer g = 0;
  for (const auto& m : p.monomials) g = gcd_int(g, m.second);
  if (p.monomials.front().second < 0) g = -g;
  if (p.constant % g != 0) return mk_false();
  for (auto& m : p.monomials) m.second /= g;
  p.constant /= g;
  return render_atom(Kind::Eq, p);
}

LinearForm difference(const Term& a, const Term& b) {
  LinearForm p = linearize(a);
  p.add(linearize(b), -1);
  return p;
}

Term simplify_not(const Term& c) {
  switch (c.kind()) {
    case Kind::BoolConst:
      return mk_bool(!c.bool_value());
    case Kind::Not:
      return c[0];
    case Kind::Le: {
      // not (p <= 0)  <=>  -p + 1 <= 0
      LinearForm p = difference(c[0], c[1]).negated();
      p.constant += 1;
      return leq_zero(p);
    }
    default:
      return mk_not(c);
  }
}

bool is_negation_of(const Term& a, const Term& b) {
  if (a.kind() == Kind::Not && a[0] == b) return true;
  if (b.kind() == Kind::Not && b[0] == a) return true;
  if (a.kind() == Kind::Le && b.kind() == Kind::Le) return simplify_not(a) == b;
  return false;
}

Term simplify_junction(Kind k, const std::vector<Term>& children) {
  const bool is_and = k == Kind::And;
  std::vector<Term> flat;
  for (const auto& c : children) {
    if (c.kind() == k) {
      flat.insert(flat.end(), c.children().begin(), c.children().end());
    } else {
      flat.push_back(c);
    }
  }
  std::map<std::string, Term> uniq;
  for (const auto& c : flat) {
    if (c.is_bool_const()) {
      if (c.bool_value() != is_and) return c;  // absorbing element
      continue;
    }
    uniq.emplace(term_key(c), c);
  }
  std::vector<Term> out;
  out.reserve(uniq.size());
  for (auto& [key, c] : uniq) out.push_back(c);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (is_negation_of(out[i], out[j])) return mk_bool(!is_and);
    }
  }
  if (out.empty()) return mk_bool(is_and);
  return is_and ? mk_and(std::move(out)) : mk_or(std::move(out));
}

Term simplify_ite(const Term& c, const Term& t, const Term& e) {
  if (c.is_bool_const()) return c.bool_value() ? t : e;
  if (t == e) return t;
  if (c.kind() == Kind::Not) return simplify_ite(c[0], e, t);
  return mk_ite(c, t, e);
}

Term simplify_bool_eq(const Term& a, const Term& b) {
  if (a == b) return mk_true();
  if (a.is_bool_const() && b.is_bool_const()) return mk_bool(a.bool_value() == b.bool_value());
  if (a.is_bool_const()) return a.bool_value() ? b : simplify_not(b);
  if (b.is_bool_const()) return b.bool_value() ? a : simplify_not(a);
  if (is_negation_of(a, b)) return mk_false();
  if (term_key(b) < term_key(a)) return mk_eq(b, a);
  return mk_eq(a, b);
}

}  // namespace

Term simplify_node(const Term& t) {
  const auto& ch = t.children();
  switch (t.kind()) {
    case Kind::IntConst:
    case Kind::BoolConst:
    case Kind::Var:
    case Kind::Apply:
      return t;
    case Kind::Add:
    case Kind::Mul:
      return from_linear(linearize(t));
    case Kind::Le:
      return leq_zero(difference(ch[0], ch[1]));
    case Kind::Lt: {
      LinearForm p = difference(ch[0], ch[1]);
      p.constant += 1;
      return leq_zero(p);
    }
    case Kind::Ge:
      return leq_zero(difference(ch[1], ch[0]));
    case Kind::Gt: {
      LinearForm p = difference(ch[1], ch[0]);
      p.constant += 1;
      return leq_zero(p);
    }
    case Kind::Eq:
      if (ch[0].sort() == BaseSort::Bool) return simplify_bool_eq(ch[0], ch[1]);
      return eq_zero(difference(ch[0], ch[1]));
    case Kind::Not:
      return simplify_not(ch[0]);
    case Kind::And:
    case Kind::Or:
      return simplify_junction(t.kind(), ch);
    case Kind::Implies:
      return simplify_junction(Kind::Or, {simplify_not(ch[0]), ch[1]});
    case Kind::Ite:
      return simplify_ite(ch[0], ch[1], ch[2]);
    case Kind::Lambda:
      return t;
  }
  throw SortError("unknown term kind");
}

namespace {

Term norm_rec(const Term& t) {
  if (t.num_children() == 0) return t;
  if (t.kind() == Kind::Lambda) {
    return mk_lambda(t.lambda_params(), norm_rec(t.lambda_body()));
  }
  std::vector<Term> ch;
  ch.reserve(t.num_children());
  for (const auto& c : t.children()) ch.push_back(norm_rec(c));
  return simplify_node(rebuild(t, std::move(ch)));
}

}  // namespace

Term normalize(const Term& t) {
  if (!well_sorted(t)) throw SortError("normalize: ill-sorted term " + to_string(t));
  return norm_rec(t);
}

std::string canonical_key(const Term& t) { return term_key(normalize(t)); }

}  // namespace liasynth
