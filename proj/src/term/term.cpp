#include "liasynth/term.hpp"

#include <cassert>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace liasynth {

struct TermNode {
  Kind kind;
  BaseSort sort;
  Integer value;
  bool bval = false;
  std::string name;
  std::vector<Term> children;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_integer(const Integer& v) {
  static const Integer kMin = std::numeric_limits<long long>::min();
  static const Integer kMax = std::numeric_limits<long long>::max();
  if (v >= kMin && v <= kMax) {
    return std::hash<long long>()(v.convert_to<long long>());
  }
  return std::hash<std::string>()(v.str());
}

const std::vector<Term> kNoChildren;
const Integer kZero = 0;
const std::string kEmpty;

}  // namespace

Term make_node(Kind kind, BaseSort sort, Integer value, bool bval,
               std::string name, std::vector<Term> children) {
  auto n = std::make_shared<TermNode>();
  n->kind = kind;
  n->sort = sort;
  n->value = std::move(value);
  n->bval = bval;
  n->name = std::move(name);
  n->children = std::move(children);
  std::size_t h = std::hash<int>()(static_cast<int>(kind));
  h = mix(h, static_cast<std::size_t>(sort));
  if (kind == Kind::IntConst || kind == Kind::Mul) {
    h = mix(h, hash_integer(n->value));
  }
  if (kind == Kind::BoolConst) h = mix(h, n->bval ? 1 : 2);
  if (!n->name.empty()) h = mix(h, std::hash<std::string>()(n->name));
  for (const auto& c : n->children) h = mix(h, c.hash());
  n->hash = h;
  return Term(std::move(n));
}

const char* sort_name(BaseSort s) { return s == BaseSort::Int ? "Int" : "Bool"; }

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::IntConst: return "int";
    case Kind::BoolConst: return "bool";
    case Kind::Var: return "var";
    case Kind::Add: return "+";
    case Kind::Mul: return "*";
    case Kind::Le: return "<=";
    case Kind::Lt: return "<";
    case Kind::Ge: return ">=";
    case Kind::Gt: return ">";
    case Kind::Eq: return "=";
    case Kind::Not: return "not";
    case Kind::And: return "and";
    case Kind::Or: return "or";
    case Kind::Implies: return "=>";
    case Kind::Ite: return "ite";
    case Kind::Apply: return "apply";
    case Kind::Lambda: return "lambda";
  }
  return "?";
}

bool is_comparison(Kind k) {
  return k == Kind::Le || k == Kind::Lt || k == Kind::Ge || k == Kind::Gt ||
         k == Kind::Eq;
}

Kind Term::kind() const { return node_->kind; }
BaseSort Term::sort() const { return node_->sort; }
const std::vector<Term>& Term::children() const {
  return node_ ? node_->children : kNoChildren;
}
const Integer& Term::value() const { return node_ ? node_->value : kZero; }
bool Term::bool_value() const { return node_->bval; }
const std::string& Term::name() const { return node_ ? node_->name : kEmpty; }
std::size_t Term::hash() const { return node_ ? node_->hash : 0; }

std::vector<Term> Term::lambda_params() const {
  assert(kind() == Kind::Lambda);
  const auto& ch = children();
  return {ch.begin(), ch.end() - 1};
}

const Term& Term::lambda_body() const {
  assert(kind() == Kind::Lambda);
  return children().back();
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const TermNode& x = *a.node_;
  const TermNode& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.sort != y.sort ||
      x.children.size() != y.children.size()) {
    return false;
  }
  if ((x.kind == Kind::IntConst || x.kind == Kind::Mul) && x.value != y.value)
    return false;
  if (x.kind == Kind::BoolConst && x.bval != y.bval) return false;
  if (x.name != y.name) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (x.children[i] != y.children[i]) return false;
  }
  return true;
}

Term mk_int(Integer v) {
  return make_node(Kind::IntConst, BaseSort::Int, std::move(v), false, {}, {});
}
Term mk_int(long v) { return mk_int(Integer(v)); }
Term mk_bool(bool b) {
  return make_node(Kind::BoolConst, BaseSort::Bool, 0, b, {}, {});
}
Term mk_true() { return mk_bool(true); }
Term mk_false() { return mk_bool(false); }

Term mk_var(std::string name, BaseSort sort) {
  return make_node(Kind::Var, sort, 0, false, std::move(name), {});
}

Term mk_add(std::vector<Term> args) {
  if (args.empty()) return mk_int(0);
  if (args.size() == 1) return args[0];
  return make_node(Kind::Add, BaseSort::Int, 0, false, {}, std::move(args));
}
Term mk_add(Term a, Term b) { return mk_add(std::vector<Term>{a, b}); }

Term mk_mul(Integer coeff, Term t) {
  return make_node(Kind::Mul, BaseSort::Int, std::move(coeff), false, {}, {t});
}

Term mk_neg(Term a) {
  if (a.kind() == Kind::IntConst) return mk_int(-a.value());
  return mk_mul(-1, std::move(a));
}

Term mk_sub(Term a, Term b) { return mk_add(std::move(a), mk_neg(std::move(b))); }

Term mk_cmp(Kind k, Term a, Term b) {
  if (!is_comparison(k)) throw std::invalid_argument("mk_cmp: not a comparison");
  return make_node(k, BaseSort::Bool, 0, false, {}, {std::move(a), std::move(b)});
}
Term mk_le(Term a, Term b) { return mk_cmp(Kind::Le, a, b); }
Term mk_lt(Term a, Term b) { return mk_cmp(Kind::Lt, a, b); }
Term mk_ge(Term a, Term b) { return mk_cmp(Kind::Ge, a, b); }
Term mk_gt(Term a, Term b) { return mk_cmp(Kind::Gt, a, b); }
Term mk_eq(Term a, Term b) { return mk_cmp(Kind::Eq, a, b); }

Term mk_not(Term a) {
  return make_node(Kind::Not, BaseSort::Bool, 0, false, {}, {std::move(a)});
}

Term mk_and(std::vector<Term> args) {
  if (args.empty()) return mk_true();
  if (args.size() == 1) return args[0];
  return make_node(Kind::And, BaseSort::Bool, 0, false, {}, std::move(args));
}
Term mk_and(Term a, Term b) { return mk_and(std::vector<Term>{a, b}); }

Term mk_or(std::vector<Term> args) {
  if (args.empty()) return mk_false();
  if (args.size() == 1) return args[0];
  return make_node(Kind::Or, BaseSort::Bool, 0, false, {}, std::move(args));
}
Term mk_or(Term a, Term b) { return mk_or(std::vector<Term>{a, b}); }

Term mk_implies(Term a, Term b) {
  return make_node(Kind::Implies, BaseSort::Bool, 0, false, {},
                   {std::move(a), std::move(b)});
}

Term mk_ite(Term c, Term t, Term e) {
  BaseSort s = t.sort();
  return make_node(Kind::Ite, s, 0, false, {},
                   {std::move(c), std::move(t), std::move(e)});
}

Term mk_apply(std::string fname, BaseSort ret, std::vector<Term> args) {
  return make_node(Kind::Apply, ret, 0, false, std::move(fname),
                   std::move(args));
}

Term mk_lambda(std::vector<Term> params, Term body) {
  BaseSort s = body.sort();
  params.push_back(std::move(body));
  return make_node(Kind::Lambda, s, 0, false, {}, std::move(params));
}

Term rebuild(const Term& t, std::vector<Term> children) {
  switch (t.kind()) {
    case Kind::IntConst:
    case Kind::BoolConst:
    case Kind::Var:
      return t;
    case Kind::Add:
      return make_node(Kind::Add, BaseSort::Int, 0, false, {},
                       std::move(children));
    case Kind::Mul:
      return mk_mul(t.value(), children.at(0));
    case Kind::Le:
    case Kind::Lt:
    case Kind::Ge:
    case Kind::Gt:
    case Kind::Eq:
      return mk_cmp(t.kind(), children.at(0), children.at(1));
    case Kind::Not:
      return mk_not(children.at(0));
    case Kind::And:
      return make_node(Kind::And, BaseSort::Bool, 0, false, {},
                       std::move(children));
    case Kind::Or:
      return make_node(Kind::Or, BaseSort::Bool, 0, false, {},
                       std::move(children));
    case Kind::Implies:
      return mk_implies(children.at(0), children.at(1));
    case Kind::Ite:
      return mk_ite(children.at(0), children.at(1), children.at(2));
    case Kind::Apply:
      return mk_apply(t.name(), t.sort(), std::move(children));
    case Kind::Lambda: {
      Term body = children.back();
      children.pop_back();
      return mk_lambda(std::move(children), std::move(body));
    }
  }
  throw std::logic_error("rebuild: unknown kind");
}

namespace {

void print_int(std::ostream& os, const Integer& v) {
  if (v < 0) {
    os << "(- " << Integer(-v) << ")";
  } else {
    os << v;
  }
}

void print(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Kind::IntConst:
      print_int(os, t.value());
      return;
    case Kind::BoolConst:
      os << (t.bool_value() ? "true" : "false");
      return;
    case Kind::Var:
      os << t.name();
      return;
    case Kind::Mul:
      if (t.value() == -1 && !t[0].is_int_const()) {
        os << "(- ";
        print(os, t[0]);
        os << ")";
        return;
      }
      os << "(* ";
      print_int(os, t.value());
      os << " ";
      print(os, t[0]);
      os << ")";
      return;
    case Kind::Apply:
      if (t.num_children() == 0) {
        os << t.name();
        return;
      }
      os << "(" << t.name();
      for (const auto& c : t.children()) {
        os << " ";
        print(os, c);
      }
      os << ")";
      return;
    case Kind::Lambda: {
      os << "(lambda (";
      auto params = t.lambda_params();
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) os << " ";
        os << "(" << params[i].name() << " " << sort_name(params[i].sort())
           << ")";
      }
      os << ") ";
      print(os, t.lambda_body());
      os << ")";
      return;
    }
    default:
      os << "(" << kind_name(t.kind());
      for (const auto& c : t.children()) {
        os << " ";
        print(os, c);
      }
      os << ")";
      return;
  }
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  print(os, t);
  return os;
}

}  // namespace liasynth
