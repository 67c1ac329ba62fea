#include "liasynth/datatypes.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <sstream>

#include "levels.hpp"
#include "liasynth/errors.hpp"
#include "liasynth/rewriter.hpp"

namespace liasynth {

namespace {

std::atomic<std::uint64_t> next_node_id{1};

const char* op_name(Kind k) {
  switch (k) {
    case Kind::Add: return "plus";
    case Kind::Le: return "leq";
    case Kind::Lt: return "lt";
    case Kind::Ge: return "geq";
    case Kind::Gt: return "gt";
    case Kind::Eq: return "eq";
    case Kind::Not: return "not";
    case Kind::And: return "and";
    case Kind::Or: return "or";
    case Kind::Implies: return "implies";
    case Kind::Ite: return "if";
    default: return "op";
  }
}

std::string leaf_name(const Term& t) {
  if (t.is_int_const()) return t.value().str();
  if (t.is_bool_const()) return t.bool_value() ? "true" : "false";
  return t.name();
}

class Flattener {
 public:
  Flattener(const Grammar& g, const EncodingOptions& opts) : g_(g), opts_(opts) {
    for (const auto& nt : g.nonterminals) {
      nt_index_[nt.name] = static_cast<int>(fam_.datatypes.size());
      Datatype d;
      d.name = nt.name;
      d.sort = nt.sort;
      d.nonterminal = nt.name;
      fam_.datatypes.push_back(std::move(d));
    }
    fam_.params = g.params;
  }

  DatatypeFamily run() {
    std::size_t n = g_.nonterminals.size();
    // Own constructors first, so auxiliary datatypes are named after the
    // nonterminal that owns the rule.
    std::vector<std::vector<std::pair<std::string, Constructor>>> own(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& nt = g_.nonterminals[i].name;
      for (const Rule* r : g_.rules_for(nt)) {
        if (g_.is_nonterminal(r->rhs)) continue;
        own[i].emplace_back(term_key(r->rhs), convert(nt, r->rhs));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Constructor> ctors;
      std::set<std::string> seen;
      for (int j : chain_closure(g_.nonterminals[i].name)) {
        for (const auto& [key, c] : own[j]) {
          if (seen.insert(key).second) ctors.push_back(c);
        }
      }
      fam_.datatypes[i].ctors = std::move(ctors);
    }
    if (opts_.minimize) {
      for (auto& d : fam_.datatypes) minimize(d);
    }
    for (auto& d : fam_.datatypes) unique_names(d);
    fam_.start = nt_index_.at(g_.start);
    return std::move(fam_);
  }

 private:
  std::vector<int> chain_closure(const std::string& nt) {
    std::vector<int> order{nt_index_.at(nt)};
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::string& cur = g_.nonterminals[order[k]].name;
      for (const Rule* r : g_.rules_for(cur)) {
        if (!g_.is_nonterminal(r->rhs)) continue;
        int j = nt_index_.at(r->rhs.name());
        if (std::find(order.begin(), order.end(), j) == order.end()) order.push_back(j);
      }
    }
    return order;
  }

  Constructor convert(const std::string& owner, const Term& rhs) {
    Constructor c;
    if (rhs.num_children() == 0) {
      c.leaf = rhs;
      c.name = leaf_name(rhs);
      return c;
    }
    c.op = rhs.kind();
    if (c.op == Kind::Mul) {
      c.coeff = rhs.value();
      c.name = c.coeff == -1 ? "neg" : "mul" + c.coeff.str();
    } else {
      c.name = op_name(c.op);
    }
    for (const Term& ch : rhs.children()) {
      if (g_.is_nonterminal(ch)) {
        c.args.push_back(nt_index_.at(ch.name()));
        continue;
      }
      Datatype aux;
      aux.name = owner + std::to_string(++aux_count_[owner]);
      while (fam_.index_of(aux.name) >= 0) aux.name += "_";
      aux.sort = ch.sort();
      int idx = static_cast<int>(fam_.datatypes.size());
      fam_.datatypes.push_back(aux);
      Constructor inner = convert(owner, ch);
      fam_.datatypes[idx].ctors.push_back(std::move(inner));
      c.args.push_back(idx);
    }
    return c;
  }

  // Drops a constructor whose analog over fresh variables normalizes like an
  // earlier one's, up to a permutation of identically typed arguments.
  void minimize(Datatype& d) {
    std::vector<Constructor> kept;
    std::vector<std::string> leaf_keys;
    for (const auto& c : d.ctors) {
      bool redundant = false;
      for (const auto& k : kept) {
        if (c.is_leaf() != k.is_leaf()) continue;
        if (c.is_leaf()) {
          redundant = canonical_key(c.leaf) == canonical_key(k.leaf);
        } else {
          redundant = same_up_to_permutation(k, c);
        }
        if (redundant) break;
      }
      if (!redundant) kept.push_back(c);
    }
    d.ctors = std::move(kept);
  }

  bool same_up_to_permutation(const Constructor& a, const Constructor& b) {
    if (a.args.size() != b.args.size()) return false;
    std::vector<int> sa = a.args, sb = b.args;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
    std::size_t m = a.args.size();
    std::vector<Term> vars;
    for (std::size_t k = 0; k < m; ++k) {
      vars.push_back(mk_var("#m" + std::to_string(k), fam_.datatypes[a.args[k]].sort));
    }
    std::string ka = canonical_key(a.build(vars));
    std::vector<std::size_t> perm(m);
    for (std::size_t k = 0; k < m; ++k) perm[k] = k;
    do {
      bool typed = true;
      std::vector<Term> w(m);
      for (std::size_t k = 0; k < m; ++k) {
        if (b.args[perm[k]] != a.args[k]) {
          typed = false;
          break;
        }
        w[perm[k]] = vars[k];
      }
      if (typed && canonical_key(b.build(w)) == ka) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  }

  static void unique_names(Datatype& d) {
    std::map<std::string, int> used;
    for (auto& c : d.ctors) {
      int n = ++used[c.name];
      if (n > 1) c.name += "_" + std::to_string(n);
    }
  }

  const Grammar& g_;
  EncodingOptions opts_;
  DatatypeFamily fam_;
  std::map<std::string, int> nt_index_;
  std::map<std::string, int> aux_count_;
};

Value apply_ctor(const Constructor& c, const std::vector<Value>& a) {
  auto I = [&](std::size_t i) -> const Integer& { return std::get<Integer>(a[i]); };
  auto B = [&](std::size_t i) { return std::get<bool>(a[i]); };
  switch (c.op) {
    case Kind::Add: {
      Integer s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) s += I(i);
      return s;
    }
    case Kind::Mul: return Integer(c.coeff * I(0));
    case Kind::Le: return I(0) <= I(1);
    case Kind::Lt: return I(0) < I(1);
    case Kind::Ge: return I(0) >= I(1);
    case Kind::Gt: return I(0) > I(1);
    case Kind::Eq: return a[0] == a[1];
    case Kind::Not: return !B(0);
    case Kind::And: {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!B(i)) return false;
      }
      return true;
    }
    case Kind::Or: {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (B(i)) return true;
      }
      return false;
    }
    case Kind::Implies: return !B(0) || B(1);
    case Kind::Ite: return B(0) ? a[1] : a[2];
    default: throw SynthError("eval_dt: unsupported constructor " + c.name);
  }
}

}  // namespace

Term Constructor::build(const std::vector<Term>& children) const {
  if (is_leaf()) return leaf;
  switch (op) {
    case Kind::Add: return mk_add(children);
    case Kind::Mul: return mk_mul(coeff, children.at(0));
    case Kind::Not: return mk_not(children.at(0));
    case Kind::And: return mk_and(children);
    case Kind::Or: return mk_or(children);
    case Kind::Implies: return mk_implies(children.at(0), children.at(1));
    case Kind::Ite: return mk_ite(children.at(0), children.at(1), children.at(2));
    default: return mk_cmp(op, children.at(0), children.at(1));
  }
}

int DatatypeFamily::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < datatypes.size(); ++i) {
    if (datatypes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

DatatypeFamily DatatypeFamily::with_start(int dt) const {
  DatatypeFamily f = *this;
  f.start = dt;
  return f;
}

DatatypeFamily grammar_to_datatypes(const Grammar& g, const EncodingOptions& opts) {
  g.validate();
  return Flattener(g, opts).run();
}

Grammar default_grammar(const std::vector<Term>& params, BaseSort ret) {
  auto fresh = [&](std::string n) {
    auto clash = [&](const std::string& s) {
      return std::any_of(params.begin(), params.end(),
                         [&](const Term& p) { return p.name() == s; });
    };
    while (clash(n)) n += "_";
    return n;
  };
  std::string in = fresh("I"), bn = fresh("B");
  Term I = mk_var(in, BaseSort::Int), B = mk_var(bn, BaseSort::Bool);
  Grammar g;
  g.params = params;
  g.nonterminals = {{in, BaseSort::Int}, {bn, BaseSort::Bool}};
  if (ret == BaseSort::Bool) std::swap(g.nonterminals[0], g.nonterminals[1]);
  g.start = ret == BaseSort::Int ? in : bn;
  g.rules.push_back({in, mk_int(0)});
  g.rules.push_back({in, mk_int(1)});
  for (const auto& p : params) {
    if (p.sort() == BaseSort::Int) g.rules.push_back({in, p});
  }
  g.rules.push_back({in, mk_add(I, I)});
  g.rules.push_back({in, mk_ite(B, I, I)});
  for (const auto& p : params) {
    if (p.sort() == BaseSort::Bool) g.rules.push_back({bn, p});
  }
  g.rules.push_back({bn, mk_le(I, I)});
  g.rules.push_back({bn, mk_eq(I, I)});
  g.rules.push_back({bn, mk_not(B)});
  return g;
}

DtValue make_value(const DatatypeFamily& fam, int dt, int ctor, std::vector<DtValue> children) {
  const Constructor& c = fam.dt(dt).ctors.at(ctor);
  if (children.size() != c.args.size()) {
    throw SynthError("constructor " + c.name + " expects " + std::to_string(c.args.size()) +
                     " arguments");
  }
  auto n = std::make_shared<DtNode>();
  n->dt = dt;
  n->ctor = ctor;
  if (c.is_leaf()) {
    n->analog = c.leaf;
    n->normal = normalize(c.leaf);
  } else {
    std::vector<Term> analogs, normals;
    n->size = 1;
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (children[i]->dt != c.args[i]) {
        throw SynthError("constructor " + c.name + ": argument " + std::to_string(i + 1) +
                         " has the wrong datatype");
      }
      n->size += children[i]->size;
      analogs.push_back(children[i]->analog);
      normals.push_back(children[i]->normal);
    }
    n->analog = c.build(analogs);
    n->normal = simplify_node(c.build(normals));
  }
  n->key = term_key(n->normal);
  n->children = std::move(children);
  n->id = next_node_id++;
  return n;
}

DtValue make_value(const DatatypeFamily& fam, const std::string& dt, const std::string& ctor,
                   std::vector<DtValue> children) {
  int d = fam.index_of(dt);
  if (d < 0) throw GrammarError("unknown datatype " + dt);
  const auto& cs = fam.dt(d).ctors;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i].name == ctor) return make_value(fam, d, static_cast<int>(i), std::move(children));
  }
  throw GrammarError("datatype " + dt + " has no constructor " + ctor);
}

Term to_analog(const DtValue& v) { return v->analog; }

std::string value_to_string(const DatatypeFamily& fam, const DtValue& v) {
  std::string s = fam.dt(v->dt).ctors[v->ctor].name;
  if (v->children.empty()) return s;
  s += "(";
  for (std::size_t i = 0; i < v->children.size(); ++i) {
    if (i) s += ", ";
    s += value_to_string(fam, v->children[i]);
  }
  return s + ")";
}

Value eval_dt(const DatatypeFamily& fam, const DtValue& v, const Point& point) {
  if (point.size() != fam.params.size()) {
    throw SynthError("eval_dt: point has " + std::to_string(point.size()) + " values, expected " +
                     std::to_string(fam.params.size()));
  }
  const Constructor& c = fam.dt(v->dt).ctors[v->ctor];
  if (c.is_leaf()) {
    const Term& t = c.leaf;
    if (t.is_int_const()) return t.value();
    if (t.is_bool_const()) return t.bool_value();
    for (std::size_t i = 0; i < fam.params.size(); ++i) {
      if (fam.params[i].name() != t.name()) continue;
      if (t.sort() == BaseSort::Bool) return point[i] != 0;
      return point[i];
    }
    throw UnboundVariableError(t.name());
  }
  std::vector<Value> args;
  if (c.op == Kind::Ite) {
    // Only the taken branch is unfolded.
    bool cond = std::get<bool>(eval_dt(fam, v->children[0], point));
    return eval_dt(fam, v->children[cond ? 1 : 2], point);
  }
  for (const auto& ch : v->children) args.push_back(eval_dt(fam, ch, point));
  return apply_ctor(c, args);
}

std::vector<Value> signature_of(const DatatypeFamily& fam, const DtValue& v,
                                const std::vector<Point>& points) {
  std::vector<Value> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(eval_dt(fam, v, p));
  return out;
}

namespace detail {

namespace {

void compositions(std::size_t total, std::size_t parts, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t k = 0; k <= total; ++k) {
    cur.push_back(k);
    compositions(total - k, parts, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<DtValue> build_level(const DatatypeFamily& fam, int dt, std::size_t size,
                                 const LevelLookup& lookup) {
  std::vector<DtValue> out;
  const auto& ctors = fam.dt(dt).ctors;
  for (std::size_t ci = 0; ci < ctors.size(); ++ci) {
    const Constructor& c = ctors[ci];
    if (c.args.empty()) {
      if (size == 0) out.push_back(make_value(fam, dt, static_cast<int>(ci), {}));
      continue;
    }
    if (size == 0) continue;
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> cur;
    compositions(size - 1, c.args.size(), cur, comps);
    for (const auto& comp : comps) {
      std::vector<const std::vector<DtValue>*> lists;
      bool empty = false;
      for (std::size_t i = 0; i < comp.size(); ++i) {
        lists.push_back(&lookup(c.args[i], comp[i]));
        if (lists.back()->empty()) empty = true;
      }
      if (empty) continue;
      std::vector<std::size_t> idx(lists.size(), 0);
      while (true) {
        std::vector<DtValue> ch;
        for (std::size_t i = 0; i < lists.size(); ++i) ch.push_back((*lists[i])[idx[i]]);
        out.push_back(make_value(fam, dt, static_cast<int>(ci), std::move(ch)));
        bool done = true;
        for (std::size_t k = lists.size(); k-- > 0;) {
          if (++idx[k] < lists[k]->size()) {
            done = false;
            break;
          }
          idx[k] = 0;
        }
        if (done) break;
      }
    }
  }
  return out;
}

}  // namespace detail

std::vector<DtValue> all_values(const DatatypeFamily& fam, int dt, std::size_t size) {
  std::map<std::pair<int, std::size_t>, std::vector<DtValue>> memo;
  detail::LevelLookup lookup = [&](int d, std::size_t s) -> const std::vector<DtValue>& {
    auto key = std::make_pair(d, s);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    auto vals = detail::build_level(fam, d, s, lookup);
    return memo.emplace(key, std::move(vals)).first->second;
  };
  return lookup(dt, size);
}

}  // namespace liasynth
