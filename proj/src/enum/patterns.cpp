#include <algorithm>
#include <set>

#include "liasynth/enumerate.hpp"
#include "liasynth/errors.hpp"
#include "liasynth/rewriter.hpp"
#include "pattern_tree.hpp"

namespace liasynth {

std::string path_to_string(const SelectorPath& p) {
  if (p.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ".";
    s += p[i].datatype + "#" + std::to_string(p[i].occurrence);
  }
  return s;
}

std::string pattern_to_string(const BlockingPattern& p) {
  std::string s = p.anchor + "{";
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    if (i) s += ", ";
    s += "(" + path_to_string(p.constraints[i].first) + ", " + p.constraints[i].second + ")";
  }
  return s + "}";
}

const char* justification_name(JustificationKind k) {
  switch (k) {
    case JustificationKind::Rewriter: return "rewriter";
    case JustificationKind::Signature: return "signature";
    case JustificationKind::Seed: return "seed";
  }
  return "?";
}

namespace {

// Index among c's arguments of the n-th one whose datatype is named dt.
int child_index(const DatatypeFamily& fam, const Constructor& c, const PathStep& step) {
  int seen = 0;
  for (std::size_t i = 0; i < c.args.size(); ++i) {
    if (fam.dt(c.args[i]).name != step.datatype) continue;
    if (++seen == step.occurrence) return static_cast<int>(i);
  }
  return -1;
}

PathStep step_for(const DatatypeFamily& fam, const Constructor& c, std::size_t i) {
  int occ = 0;
  for (std::size_t j = 0; j <= i; ++j) {
    if (c.args[j] == c.args[i]) ++occ;
  }
  return {fam.dt(c.args[i]).name, occ};
}

const Constructor& ctor_of(const DatatypeFamily& fam, const DtNode& n) {
  return fam.dt(n.dt).ctors[n.ctor];
}

}  // namespace

std::optional<DtValue> resolve_path(const DatatypeFamily& fam, const DtValue& v,
                                    const SelectorPath& path) {
  DtValue cur = v;
  for (const auto& step : path) {
    int i = child_index(fam, ctor_of(fam, *cur), step);
    if (i < 0) return std::nullopt;
    cur = cur->children[i];
  }
  return cur;
}

bool blocks(const DatatypeFamily& fam, const BlockingPattern& p, const DtValue& v) {
  if (fam.dt(v->dt).name != p.anchor) return false;
  for (const auto& [path, ctor] : p.constraints) {
    auto sub = resolve_path(fam, v, path);
    if (!sub || ctor_of(fam, **sub).name != ctor) return false;
  }
  return true;
}

bool blocks_anywhere(const DatatypeFamily& fam, const BlockingPattern& p, const DtValue& v) {
  if (blocks(fam, p, v)) return true;
  return std::any_of(v->children.begin(), v->children.end(),
                     [&](const DtValue& c) { return blocks_anywhere(fam, p, c); });
}

BlockingPattern make_blocking_pattern(const DatatypeFamily& fam, const DtValue& v) {
  return detail::to_pattern(fam, detail::tree_of(v));
}

BlockingPattern shift_pattern(const DatatypeFamily& fam, const BlockingPattern& p,
                              const SelectorPath& prefix, const std::string& root) {
  if (prefix.empty()) {
    if (root != p.anchor) throw SynthError("shift_pattern: type mismatch at empty prefix");
    return p;
  }
  if (prefix.back().datatype != p.anchor) {
    throw SynthError("shift_pattern: prefix lands on " + prefix.back().datatype +
                     ", pattern is anchored at " + p.anchor);
  }
  // Every step must be realizable by some constructor of the parent type.
  std::string cur = root;
  for (const auto& step : prefix) {
    int d = fam.index_of(cur);
    if (d < 0) throw SynthError("shift_pattern: unknown datatype " + cur);
    bool ok = std::any_of(fam.dt(d).ctors.begin(), fam.dt(d).ctors.end(),
                          [&](const Constructor& c) { return child_index(fam, c, step) >= 0; });
    if (!ok) throw SynthError("shift_pattern: " + cur + " has no child " + path_to_string({step}));
    cur = step.datatype;
  }
  BlockingPattern out;
  out.anchor = root;
  for (const auto& [path, ctor] : p.constraints) {
    SelectorPath np = prefix;
    np.insert(np.end(), path.begin(), path.end());
    out.constraints.emplace_back(std::move(np), ctor);
  }
  return out;
}

bool pattern_justified(const DatatypeFamily& fam, const BlockingPattern& p,
                       const Justification& j) {
  auto t = detail::to_tree(fam, p);
  return t && detail::tree_justified(fam, *t, j);
}

BlockingPattern generalize_pattern(const DatatypeFamily& fam, const DtValue& v,
                                   const Justification& j) {
  return detail::to_pattern(fam, detail::generalize_tree(fam, detail::tree_of(v), j));
}

std::vector<BlockingPattern> eager_seed_patterns(const DatatypeFamily& fam) {
  std::vector<BlockingPattern> out;
  for (const auto& t : detail::seed_trees(fam)) out.push_back(detail::to_pattern(fam, t));
  return out;
}

const DbEntry* CandidateDb::find_key(const std::string& key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &entries_[it->second];
}

const DbEntry* CandidateDb::find_signature(const std::vector<Value>& sig) const {
  auto it = by_sig_.find(sig);
  return it == by_sig_.end() ? nullptr : &entries_[it->second];
}

void CandidateDb::add(DbEntry e) {
  std::size_t i = entries_.size();
  by_key_.emplace(e.key, i);
  if (e.signature) by_sig_.emplace(*e.signature, i);
  entries_.push_back(std::move(e));
}

namespace detail {

PatTree tree_of(const DtValue& v) {
  PatTree t;
  t.dt = v->dt;
  t.ctor = v->ctor;
  for (const auto& c : v->children) t.children.push_back(tree_of(c));
  return t;
}

namespace {

void collect(const DatatypeFamily& fam, const PatTree& t, SelectorPath& path,
             BlockingPattern& out) {
  if (t.is_hole()) return;
  const Constructor& c = fam.dt(t.dt).ctors[t.ctor];
  out.constraints.emplace_back(path, c.name);
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    path.push_back(step_for(fam, c, i));
    collect(fam, t.children[i], path, out);
    path.pop_back();
  }
}

PatTree hole(int dt) {
  PatTree h;
  h.dt = dt;
  return h;
}

Term tree_term(const DatatypeFamily& fam, const PatTree& t, std::map<std::string, int>& holes) {
  if (t.is_hole()) {
    std::string n = "#h" + std::to_string(holes.size());
    holes[n] = t.dt;
    return mk_var(n, fam.dt(t.dt).sort);
  }
  std::vector<Term> ch;
  for (const auto& c : t.children) ch.push_back(tree_term(fam, c, holes));
  return fam.dt(t.dt).ctors[t.ctor].build(ch);
}

bool try_generalize(const DatatypeFamily& fam, PatTree& root, PatTree& node,
                    const Justification& j) {
  bool changed = false;
  for (auto& child : node.children) {
    if (child.is_hole()) continue;
    PatTree saved = std::move(child);
    child = hole(saved.dt);
    if (tree_justified(fam, root, j)) {
      changed = true;
      continue;
    }
    child = std::move(saved);
    changed |= try_generalize(fam, root, child, j);
  }
  return changed;
}

}  // namespace

BlockingPattern to_pattern(const DatatypeFamily& fam, const PatTree& t) {
  BlockingPattern p;
  p.anchor = fam.dt(t.dt).name;
  SelectorPath path;
  collect(fam, t, path, p);
  return p;
}

std::optional<PatTree> to_tree(const DatatypeFamily& fam, const BlockingPattern& p) {
  int anchor = fam.index_of(p.anchor);
  if (anchor < 0) return std::nullopt;
  PatTree root = hole(anchor);
  auto ctor_index = [&](int dt, const std::string& name) {
    const auto& cs = fam.dt(dt).ctors;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i].name == name) return static_cast<int>(i);
    }
    return -1;
  };
  // Shorter paths first so that parents are fixed before their children.
  auto cs = p.constraints;
  std::stable_sort(cs.begin(), cs.end(),
                   [](const auto& a, const auto& b) { return a.first.size() < b.first.size(); });
  for (const auto& [path, name] : cs) {
    PatTree* cur = &root;
    for (const auto& step : path) {
      if (cur->is_hole()) return std::nullopt;
      int i = child_index(fam, fam.dt(cur->dt).ctors[cur->ctor], step);
      if (i < 0) return std::nullopt;
      cur = &cur->children[i];
    }
    int ci = ctor_index(cur->dt, name);
    if (ci < 0) return std::nullopt;
    if (!cur->is_hole()) {
      if (cur->ctor != ci) return std::nullopt;
      continue;
    }
    cur->ctor = ci;
    for (int a : fam.dt(cur->dt).ctors[ci].args) cur->children.push_back(hole(a));
  }
  return root;
}

bool tree_matches(const PatTree& t, const DtNode& v) {
  if (t.is_hole()) return true;
  if (t.ctor != v.ctor || t.dt != v.dt) return false;
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (!tree_matches(t.children[i], *v.children[i])) return false;
  }
  return true;
}

void PatternIndex::add(const PatTree& t, std::size_t id) {
  Node* n = &roots_[t.dt];
  std::vector<const PatTree*> todo{&t};
  while (!todo.empty()) {
    const PatTree* cur = todo.back();
    todo.pop_back();
    auto& slot = n->next[cur->ctor];
    if (!slot) slot = std::make_unique<Node>();
    n = slot.get();
    for (auto it = cur->children.rbegin(); it != cur->children.rend(); ++it) todo.push_back(&*it);
  }
  n->ids.push_back(id);
}

long PatternIndex::first_match(const DtNode& v, std::size_t lo) const {
  auto it = roots_.find(v.dt);
  if (it == roots_.end()) return -1;
  long best = -1;
  std::vector<const DtNode*> todo{&v};
  search(it->second, todo, lo, best);
  return best;
}

void PatternIndex::search(const Node& n, std::vector<const DtNode*>& todo, std::size_t lo,
                          long& best) const {
  if (todo.empty()) {
    for (std::size_t id : n.ids) {
      if (id >= lo && (best < 0 || id < static_cast<std::size_t>(best))) best = static_cast<long>(id);
    }
    return;
  }
  const DtNode* v = todo.back();
  todo.pop_back();
  auto h = n.next.find(-1);
  if (h != n.next.end()) search(*h->second, todo, lo, best);
  auto c = n.next.find(v->ctor);
  if (c != n.next.end()) {
    for (auto it = v->children.rbegin(); it != v->children.rend(); ++it) todo.push_back(it->get());
    search(*c->second, todo, lo, best);
    todo.resize(todo.size() - v->children.size());
  }
  todo.push_back(v);
}

std::string tree_to_string(const DatatypeFamily& fam, const PatTree& t) {
  if (t.is_hole()) return "_";
  std::string s = fam.dt(t.dt).ctors[t.ctor].name;
  if (t.children.empty()) return s;
  s += "(";
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (i) s += ", ";
    s += tree_to_string(fam, t.children[i]);
  }
  return s + ")";
}

Assignment point_env(const DatatypeFamily& fam, const Point& p) {
  Assignment env;
  for (std::size_t i = 0; i < fam.params.size() && i < p.size(); ++i) {
    const Term& x = fam.params[i];
    if (x.sort() == BaseSort::Bool) {
      env[x.name()] = p[i] != 0;
    } else {
      env[x.name()] = p[i];
    }
  }
  return env;
}

bool tree_justified(const DatatypeFamily& fam, const PatTree& t, const Justification& j) {
  std::map<std::string, int> holes;
  Term term = tree_term(fam, t, holes);
  if (j.kind == JustificationKind::Signature) {
    if (t.dt != fam.start || j.points.size() != j.signature.size()) return false;
    for (std::size_t i = 0; i < j.points.size(); ++i) {
      auto v = partial_eval(term, point_env(fam, j.points[i]));
      if (!v || *v != j.signature[i]) return false;
    }
    return true;
  }
  Term nf = normalize(term);
  if (j.kind == JustificationKind::Rewriter && !j.key.empty() && term_key(nf) == j.key) {
    return true;
  }
  if (nf.is_var()) {
    auto it = holes.find(nf.name());
    if (it != holes.end() && it->second == t.dt) return true;
  }
  return false;
}

PatTree generalize_tree(const DatatypeFamily& fam, PatTree t, const Justification& j) {
  if (!tree_justified(fam, t, j)) return t;
  try_generalize(fam, t, t, j);
  return t;
}

std::vector<PatTree> seed_trees(const DatatypeFamily& fam) {
  constexpr std::size_t kMaxCombos = 4096;
  std::vector<PatTree> out;
  std::set<std::string> seen;
  Justification just{JustificationKind::Seed, {}, {}, {}};
  for (std::size_t d = 0; d < fam.datatypes.size(); ++d) {
    const auto& ctors = fam.dt(static_cast<int>(d)).ctors;
    for (std::size_t ci = 0; ci < ctors.size(); ++ci) {
      const Constructor& c = ctors[ci];
      if (c.is_leaf()) continue;
      std::vector<std::vector<PatTree>> options;
      std::size_t combos = 1;
      for (std::size_t a = 0; a < c.args.size(); ++a) {
        int ad = c.args[a];
        std::vector<PatTree> opt{hole(ad)};
        const auto& acs = fam.dt(ad).ctors;
        for (std::size_t k = 0; k < acs.size(); ++k) {
          if (acs[k].is_leaf()) opt.push_back(PatTree{ad, static_cast<int>(k), {}});
        }
        if (c.op == Kind::Ite && a == 0) {
          // Conditions whose arguments are all leaves.
          for (std::size_t k = 0; k < acs.size(); ++k) {
            if (acs[k].is_leaf()) continue;
            std::vector<std::vector<PatTree>> leaves;
            std::size_t n = 1;
            for (int g : acs[k].args) {
              std::vector<PatTree> ls;
              const auto& gcs = fam.dt(g).ctors;
              for (std::size_t m = 0; m < gcs.size(); ++m) {
                if (gcs[m].is_leaf()) ls.push_back(PatTree{g, static_cast<int>(m), {}});
              }
              n *= ls.size();
              leaves.push_back(std::move(ls));
            }
            if (n == 0 || n > kMaxCombos) continue;
            std::vector<std::size_t> idx(leaves.size(), 0);
            for (std::size_t r = 0; r < n; ++r) {
              PatTree cond{ad, static_cast<int>(k), {}};
              std::size_t q = r;
              for (std::size_t g = leaves.size(); g-- > 0;) {
                idx[g] = q % leaves[g].size();
                q /= leaves[g].size();
              }
              for (std::size_t g = 0; g < leaves.size(); ++g) cond.children.push_back(leaves[g][idx[g]]);
              opt.push_back(std::move(cond));
            }
          }
        }
        combos *= opt.size();
        options.push_back(std::move(opt));
      }
      if (combos > kMaxCombos) continue;
      for (std::size_t r = 0; r < combos; ++r) {
        PatTree t{static_cast<int>(d), static_cast<int>(ci), {}};
        std::size_t q = r;
        std::vector<std::size_t> pick(options.size());
        for (std::size_t a = options.size(); a-- > 0;) {
          pick[a] = q % options[a].size();
          q /= options[a].size();
        }
        bool all_holes = true;
        for (std::size_t a = 0; a < options.size(); ++a) {
          t.children.push_back(options[a][pick[a]]);
          all_holes &= t.children.back().is_hole();
        }
        if (all_holes || !tree_justified(fam, t, just)) continue;
        PatTree g = generalize_tree(fam, t, just);
        if (seen.insert(tree_to_string(fam, g)).second) out.push_back(std::move(g));
      }
    }
  }
  return out;
}

std::optional<Value> partial_eval(const Term& t, const Assignment& env) {
  using OV = std::optional<Value>;
  auto ival = [](const OV& v) { return std::get<Integer>(*v); };
  auto bval = [](const OV& v) { return std::get<bool>(*v); };
  switch (t.kind()) {
    case Kind::IntConst: return Value(t.value());
    case Kind::BoolConst: return Value(t.bool_value());
    case Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case Kind::Add: {
      Integer s = 0;
      for (const auto& c : t.children()) {
        OV v = partial_eval(c, env);
        if (!v) return std::nullopt;
        s += ival(v);
      }
      return Value(s);
    }
    case Kind::Mul: {
      if (t.value() == 0) return Value(Integer(0));
      OV v = partial_eval(t[0], env);
      if (!v) return std::nullopt;
      return Value(Integer(t.value() * ival(v)));
    }
    case Kind::Le:
    case Kind::Lt:
    case Kind::Ge:
    case Kind::Gt:
    case Kind::Eq: {
      OV a = partial_eval(t[0], env), b = partial_eval(t[1], env);
      if (!a || !b) return std::nullopt;
      if (t.kind() == Kind::Eq) return Value(*a == *b);
      const Integer &x = ival(a), &y = ival(b);
      switch (t.kind()) {
        case Kind::Le: return Value(x <= y);
        case Kind::Lt: return Value(x < y);
        case Kind::Ge: return Value(x >= y);
        default: return Value(x > y);
      }
    }
    case Kind::Not: {
      OV v = partial_eval(t[0], env);
      if (!v) return std::nullopt;
      return Value(!bval(v));
    }
    case Kind::And:
    case Kind::Or: {
      bool is_and = t.kind() == Kind::And;
      bool unknown = false;
      for (const auto& c : t.children()) {
        OV v = partial_eval(c, env);
        if (!v) {
          unknown = true;
        } else if (bval(v) != is_and) {
          return Value(!is_and);
        }
      }
      if (unknown) return std::nullopt;
      return Value(is_and);
    }
    case Kind::Implies: {
      OV a = partial_eval(t[0], env), b = partial_eval(t[1], env);
      if ((a && !bval(a)) || (b && bval(b))) return Value(true);
      if (a && b) return Value(false);
      return std::nullopt;
    }
    case Kind::Ite: {
      OV c = partial_eval(t[0], env);
      if (c) return partial_eval(bval(c) ? t[1] : t[2], env);
      OV a = partial_eval(t[1], env), b = partial_eval(t[2], env);
      if (a && b && *a == *b) return a;
      return std::nullopt;
    }
    default:
      throw SortError("partial_eval: unsupported term " + to_string(t));
  }
}

}  // namespace detail

}  // namespace liasynth
