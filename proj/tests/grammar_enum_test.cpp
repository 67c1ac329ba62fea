#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "liasynth/datatypes.hpp"
#include "liasynth/enumerate.hpp"
#include "liasynth/errors.hpp"
#include "liasynth/frontend.hpp"
#include "liasynth/qf_solver.hpp"
#include "liasynth/rewriter.hpp"
#include "oracles.hpp"

using namespace liasynth;

namespace {

Term X = mk_var("x", BaseSort::Int);
Term Y = mk_var("y", BaseSort::Int);

// I -> 0 | x | y | I+1 | ite(B,I,I);  B -> I<=I | I>=I | I=I | not B
const char* kSymGrammar =
    "((I Int) (B Bool)) ((I Int (0 x y (+ I 1) (ite B I I))) "
    "(B Bool ((<= I I) (>= I I) (= I I) (not B))))";

// I -> x | J+0;  J -> 0 | 1 | x | y | I+I
const char* kRestricted = "((I Int) (J Int)) ((I Int (x (+ J 0))) (J Int (0 1 x y (+ I I))))";

SynthProblem two_arg(const std::string& constraint, const std::string& grammar = "") {
  return parse_problem("(set-logic LIA) (synth-fun f ((x Int) (y Int)) Int " + grammar +
                       ") (declare-var x Int) (declare-var y Int) (constraint " + constraint +
                       ") (check-synth)");
}

Grammar grammar_of(const std::string& g) { return *two_arg("(= (f x y) x)", g).functions[0].grammar; }

DatatypeFamily default_family() {
  return grammar_to_datatypes(default_grammar({X, Y}, BaseSort::Int));
}

SynthProblem load(const std::string& name) {
  std::ifstream in(std::string(LIASYNTH_DATA_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::vector<std::string> ctor_names(const Datatype& d) {
  std::vector<std::string> out;
  for (const auto& c : d.ctors) out.push_back(c.name);
  return out;
}

struct Builder {
  const DatatypeFamily& fam;
  DtValue operator()(const std::string& dt, const std::string& c, std::vector<DtValue> ch = {}) const {
    return make_value(fam, dt, c, std::move(ch));
  }
};

std::vector<Point> pts(std::initializer_list<std::pair<long, long>> ps) {
  std::vector<Point> out;
  for (auto [a, b] : ps) out.push_back({Integer(a), Integer(b)});
  return out;
}

std::vector<long> ints(const std::vector<Value>& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(static_cast<long>(std::get<Integer>(x)));
  return out;
}

oracle::Env env_of(const DatatypeFamily& fam, const Point& p) {
  oracle::Env e;
  for (std::size_t i = 0; i < fam.params.size(); ++i) e[fam.params[i].name()] = static_cast<long long>(p[i]);
  return e;
}

std::set<std::string> strings(const std::vector<DtValue>& vs, const DatatypeFamily& fam) {
  std::set<std::string> out;
  for (const auto& v : vs) out.insert(value_to_string(fam, v));
  return out;
}

std::vector<DtValue> upto(const DatatypeFamily& fam, std::size_t n) {
  std::vector<DtValue> out;
  for (std::size_t s = 0; s <= n; ++s) {
    auto level = all_values(fam, fam.start, s);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace

TEST(Encoding, UpperBoundGrammar) {
  DatatypeFamily fam = grammar_to_datatypes(grammar_of(kSymGrammar));
  ASSERT_EQ(fam.datatypes.size(), 3u);
  EXPECT_EQ(fam.dt(fam.start).name, "I");
  EXPECT_EQ(ctor_names(fam.dt(fam.index_of("I"))),
            (std::vector<std::string>{"0", "x", "y", "plus", "if"}));
  EXPECT_EQ(ctor_names(fam.dt(fam.index_of("I1"))), std::vector<std::string>{"1"});
  EXPECT_EQ(ctor_names(fam.dt(fam.index_of("B"))), (std::vector<std::string>{"leq", "eq", "not"}));
  const Constructor& plus = fam.dt(fam.index_of("I")).ctors[3];
  EXPECT_EQ(plus.args, (std::vector<int>{fam.index_of("I"), fam.index_of("I1")}));

  // Without minimization the >= rule stays.
  DatatypeFamily raw = grammar_to_datatypes(grammar_of(kSymGrammar), {.minimize = false});
  EXPECT_EQ(ctor_names(raw.dt(raw.index_of("B"))),
            (std::vector<std::string>{"leq", "geq", "eq", "not"}));
}

TEST(Encoding, SmallGrammars) {
  DatatypeFamily one = grammar_to_datatypes(grammar_of("((I Int)) ((I Int (x 1 (+ I I))))"));
  ASSERT_EQ(one.datatypes.size(), 1u);
  EXPECT_EQ(ctor_names(one.dt(0)), (std::vector<std::string>{"x", "1", "plus"}));

  DatatypeFamily leaf = grammar_to_datatypes(grammar_of("((I Int)) ((I Int (0)))"));
  EXPECT_EQ(enumerate_values(leaf, 5).size(), 1u);

  EXPECT_THROW(grammar_to_datatypes(grammar_of("((I Int)) ((I Int ((+ I I))))")), GrammarError);
}

TEST(DefaultGrammar, Shapes) {
  DatatypeFamily fam = default_family();
  EXPECT_EQ(ctor_names(fam.dt(fam.start)), (std::vector<std::string>{"0", "1", "x", "y", "plus", "if"}));
  EXPECT_EQ(ctor_names(fam.dt(fam.index_of("B"))), (std::vector<std::string>{"leq", "eq", "not"}));

  Grammar nullary = default_grammar({}, BaseSort::Int);
  nullary.validate();
  for (const auto& r : nullary.rules) {
    if (r.rhs.is_var()) EXPECT_TRUE(nullary.is_nonterminal(r.rhs));
  }

  Grammar pred = default_grammar({X}, BaseSort::Bool);
  pred.validate();
  EXPECT_EQ(pred.start_sort(), BaseSort::Bool);
  DatatypeFamily pf = grammar_to_datatypes(pred);
  EXPECT_EQ(pf.dt(pf.start).sort, BaseSort::Bool);
}

TEST(Analog, Examples) {
  DatatypeFamily sym = grammar_to_datatypes(grammar_of(kSymGrammar));
  Builder v{sym};
  EXPECT_EQ(to_analog(v("I", "plus", {v("I", "x"), v("I1", "1")})), mk_add(X, mk_int(1)));
  EXPECT_EQ(to_analog(v("I", "if", {v("B", "leq", {v("I", "y"), v("I", "x")}), v("I", "x"), v("I", "y")})),
            mk_ite(mk_le(Y, X), X, Y));
  EXPECT_EQ(to_analog(v("I", "0")), mk_int(0));
  EXPECT_THROW(v("I", "plus", {v("I", "x")}), SynthError);
  EXPECT_THROW(v("I", "plus", {v("I", "x"), v("I", "x")}), SynthError);
}

TEST(EvalDt, Examples) {
  DatatypeFamily fam = default_family();
  Builder v{fam};
  Point p{Integer(2), Integer(3)};
  EXPECT_EQ(std::get<Integer>(eval_dt(fam, v("I", "x"), p)), 2);
  EXPECT_EQ(std::get<Integer>(eval_dt(fam, v("I", "y"), p)), 3);
  EXPECT_EQ(std::get<Integer>(eval_dt(fam, v("I", "plus", {v("I", "x"), v("I", "1")}), p)), 3);
  DtValue c = v("I", "if", {v("B", "leq", {v("I", "x"), v("I", "y")}), v("I", "1"), v("I", "0")});
  EXPECT_EQ(std::get<Integer>(eval_dt(fam, c, p)), 1);
  EXPECT_THROW(eval_dt(fam, c, {Integer(1)}), SynthError);
}

TEST(Signature, Examples) {
  DatatypeFamily fam = default_family();
  Builder v{fam};
  auto points = pts({{1, 1}, {2, 1}, {7, 1}});
  EXPECT_EQ(ints(signature_of(fam, v("I", "x"), points)), (std::vector<long>{1, 2, 7}));
  DtValue c = v("I", "if", {v("B", "leq", {v("I", "1"), v("I", "y")}), v("I", "1"), v("I", "x")});
  EXPECT_EQ(ints(signature_of(fam, c, points)), (std::vector<long>{1, 1, 1}));
  DtValue xx = v("I", "plus", {v("I", "x"), v("I", "x")});
  EXPECT_EQ(ints(signature_of(fam, xx, points)), (std::vector<long>{2, 4, 14}));
  EXPECT_EQ(ints(signature_of(fam, v("I", "0"), pts({{4, -2}, {0, 9}}))), (std::vector<long>{0, 0}));
}

TEST(Enumerate, OrderAndPatterns) {
  DatatypeFamily fam = default_family();
  Builder v{fam};
  auto all = enumerate_values(fam, 2);
  ASSERT_GE(all.size(), 5u);
  EXPECT_EQ(value_to_string(fam, all[0]), "0");
  EXPECT_EQ(value_to_string(fam, all[2]), "x");
  EXPECT_EQ(value_to_string(fam, all[4]), "plus(0, 0)");
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LE(all[i - 1]->size, all[i]->size);
  auto names = strings(all, fam);
  EXPECT_EQ(names.size(), all.size());
  EXPECT_TRUE(names.count("plus(x, 0)"));

  BlockingPattern p{"I", {{{}, "plus"}, {{{"I", 2}}, "0"}}};
  auto kept = strings(enumerate_values(fam, 2, {p}), fam);
  for (const char* s : {"plus(x, 0)", "plus(y, 0)", "plus(plus(x, 0), y)", "plus(y, plus(1, 0))"}) {
    EXPECT_FALSE(kept.count(s)) << s;
  }
  EXPECT_TRUE(kept.count("plus(0, x)"));

  DatatypeFamily leaf = grammar_to_datatypes(grammar_of("((I Int)) ((I Int (x)))"));
  EnumSession s(leaf, {.max_size = 3});
  EXPECT_TRUE(s.next_admitted());
  EXPECT_FALSE(s.next_admitted());
}

TEST(Patterns, MakeBlocking) {
  DatatypeFamily sym = grammar_to_datatypes(grammar_of(kSymGrammar));
  Builder v{sym};
  DtValue px1 = v("I", "plus", {v("I", "x"), v("I1", "1")});
  BlockingPattern p = make_blocking_pattern(sym, px1);
  EXPECT_EQ(pattern_to_string(p), "I{(e, plus), (I#1, x), (I1#1, 1)}");
  EXPECT_TRUE(blocks(sym, p, px1));
  EXPECT_FALSE(blocks(sym, p, v("I", "plus", {v("I", "y"), v("I1", "1")})));

  EXPECT_EQ(make_blocking_pattern(sym, v("I", "x")).constraints.size(), 1u);

  DatatypeFamily fam = default_family();
  Builder d{fam};
  DtValue c = d("I", "if", {d("B", "leq", {d("I", "0"), d("I", "1")}), d("I", "x"), d("I", "0")});
  BlockingPattern pc = make_blocking_pattern(fam, c);
  EXPECT_EQ(pc.constraints.size(), 6u);
  EXPECT_EQ(pattern_to_string(pc),
            "I{(e, if), (B#1, leq), (B#1.I#1, 0), (B#1.I#2, 1), (I#1, x), (I#2, 0)}");
}

TEST(Patterns, Generalize) {
  DatatypeFamily fam = default_family();
  Builder v{fam};
  DtValue x0 = v("I", "plus", {v("I", "x"), v("I", "0")});
  Justification j{JustificationKind::Rewriter, canonical_key(X), {}, {}};
  EXPECT_EQ(pattern_to_string(generalize_pattern(fam, x0, j)), "I{(e, plus), (I#2, 0)}");

  DtValue c = v("I", "if", {v("B", "leq", {v("I", "0"), v("I", "1")}), v("I", "x"), v("I", "0")});
  BlockingPattern g = generalize_pattern(fam, c, j);
  EXPECT_EQ(pattern_to_string(g), "I{(e, if), (B#1, leq), (B#1.I#1, 0), (B#1.I#2, 1)}");
  EXPECT_TRUE(pattern_justified(fam, g, j));
  EXPECT_FALSE(pattern_justified(fam, BlockingPattern{"I", {{{}, "plus"}}}, j));

  // The x child cannot be dropped: J also derives I+I.
  DatatypeFamily r = grammar_to_datatypes(grammar_of(kRestricted));
  Builder w{r};
  DtValue rx0 = w("I", "plus", {w("J", "x"), w("I1", "0")});
  EXPECT_EQ(to_analog(rx0), mk_add(X, mk_int(0)));
  EXPECT_EQ(pattern_to_string(generalize_pattern(r, rx0, j)), "I{(e, plus), (J#1, x), (I1#1, 0)}");
}

TEST(Patterns, Shift) {
  DatatypeFamily fam = default_family();
  Builder v{fam};
  DtValue x0 = v("I", "plus", {v("I", "x"), v("I", "0")});
  BlockingPattern p = make_blocking_pattern(fam, x0);
  BlockingPattern s = shift_pattern(fam, p, {{"I", 1}}, "I");
  EXPECT_EQ(pattern_to_string(s), "I{(I#1, plus), (I#1.I#1, x), (I#1.I#2, 0)}");
  EXPECT_EQ(pattern_to_string(shift_pattern(fam, p, {}, "I")), pattern_to_string(p));
  EXPECT_TRUE(blocks(fam, s, v("I", "plus", {x0, v("I", "y")})));
  EXPECT_FALSE(blocks(fam, s, v("I", "plus", {v("I", "y"), x0})));
  EXPECT_FALSE(blocks(fam, s, x0));
  EXPECT_THROW(shift_pattern(fam, p, {{"B", 1}}, "I"), SynthError);
  EXPECT_THROW(shift_pattern(fam, p, {}, "B"), SynthError);
}

TEST(SolveEnum, SymmetricUpperBound) {
  SynthProblem p = load("max_sym_grammar.sl");
  DatatypeFamily fam = grammar_to_datatypes(*p.functions[0].grammar);
  EnumResult r = solve_enum(p, fam, {});
  ASSERT_TRUE(r.solution) << r.reason;
  Term body = r.solution->bindings.at("f").lambda_body();
  EXPECT_TRUE(are_equivalent(body, mk_ite(mk_le(Y, X), X, Y))) << to_string(body);
  EXPECT_TRUE(check_valid(apply_solution(p, *r.solution)));
  EXPECT_TRUE(generated_by(*p.functions[0].grammar, body));
}

TEST(SolveEnum, IoWithSignatures) {
  SynthProblem p = load("io_sum_grammar.sl");
  DatatypeFamily fam = grammar_to_datatypes(*p.functions[0].grammar);
  EnumOptions o;
  o.io_pruning = true;
  o.io_points = pts({{1, 0}, {2, 1}, {7, 1}});
  EnumResult r = solve_enum(p, fam, o);
  ASSERT_TRUE(r.solution) << r.reason;
  Term body = r.solution->bindings.at("f").lambda_body();
  std::vector<long> got;
  for (auto [a, b] : {std::pair{1, 0}, {2, 1}, {7, 1}}) got.push_back(oracle::eval(body, {{"x", a}, {"y", b}}));
  EXPECT_EQ(got, (std::vector<long>{1, 3, 8}));
  EXPECT_TRUE(check_valid(apply_solution(p, *r.solution)));
}

TEST(SolveEnum, IdentityAndExhaustion) {
  SynthProblem p = parse_problem(
      "(set-logic LIA) (synth-fun f ((x Int)) Int) (declare-var x Int) (constraint (= (f x) x)) "
      "(check-synth)");
  DatatypeFamily fam = grammar_to_datatypes(default_grammar(p.functions[0].params, BaseSort::Int));
  EnumResult r = solve_enum(p, fam, {});
  ASSERT_TRUE(r.solution);
  EXPECT_EQ(r.solution->bindings.at("f").lambda_body(), X);

  SynthProblem q = parse_problem(
      "(set-logic LIA) (synth-fun f ((x Int)) Int) (declare-var x Int) "
      "(constraint (= (f x) (+ x x x x x x x x x x))) (check-synth)");
  EnumResult e = solve_enum(q, grammar_to_datatypes(default_grammar(q.functions[0].params, BaseSort::Int)),
                            {.max_size = 2});
  EXPECT_FALSE(e.solution);
  EXPECT_NE(e.reason.find("exhausted"), std::string::npos);
  const auto& st = e.stats;
  EXPECT_EQ(st.enumerated, st.retained + st.pruned_rewriter + st.pruned_signature + st.blocked_exact);
}

TEST(Properties, EvalCoherence) {
  DatatypeFamily fam = default_family();
  auto vals = upto(fam, 3);
  oracle::Gen g(21);
  for (int i = 0; i < 500; ++i) {
    const DtValue& v = vals[g.pick(static_cast<int>(vals.size()))];
    Point p{Integer(g.between(-9, 9)), Integer(g.between(-9, 9))};
    EXPECT_EQ(static_cast<long long>(std::get<Integer>(eval_dt(fam, v, p))),
              oracle::eval(to_analog(v), env_of(fam, p)))
        << value_to_string(fam, v);
  }
}

TEST(Properties, EncodingComplete) {
  for (const Grammar& gr : {grammar_of(kSymGrammar), default_grammar({X, Y}, BaseSort::Int)}) {
    DatatypeFamily fam = grammar_to_datatypes(gr, {.minimize = false});
    for (std::size_t k = 0; k <= 4; ++k) {
      auto want = oracle::expand_grammar(gr, gr.start, k);
      auto vals = upto(fam, k);
      std::multiset<std::string> got;
      for (const auto& v : vals) got.insert(oracle::show(to_analog(v)));
      std::set<std::string> keys;
      for (const auto& [s, t] : want) keys.insert(s);
      EXPECT_EQ(got.size(), keys.size()) << "size " << k;
      EXPECT_TRUE(std::equal(got.begin(), got.end(), keys.begin(), keys.end())) << "size " << k;
    }
  }
}

namespace {

// Semantic equality of two Int terms on a grid of points.
bool same_on_grid(const Term& a, const Term& b) {
  for (long x = -4; x <= 4; ++x) {
    for (long y = -4; y <= 4; ++y) {
      oracle::Env e{{"x", x}, {"y", y}};
      if (oracle::eval(a, e) != oracle::eval(b, e)) return false;
    }
  }
  return true;
}

std::optional<DtValue> blocked_position(const DatatypeFamily& fam, const BlockingPattern& p,
                                        const DtValue& v) {
  if (blocks(fam, p, v)) return v;
  for (const auto& c : v->children) {
    if (auto s = blocked_position(fam, p, c)) return s;
  }
  return std::nullopt;
}

void descendants(const DtValue& v, int dt, std::vector<DtValue>& out) {
  for (const auto& c : v->children) {
    if (c->dt == dt) out.push_back(c);
    descendants(c, dt, out);
  }
}

}  // namespace

TEST(Properties, PruningSound) {
  for (bool io : {false, true}) {
    DatatypeFamily fam = default_family();
    EnumOptions o;
    o.max_size = 4;
    o.audit = true;
    o.io_pruning = io;
    o.io_points = pts({{1, 1}, {2, 1}, {7, 1}});
    EnumSession s(fam, o);
    std::vector<DtValue> retained;
    while (auto v = s.next_admitted()) retained.push_back(*v);
    std::set<std::string> keys;
    std::set<std::vector<Value>> sigs;
    for (const auto& v : retained) {
      keys.insert(canonical_key(to_analog(v)));
      sigs.insert(signature_of(fam, v, o.io_points));
    }
    ASSERT_FALSE(s.pruned().empty());
    for (const auto& pv : s.pruned()) {
      if (pv.why.kind == JustificationKind::Signature) {
        EXPECT_TRUE(sigs.count(signature_of(fam, pv.value, o.io_points)));
      } else {
        EXPECT_TRUE(keys.count(canonical_key(to_analog(pv.value)))) << value_to_string(fam, pv.value);
      }
    }

    // Re-justify sampled blocked values from scratch.
    std::size_t seeds = eager_seed_patterns(fam).size();
    const auto& blocked = s.blocked();
    ASSERT_FALSE(blocked.empty());
    oracle::Gen g(io ? 31 : 30);
    for (int i = 0; i < 200; ++i) {
      const BlockedValue& b = blocked[g.pick(static_cast<int>(blocked.size()))];
      const BlockingPattern& p = s.patterns()[b.pattern];
      auto sub = blocked_position(fam, p, b.value);
      ASSERT_TRUE(sub) << value_to_string(fam, b.value);
      Term a = to_analog(*sub);
      std::vector<DtValue> smaller;
      descendants(*sub, (*sub)->dt, smaller);
      bool ok = false;
      for (const auto& d : smaller) {
        if (fam.dt(d->dt).sort == BaseSort::Int && same_on_grid(a, to_analog(d))) ok = true;
        if (fam.dt(d->dt).sort == BaseSort::Bool && normalize(a) == normalize(to_analog(d))) ok = true;
      }
      if (!ok && b.pattern >= seeds) {
        const Justification& j = s.pruned()[b.pattern - seeds].why;
        if (j.kind == JustificationKind::Signature) {
          ok = signature_of(fam, *sub, j.points) == j.signature;
        } else if (const DbEntry* e = s.db().find_key(j.key)) {
          ok = fam.dt((*sub)->dt).sort == BaseSort::Bool ? normalize(a) == normalize(to_analog(e->value))
                                                          : same_on_grid(a, to_analog(e->value));
        }
      }
      EXPECT_TRUE(ok) << value_to_string(fam, b.value) << " by " << pattern_to_string(p);
    }
  }
}

TEST(Properties, RetainedKeysComplete) {
  for (const Grammar& gr : {grammar_of(kSymGrammar), default_grammar({X, Y}, BaseSort::Int)}) {
    DatatypeFamily fam = grammar_to_datatypes(gr);
    EnumSession s(fam, {.max_size = 3});
    std::set<std::string> got;
    std::set<std::string> seen;
    while (auto v = s.next_admitted()) {
      EXPECT_TRUE(got.insert((*v)->key).second) << value_to_string(fam, *v);
      EXPECT_TRUE(seen.insert(value_to_string(fam, *v)).second);
    }
    std::set<std::string> want;
    for (const auto& [str, t] : oracle::expand_grammar(gr, gr.start, 3)) want.insert(canonical_key(t));
    EXPECT_EQ(got, want);
    EXPECT_LT(got.size(), oracle::expand_grammar(gr, gr.start, 3).size());
  }
}
