#include <gtest/gtest.h>

#include <set>

#include "liasynth/cegqi.hpp"
#include "liasynth/errors.hpp"
#include "liasynth/frontend.hpp"
#include "liasynth/qf_solver.hpp"
#include "liasynth/rewriter.hpp"
#include "oracles.hpp"

using namespace liasynth;

namespace {

Term X = mk_var("x", BaseSort::Int);
Term Y = mk_var("y", BaseSort::Int);

const char* kHead2 = "(set-logic LIA) (synth-fun f ((x Int) (y Int)) Int";
const char* kVars2 = "(declare-var x Int) (declare-var y Int)";

const char* kBetween =
    "(and (=> (> x (+ y 1)) (and (> x (f x y)) (> (f x y) y))) "
    "(=> (> y (+ x 1)) (and (> y (f x y)) (> (f x y) x))))";

// I -> 0 | 1 | x | y | I + I | ite(B, I, I);  B -> I > I | I = I | not B
const char* kGrammar =
    "((I Int) (B Bool)) ((I Int (0 1 x y (+ I I) (ite B I I))) (B Bool ((> I I) (= I I) (not B))))";

SynthProblem two_arg(const std::string& constraint, const std::string& grammar = "") {
  return parse_problem(std::string(kHead2) + " " + grammar + ") " + kVars2 + " (constraint " +
                       constraint + ") (check-synth)");
}

SynthProblem io_problem() {
  return parse_problem(
      "(set-logic LIA) (synth-fun f ((x Int)) Int) (declare-var x Int) "
      "(constraint (and (=> (= x 1) (= (f x) 2)) (=> (= x 2) (= (f x) 3)) (=> (= x 7) (= (f x) 8)))) "
      "(check-synth)");
}

std::set<std::string> keys(const InstanceTrace& tr) {
  std::set<std::string> out;
  for (const auto& inst : tr.instances) out.insert(canonical_key(inst.at(0)));
  return out;
}

InstanceTrace trace_of(const FirstOrderForm& fo, const std::vector<Term>& ts) {
  InstanceTrace tr;
  for (const auto& t : ts) {
    tr.instances.push_back({t});
    tr.gamma.push_back(substitute(fo.body, {{fo.instvars[0].name(), t}}));
  }
  return tr;
}

bool verifies(const SynthProblem& p, const Solution& s) { return check_valid(apply_solution(p, s)); }

}  // namespace

TEST(SelectTerms, EqualityWins) {
  Term z = mk_var("z", BaseSort::Int);
  auto ts = select_terms({{"x", Integer(3)}, {"z", Integer(3)}}, {z}, {}, mk_eq(z, X));
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0], X);
}

TEST(SelectTerms, StrictLowerBound) {
  FirstOrderForm fo = to_first_order(two_arg(kBetween));
  Term z = fo.instvars[0];
  // x = 3, y = 0 satisfies x > y + 1; z = 1 lies strictly between.
  auto ts = select_terms({{"x", Integer(3)}, {"y", Integer(0)}, {z.name(), Integer(1)}}, {z}, {},
                         fo.positive());
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(canonical_key(ts[0]), canonical_key(mk_add(Y, mk_int(1))));
}

TEST(SelectTerms, FallbackKeepsBodyTrue) {
  Term z = mk_var("z", BaseSort::Int);
  // 2z = x has no unit coefficient: the model value is used.
  Term pos = mk_eq(mk_mul(2, z), X);
  Assignment m{{"x", Integer(4)}, {"z", Integer(2)}};
  auto ts = select_terms(m, {z}, {}, pos);
  EXPECT_TRUE(evaluate_bool(substitute(pos, {{"z", ts[0]}}), m));
}

TEST(SolveCegqi, Between) {
  FirstOrderForm fo = to_first_order(two_arg(kBetween));
  CegqiResult r = solve_cegqi(fo);
  ASSERT_TRUE(r.solved) << r.reason;
  EXPECT_EQ(r.trace.instances.size(), 2u);
  std::set<std::string> want{canonical_key(mk_add(X, mk_int(1))), canonical_key(mk_add(Y, mk_int(1)))};
  EXPECT_EQ(keys(r.trace), want);
  EXPECT_FALSE(check_sat(mk_and(r.trace.gamma)).sat);
}

TEST(SolveCegqi, IoTable) {
  FirstOrderForm fo = to_first_order(io_problem());
  CegqiResult r = solve_cegqi(fo);
  ASSERT_TRUE(r.solved) << r.reason;
  EXPECT_EQ(r.trace.instances.size(), 3u);
  std::set<std::string> want{canonical_key(mk_int(2)), canonical_key(mk_int(3)), canonical_key(mk_int(8))};
  EXPECT_EQ(keys(r.trace), want);
}

TEST(SolveCegqi, NullaryConstant) {
  FirstOrderForm fo;
  fo.functions = {"f"};
  Term z = mk_var("z", BaseSort::Int);
  fo.instvars = {z};
  fo.body = mk_not(mk_eq(z, mk_int(0)));
  CegqiResult r = solve_cegqi(fo);
  ASSERT_TRUE(r.solved);
  ASSERT_EQ(r.trace.instances.size(), 1u);
  EXPECT_EQ(r.trace.instances[0][0], mk_int(0));
}

TEST(SolveCegqi, GivesUp) {
  // No function satisfies f(x) > x and f(x) < x.
  auto un = solve_cegqi(two_arg("(and (> (f x y) x) (< (f x y) x))"));
  EXPECT_FALSE(un.solved);
  EXPECT_FALSE(un.reason.empty());
  // Iteration cap.
  auto cap = solve_cegqi(two_arg("(and (>= (f x y) x) (>= (f x y) y) (or (= (f x y) x) (= (f x y) y)))"), 1);
  EXPECT_FALSE(cap.solved);
  EXPECT_EQ(cap.iterations, 1u);
}

TEST(SolveCegqi, TraceInvariantsAndProgress) {
  for (const auto& p : {two_arg(kBetween), io_problem(),
                        two_arg("(and (>= (f x y) x) (>= (f x y) y) (or (= (f x y) x) (= (f x y) y)))")}) {
    FirstOrderForm fo = to_first_order(p);
    CegqiResult r = solve_cegqi(fo);
    ASSERT_TRUE(r.solved);
    std::vector<Term> prefix;
    for (std::size_t i = 0; i < r.trace.instances.size(); ++i) {
      const Term& t = r.trace.instances[i][0];
      EXPECT_FALSE(contains_apply(t));
      for (const auto& v : free_vars(t)) EXPECT_NE(v.name(), fo.instvars[0].name());
      EXPECT_EQ(r.trace.gamma[i], substitute(fo.body, {{fo.instvars[0].name(), t}}));
      // Each new member rules out something the earlier ones allowed.
      EXPECT_TRUE(check_sat(mk_and(mk_and(prefix), mk_not(r.trace.gamma[i]))).sat);
      prefix.push_back(r.trace.gamma[i]);
    }
  }
}

TEST(ExtractSolution, Between) {
  SynthProblem p = two_arg(kBetween);
  FirstOrderForm fo = to_first_order(p);
  Solution s = extract_solution(trace_of(fo, {mk_add(X, mk_int(1)), mk_add(Y, mk_int(1))}), p);
  Term body = s.bindings.at("f").lambda_body();
  Term want = mk_ite(mk_le(X, mk_add(Y, mk_int(1))), mk_add(X, mk_int(1)), mk_add(Y, mk_int(1)));
  EXPECT_EQ(body, normalize(want));
  EXPECT_TRUE(verifies(p, s));
}

TEST(ExtractSolution, IoTable) {
  SynthProblem p = io_problem();
  FirstOrderForm fo = to_first_order(p);
  Solution s = extract_solution(trace_of(fo, {mk_int(2), mk_int(3), mk_int(8)}), p);
  const Term& lam = s.bindings.at("f");
  Term x = lam.lambda_params()[0];
  std::vector<std::pair<long, long>> table{{1, 2}, {2, 3}, {7, 8}};
  for (auto [in, out] : table) {
    EXPECT_EQ(evaluate_int(lam.lambda_body(), {{x.name(), Integer(in)}}), out);
  }
  EXPECT_TRUE(verifies(p, s));
}

TEST(ExtractSolution, SingleInstanceAndEmpty) {
  SynthProblem p = parse_problem(
      "(set-logic LIA) (synth-fun f ((x Int)) Int) (declare-var x Int) (constraint (= (f x) 0)) "
      "(check-synth)");
  FirstOrderForm fo = to_first_order(p);
  Solution s = extract_solution(trace_of(fo, {mk_int(0)}), p);
  EXPECT_EQ(s.bindings.at("f").lambda_body(), mk_int(0));
  EXPECT_THROW(extract_solution(InstanceTrace{}, p), SynthError);
}

TEST(Reconstruct, ConditionThroughNegation) {
  SynthProblem p = two_arg(kBetween, kGrammar);
  const Grammar& g = *p.functions[0].grammar;
  Term body = mk_ite(mk_le(X, mk_add(Y, mk_int(1))), mk_add(X, mk_int(1)), mk_add(Y, mk_int(1)));
  EXPECT_FALSE(generated_by(g, body));
  auto r = reconstruct_term(body, g, 3);
  ASSERT_TRUE(r);
  EXPECT_TRUE(generated_by(g, *r));
  EXPECT_TRUE(are_equivalent(*r, body));
  ASSERT_EQ(r->kind(), Kind::Ite);
  EXPECT_EQ((*r)[0].kind(), Kind::Not);
  EXPECT_EQ((*r)[0][0].kind(), Kind::Gt);
}

TEST(Reconstruct, GenerableIsUnchanged) {
  SynthProblem p = two_arg(kBetween, kGrammar);
  const Grammar& g = *p.functions[0].grammar;
  Term body = mk_ite(mk_gt(X, Y), X, mk_add(Y, mk_int(1)));
  ASSERT_TRUE(generated_by(g, body));
  EXPECT_EQ(reconstruct_term(body, g, 3), body);
}

TEST(Reconstruct, ConstantFromSmallerPieces) {
  SynthProblem p = parse_problem(
      "(set-logic LIA) (synth-fun f ((x Int)) Int ((I Int)) ((I Int (0 1 (+ I I))))) "
      "(declare-var x Int) (constraint (= (f x) 2)) (check-synth)");
  const Grammar& g = *p.functions[0].grammar;
  // The oracle: size-1 grammar terms whose value is 2.
  std::vector<Term> twos;
  for (const auto& [k, t] : oracle::expand_grammar(g, "I", 1)) {
    if (oracle::internal_nodes(t) == 1 && oracle::eval(t, {{"x", 0}}) == 2) twos.push_back(t);
  }
  ASSERT_EQ(twos.size(), 1u);
  EXPECT_EQ(reconstruct_term(mk_int(2), g, 1), twos[0]);
  EXPECT_EQ(to_string(twos[0]), "(+ 1 1)");
}

TEST(Reconstruct, BudgetExhausted) {
  SynthProblem p = parse_problem(
      "(set-logic LIA) (synth-fun f ((x Int)) Int ((I Int)) ((I Int (0 1 (+ I I))))) "
      "(declare-var x Int) (constraint (= (f x) x)) (check-synth)");
  EXPECT_FALSE(reconstruct_term(X, *p.functions[0].grammar, 3));
  Solution s;
  s.bindings["f"] = mk_lambda({X}, X);
  EXPECT_TRUE(std::holds_alternative<Failure>(reconstruct(s, p, 3)));
}

TEST(Properties, SolvedResultsVerify) {
  // Template family: guarded bounds and equalities on f(x, y).
  oracle::Gen g(21);
  int solved = 0;
  for (int i = 0; i < 100; ++i) {
    auto lin = [&] {
      Term t = mk_int(g.between(-3, 3));
      if (g.pick(2)) t = mk_add(t, mk_mul(Integer(g.between(-2, 2)), X));
      if (g.pick(2)) t = mk_add(t, mk_mul(Integer(g.between(-2, 2)), Y));
      return t;
    };
    Term fxy = mk_apply("f", BaseSort::Int, {X, Y});
    std::vector<Term> cs;
    int n = 1 + g.pick(3);
    for (int j = 0; j < n; ++j) {
      static const Kind ops[] = {Kind::Ge, Kind::Le, Kind::Gt, Kind::Lt, Kind::Eq};
      Term atom = mk_cmp(ops[g.pick(5)], fxy, lin());
      if (g.pick(2)) atom = mk_implies(mk_cmp(ops[g.pick(4)], X, lin()), atom);
      cs.push_back(atom);
    }
    SynthProblem p;
    SynthFun fn;
    fn.name = "f";
    fn.params = {X, Y};
    p.functions.push_back(fn);
    p.universals = {X, Y};
    p.constraint = mk_and(cs);
    CegqiResult r = solve_cegqi(p, 32);
    if (!r.solved) continue;
    ++solved;
    EXPECT_TRUE(verifies(p, *r.solution)) << to_string(p.constraint);
  }
  EXPECT_GT(solved, 20);
}
