#include <gtest/gtest.h>

#include "liasynth/errors.hpp"
#include "liasynth/qf_solver.hpp"
#include "oracles.hpp"

using namespace liasynth;

namespace {

Term X = mk_var("x", BaseSort::Int);
Term Y = mk_var("y", BaseSort::Int);
Term Z = mk_var("z", BaseSort::Int);
Term P = mk_var("p", BaseSort::Bool);

Term one() { return mk_int(1); }

LinearConstraint bound(long a, long c) {
  LinearConstraint l;
  l.coeffs = {{0, Integer(a)}};
  l.constant = c;
  return l;
}

}  // namespace

TEST(CheckSat, Examples) {
  Term f = mk_and(mk_gt(X, mk_add(Y, one())), mk_gt(Y, mk_add(X, one())));
  EXPECT_FALSE(check_sat(f).sat);

  auto r = check_sat(mk_or(mk_eq(X, mk_int(2)), mk_eq(X, mk_int(7))));
  ASSERT_TRUE(r.sat);
  Integer v = std::get<Integer>(r.model.at("x"));
  EXPECT_TRUE(v == 2 || v == 7);

  EXPECT_TRUE(check_sat(mk_true()).sat);
  EXPECT_FALSE(check_sat(mk_false()).sat);
}

TEST(CheckSat, Errors) {
  EXPECT_THROW(check_sat(X), SortError);
  EXPECT_THROW(check_sat(mk_ge(mk_apply("f", BaseSort::Int, {X}), X)), SortError);
}

TEST(CheckSat, IntegerReasoning) {
  // 2x = 1 has rational but no integer solutions.
  EXPECT_FALSE(check_sat(mk_eq(mk_mul(2, X), one())).sat);
  // 3x + 3y = 2 likewise.
  EXPECT_FALSE(check_sat(mk_eq(mk_add(mk_mul(3, X), mk_mul(3, Y)), mk_int(2))).sat);
  // 1 < 2x < 3 forces x = 1.
  auto r = check_sat(mk_and(mk_lt(one(), mk_mul(2, X)), mk_lt(mk_mul(2, X), mk_int(3))));
  ASSERT_TRUE(r.sat);
  EXPECT_EQ(std::get<Integer>(r.model.at("x")), 1);
  // Large constants stay exact.
  Term big = mk_int(Integer("123456789012345678901234567890"));
  auto rb = check_sat(mk_eq(mk_add(X, one()), big));
  ASSERT_TRUE(rb.sat);
  EXPECT_EQ(std::get<Integer>(rb.model.at("x")), Integer("123456789012345678901234567889"));
}

TEST(CheckSat, IteAndBooleans) {
  Term t = mk_ite(P, X, mk_add(X, one()));
  auto r = check_sat(mk_and(mk_eq(t, mk_int(5)), mk_eq(X, mk_int(4))));
  ASSERT_TRUE(r.sat);
  EXPECT_EQ(std::get<bool>(r.model.at("p")), false);
  EXPECT_FALSE(check_sat(mk_and({mk_eq(t, mk_int(5)), mk_eq(X, mk_int(4)), P})).sat);
}

TEST(CheckSat, ConflictingBoundsOnOneVariable) {
  // Implications whose antecedents pin x to different constants.
  Term f = mk_not(mk_and({mk_implies(mk_eq(X, one()), mk_false()),
                          mk_implies(mk_eq(X, mk_int(7)), mk_true())}));
  auto r = check_sat(f);
  ASSERT_TRUE(r.sat);
  EXPECT_EQ(std::get<Integer>(r.model.at("x")), 1);
}

TEST(Ilp, CrossedBounds) {
  EXPECT_FALSE(solve_ilp(1, {bound(1, -1), bound(-1, 7)}));
  EXPECT_FALSE(solve_ilp(1, {bound(1, -1), bound(-1, 1), bound(1, -7), bound(-1, 7)}));
  auto m = solve_ilp(1, {bound(1, -1), bound(-1, 1), bound(1, -7)});
  ASSERT_TRUE(m);
  EXPECT_EQ((*m)[0], 1);
}

TEST(CheckValid, Examples) {
  Term y1 = mk_add(Y, one());
  Term a = mk_le(X, y1), b = mk_not(mk_gt(X, y1));
  EXPECT_TRUE(check_valid(mk_and(mk_implies(a, b), mk_implies(b, a))));
  EXPECT_FALSE(check_valid(mk_ge(X, Y)));

  Term mx = mk_ite(mk_ge(X, Y), X, Y);
  Term want = mk_and(mk_implies(mk_ge(X, Y), mk_eq(mx, X)), mk_implies(mk_ge(Y, X), mk_eq(mx, Y)));
  for (long x = -4; x <= 4; ++x) {
    for (long y = -4; y <= 4; ++y) ASSERT_TRUE(oracle::eval_bool(want, {{"x", x}, {"y", y}}));
  }
  EXPECT_TRUE(check_valid(want));
}

TEST(AreEquivalent, Examples) {
  EXPECT_TRUE(are_equivalent(mk_add(X, mk_int(0)), X));
  Term y1 = mk_add(Y, one()), x1 = mk_add(X, one());
  EXPECT_TRUE(are_equivalent(mk_ite(mk_le(X, y1), x1, y1), mk_ite(mk_not(mk_gt(X, y1)), x1, y1)));
  EXPECT_FALSE(are_equivalent(X, Y));
  EXPECT_THROW(are_equivalent(X, P), SortError);
}

TEST(Properties, AgreesWithBruteForce) {
  oracle::Gen g(3);
  std::vector<Term> xs{X, Y, Z};
  int conclusive = 0;
  for (int i = 0; i < 500; ++i) {
    Term f = oracle::random_formula(g, xs, 4);
    auto brute = oracle::brute_model(f, xs, -6, 6);
    auto r = check_sat(f);
    if (r.sat) {
      oracle::Env env;
      for (const auto& x : xs) {
        auto it = r.model.find(x.name());
        env[x.name()] = it == r.model.end() ? 0 : static_cast<long long>(std::get<Integer>(it->second));
      }
      EXPECT_TRUE(oracle::eval_bool(f, env)) << to_string(f);
    }
    if (brute) {
      ++conclusive;
      EXPECT_TRUE(r.sat) << to_string(f);
    }
  }
  EXPECT_GT(conclusive, 100);
}

TEST(Properties, MixedFormulasWithIte) {
  oracle::Gen g(4);
  std::vector<Term> xs{X, Y};
  std::vector<Term> bs{P};
  for (int i = 0; i < 300; ++i) {
    Term f = oracle::random_bool(g, xs, bs, 4);
    bool found = false;
    for (long p = 0; p <= 1 && !found; ++p) {
      for (long x = -6; x <= 6 && !found; ++x) {
        for (long y = -6; y <= 6 && !found; ++y) {
          found = oracle::eval_bool(f, {{"x", x}, {"y", y}, {"p", p}});
        }
      }
    }
    auto r = check_sat(f);
    if (r.sat) EXPECT_TRUE(evaluate_bool(f, [&] {
      Assignment a = r.model;
      for (const auto& x : xs) a.emplace(x.name(), Integer(0));
      a.emplace("p", false);
      return a;
    }())) << to_string(f);
    if (found) EXPECT_TRUE(r.sat) << to_string(f);
  }
}

TEST(Properties, Monotonicity) {
  oracle::Gen g(5);
  std::vector<Term> xs{X, Y, Z};
  int checked = 0;
  for (int i = 0; i < 300 && checked < 50; ++i) {
    Term f = oracle::random_formula(g, xs, 3);
    if (check_sat(f).sat) continue;
    ++checked;
    EXPECT_FALSE(check_sat(mk_and(f, oracle::random_formula(g, xs, 3))).sat);
  }
  EXPECT_GT(checked, 0);
}
