// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "liasynth/cegqi.hpp"
#include "liasynth/classifier.hpp"
#include "liasynth/datatypes.hpp"
#include "liasynth/enumerate.hpp"
#include "liasynth/frontend.hpp"
#include "liasynth/qf_solver.hpp"
#include "liasynth/rewriter.hpp"
#include "oracles.hpp"

using namespace liasynth;

namespace {

Term X = mk_var("x", BaseSort::Int);
Term Y = mk_var("y", BaseSort::Int);

SynthProblem load(const std::string& name) {
  std::ifstream in(std::string(LIASYNTH_DATA_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

struct Check {
  bool ok = true;
  std::string why;
  void expect(bool c, const std::string& msg) {
    if (!c && ok) {
      ok = false;
      why = msg;
    }
  }
};

int failures = 0;

void run(int n, const std::string& title, double limit, const std::function<void(Check&)>& body) {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream lim;
  lim << limit;
  c.expect(secs < limit, "took longer than " + lim.str() + " s");
  if (!c.ok) ++failures;
  std::cout << "criterion " << n << ": " << (c.ok ? "PASS" : "FAIL") << "  " << title << "  ("
            << secs << " s)";
  if (!c.ok) std::cout << "  -- " << c.why;
  std::cout << std::endl;
}

Term body_of(const Solution& s) { return s.bindings.at("f").lambda_body(); }

std::filesystem::path self_dir;

bool run_suite(const std::string& binary, const std::string& filter) {
  std::string cmd = (self_dir / binary).string() + " --gtest_brief=1 --gtest_filter='" + filter +
                    "' > /dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

}  // namespace

int main(int, char** argv) {
  self_dir = std::filesystem::absolute(argv[0]).parent_path();

  run(1, "instantiation loop on the between specification", 1.0, [](Check& c) {
    SynthProblem p = load("between.sl");
    CegqiResult r = solve_cegqi(p);
    c.expect(r.solved && r.solution, "not solved: " + r.reason);
    if (!c.ok) return;
    c.expect(r.iterations <= 3, "iterations: " + std::to_string(r.iterations));
    c.expect(verify_solution(p, *r.solution), "solution does not verify");
    Term y1 = mk_add(Y, mk_int(1)), x1 = mk_add(X, mk_int(1));
    c.expect(are_equivalent(body_of(*r.solution), mk_ite(mk_le(X, y1), x1, y1)),
             "not equivalent: " + to_string(body_of(*r.solution)));
  });

  run(2, "instantiation loop on input/output examples", 1.0, [](Check& c) {
    SynthProblem p = load("io_succ.sl");
    CegqiResult r = solve_cegqi(p);
    c.expect(r.solved && r.solution, "not solved: " + r.reason);
    if (!c.ok) return;
    c.expect(r.iterations <= 3, "iterations: " + std::to_string(r.iterations));
    const Term& lam = r.solution->bindings.at("f");
    Term x = lam.lambda_params()[0];
    std::vector<long> got;
    for (long in : {1, 2, 7}) {
      got.push_back(static_cast<long>(evaluate_int(lam.lambda_body(), {{x.name(), Integer(in)}})));
    }
    c.expect(got == std::vector<long>{2, 3, 8}, "wrong values at 1, 2, 7");
  });

  run(3, "auxiliary universal eliminated, maximum synthesized", 1.0, [](Check& c) {
    SynthProblem p = load("max_aux.sl");
    auto conv = to_single_invocation(p);
    c.expect(std::holds_alternative<SynthProblem>(conv), "conversion failed");
    if (!c.ok) return;
    SynthProblem q = std::get<SynthProblem>(conv);
    Term f = mk_apply("f", BaseSort::Int, {X, Y});
    Term want = mk_and(mk_implies(mk_ge(X, Y), mk_eq(f, X)), mk_implies(mk_ge(Y, X), mk_eq(f, Y)));
    c.expect(q.constraint == want, "converted form: " + to_string(q.constraint));
    c.expect(classify(q).kind == ConjectureKind::SingleInvocation, "not single invocation");
    SolveOutput out = solve(p);
    c.expect(out.success && out.converted_to_si, "solve failed: " + out.reason);
    if (!c.ok) return;
    const Term& lam = out.solution.bindings.at("f");
    auto ps = lam.lambda_params();
    oracle::Gen g(2024);
    for (int i = 0; i < 100; ++i) {
      long long a = g.between(-100, 100), b = g.between(-100, 100);
      long long v = oracle::eval(lam.lambda_body(), {{ps[0].name(), a}, {ps[1].name(), b}});
      c.expect(v == std::max(a, b), "disagrees with max at " + std::to_string(a) + "," + std::to_string(b));
    }
  });

  run(4, "portfolio reconstructs into the restricted grammar", 2.0, [](Check& c) {
    SynthProblem p = load("between_grammar.sl");
    SolverConfig cfg;
    cfg.mode = Mode::Portfolio;
    cfg.verify = true;
    SolveOutput out = solve(p, cfg);
    c.expect(out.success, "not solved: " + out.reason);
    if (!c.ok) return;
    c.expect(out.strategy == "cegqi+reconstruction", "strategy: " + out.strategy);
    c.expect(generated_by(*p.functions[0].grammar, body_of(out.solution)), "not generable");
    c.expect(verify_solution(p, out.solution), "does not verify");
  });

  run(5, "enumeration solves the symmetric upper bound", 30.0, [](Check& c) {
    SynthProblem p = load("max_sym_grammar.sl");
    SolverConfig cfg;
    cfg.mode = Mode::Enum;
    SolveOutput out = solve(p, cfg);
    c.expect(out.success, "not solved: " + out.reason);
    if (!c.ok) return;
    c.expect(out.stats.enumerated <= 5000, "enumerated " + std::to_string(out.stats.enumerated));
    c.expect(verify_solution(p, out.solution), "does not verify");
    c.expect(are_equivalent(body_of(out.solution), mk_ite(mk_le(Y, X), X, Y)),
             "not equivalent: " + to_string(body_of(out.solution)));
  });

  run(6, "rewriter pruning keeps one candidate per normal form", 10.0, [](Check& c) {
    Grammar g = default_grammar({X, Y}, BaseSort::Int);
    DatatypeFamily fam = grammar_to_datatypes(g);
    EnumSession s(fam, {.max_size = 4});
    std::set<std::string> retained;
    std::size_t count = 0;
    while (auto v = s.next_admitted()) {
      ++count;
      retained.insert(canonical_key(to_analog(*v)));
    }
    auto all = oracle::expand_grammar(g, g.start, 4);
    std::set<std::string> keys;
    for (const auto& [str, t] : all) keys.insert(canonical_key(t));
    c.expect(count < all.size(), "retained " + std::to_string(count) + " of " + std::to_string(all.size()));
    c.expect(retained.size() == count, "two retained candidates share a key");
    c.expect(retained == keys, "key sets differ: " + std::to_string(retained.size()) + " vs " +
                                   std::to_string(keys.size()));
  });

  run(7, "example signatures prune equivalent conditionals", 5.0, [](Check& c) {
    SynthProblem p = load("io_sum_grammar.sl");
    auto points = input_points(extract_io_examples(p));
    c.expect(points == std::vector<Point>{{1, 0}, {2, 1}, {7, 1}}, "unexpected example inputs");
    DatatypeFamily fam = grammar_to_datatypes(*p.functions[0].grammar);
    auto sig = signature_of(fam, make_value(fam, "I", "x", {}), points);
    c.expect(sig == std::vector<Value>{Integer(1), Integer(2), Integer(7)}, "signature of x");
    EnumOptions o;
    o.max_size = 2;
    o.io_pruning = true;
    o.io_points = points;
    o.trace = true;
    EnumSession s(fam, o);
    while (s.next_admitted()) {
    }
    bool seen = false;
    for (const auto& e : s.trace()) {
      if (e.value != "if(leq(y, x), x, y)") continue;
      seen = true;
      bool by_sig = e.kind == EventKind::PrunedSignature ||
                    (e.kind == EventKind::BlockedByPattern && e.detail.find("signature") != std::string::npos);
      c.expect(by_sig, std::string("handled as ") + event_name(e.kind) + " " + e.detail);
    }
    c.expect(seen, "candidate never drawn");
    c.expect(s.stats().pruned_signature > 0, "no signature pruning recorded");
  });

  run(8, "property suites", 300.0, [](Check& c) {
    c.expect(run_suite("rewriter_test", "Properties.SoundnessOnRandomTerms"), "rewriter soundness");
    c.expect(run_suite("grammar_enum_test", "Properties.EvalCoherence"), "eval coherence");
    c.expect(run_suite("qf_solver_test", "Properties.AgreesWithBruteForce"), "solver vs brute force");
    c.expect(run_suite("grammar_enum_test", "Properties.EncodingComplete"), "encoding completeness");
    c.expect(run_suite("grammar_enum_test", "Properties.PruningSound:Properties.RetainedKeysComplete"),
             "pruning audits");
  });

  return failures;
}
