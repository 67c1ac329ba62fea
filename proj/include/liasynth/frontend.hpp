#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liasynth/classifier.hpp"
#include "liasynth/limits.hpp"
#include "liasynth/problem.hpp"

namespace liasynth {

/// Parses the problem format:
///   (set-logic LIA)
///   (synth-fun f ((x Int) ...) Int [((NT Sort)+) ((NT Sort (rule+))+)])
///   (declare-var x Int)
///   (constraint t)
///   (check-synth)
/// Throws ParseError (with line and column), SortError or GrammarError.
SynthProblem parse_problem(const std::string& text);

/// Parses a standalone term over the given variables. Applications of
/// functions are not allowed.
Term parse_term(const std::string& text, const std::vector<Term>& vars);

/// Parses one (define-fun name ((x S) ...) S body); returns name and lambda.
std::pair<std::string, Term> parse_define_fun(const std::string& text);

/// One define-fun per binding, in name order. Bodies are printed as stored.
std::string print_solution(const Solution& s);
std::string print_define_fun(const std::string& name, const Term& lambda);

/// Valid constraint and, where a grammar is given, a generable body.
bool verify_solution(const SynthProblem& p, const Solution& s, const Limits& limits = {});

enum class Mode { Auto, Cegqi, Enum, Portfolio };
const char* mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

struct SolverConfig {
  Mode mode = Mode::Auto;
  std::size_t max_size = 8;
  std::size_t max_iters = 64;
  std::size_t recon_budget = 3;  // largest grammar term size searched
  bool io_pruning = true;
  bool rewriter_pruning = true;
  std::optional<double> timeout;  // seconds
  double recon_share = 0.2;       // of the timeout, for reconstruction
  bool verify = false;
  bool trace = false;
};

struct SolveStats {
  std::size_t enumerated = 0;
  std::size_t retained = 0;
  std::size_t pruned_rewriter = 0;
  std::size_t pruned_signature = 0;
  std::size_t blocked_exact = 0;
  std::size_t blocked_by_pattern = 0;
  std::size_t patterns = 0;
  std::size_t cegqi_iterations = 0;
  std::size_t cex_points = 0;
  double wall_seconds = 0;
};

struct SolveOutput {
  bool success = false;
  Solution solution;
  /// cegqi | cegqi+reconstruction | enum | enum+io
  std::string strategy;
  std::string reason;  // on failure
  ConjectureKind kind = ConjectureKind::NonSingleInvocation;
  bool converted_to_si = false;
  SolveStats stats;
  std::vector<std::string> trace;
};

SolveOutput solve(const SynthProblem& p, const SolverConfig& cfg = {});

/// key=value lines.
std::string format_stats(const SolveOutput& out);

}  // namespace liasynth
