// Command-line driver: reads a problem file, prints define-funs or (fail ...).
// Exit codes: 0 solved, 1 gave up, 2 input error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "liasynth/errors.hpp"
#include "liasynth/frontend.hpp"

int main(int argc, char** argv) {
  using namespace liasynth;
  CLI::App app{"Synthesizes linear integer functions from logical specifications"};
  std::string file;
  std::string mode = "auto";
  SolverConfig cfg;
  double timeout = 0;
  bool no_rewriter = false, no_examples = false, stats = false;
  app.add_option("problem", file, "problem file, or - for standard input")->required();
  app.add_option("--mode", mode, "auto, cegqi, enum or portfolio")
      ->check(CLI::IsMember({"auto", "cegqi", "enum", "portfolio"}));
  app.add_option("--max-size", cfg.max_size, "enumeration size cap")->check(CLI::PositiveNumber);
  app.add_option("--max-iters", cfg.max_iters, "instantiation iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--recon-budget", cfg.recon_budget, "largest term size searched by reconstruction")
      ->check(CLI::PositiveNumber);
  app.add_option("--timeout", timeout, "time budget in seconds")->check(CLI::PositiveNumber);
  app.add_flag("--no-sb-rewriter", no_rewriter, "disable rewriter-based pruning");
  app.add_flag("--no-sb-examples", no_examples, "disable example-signature pruning");
  app.add_flag("--verify", cfg.verify, "check the solution independently before printing");
  app.add_flag("--stats", stats, "print statistics to standard error");
  app.add_flag("--trace", cfg.trace, "print the solving trace to standard error");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  cfg.mode = *parse_mode(mode);
  cfg.rewriter_pruning = !no_rewriter;
  cfg.io_pruning = !no_examples;
  if (timeout > 0) cfg.timeout = timeout;

  std::string text;
  if (file == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(file);
    if (!in) {
      std::cerr << "error: cannot open " << file << "\n";
      return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  SynthProblem p;
  try {
    p = parse_problem(text);
  } catch (const SynthError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return 2;
  }

  SolveOutput out;
  try {
    out = solve(p, cfg);
  } catch (const SynthError& e) {
    out.success = false;
    out.reason = e.what();
  }
  for (const auto& line : out.trace) std::cerr << line << "\n";
  if (out.success) {
    std::cout << print_solution(out.solution);
  } else {
    std::cout << "(fail " << out.reason << ")\n";
  }
  if (stats) std::cerr << format_stats(out);
  return out.success ? 0 : 1;
}
