#include <chrono>
#include <sstream>

#include "liasynth/cegqi.hpp"
#include "liasynth/datatypes.hpp"
#include "liasynth/enumerate.hpp"
#include "liasynth/errors.hpp"
#include "liasynth/frontend.hpp"
#include "liasynth/qf_solver.hpp"

namespace liasynth {

std::string print_define_fun(const std::string& name, const Term& lambda) {
  std::ostringstream os;
  os << "(define-fun " << name << " (";
  auto params = lambda.lambda_params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) os << " ";
    os << "(" << params[i].name() << " " << sort_name(params[i].sort()) << ")";
  }
  os << ") " << sort_name(lambda.lambda_body().sort()) << " " << lambda.lambda_body() << ")";
  return os.str();
}

std::string print_solution(const Solution& s) {
  std::string out;
  for (const auto& [name, lam] : s.bindings) out += print_define_fun(name, lam) + "\n";
  return out;
}

bool verify_solution(const SynthProblem& p, const Solution& s, const Limits& limits) {
  for (const auto& f : p.functions) {
    auto it = s.bindings.find(f.name);
    if (it == s.bindings.end()) return false;
    if (!f.grammar) continue;
    // Grammars are stated over the declared parameter names.
    const Term& lam = it->second;
    auto params = lam.lambda_params();
    if (params.size() != f.grammar->params.size()) return false;
    Substitution rename;
    for (std::size_t i = 0; i < params.size(); ++i) {
      rename.emplace(params[i].name(), f.grammar->params[i]);
    }
    if (!generated_by(*f.grammar, substitute(lam.lambda_body(), rename))) return false;
  }
  try {
    return check_valid(apply_solution(p, s), limits);
  } catch (const SolutionError&) {
    return false;
  }
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Auto: return "auto";
    case Mode::Cegqi: return "cegqi";
    case Mode::Enum: return "enum";
    case Mode::Portfolio: return "portfolio";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::Auto, Mode::Cegqi, Mode::Enum, Mode::Portfolio}) {
    if (s == mode_name(m)) return m;
  }
  return std::nullopt;
}

namespace {

class Solver {
 public:
  Solver(const SynthProblem& p, const SolverConfig& cfg) : orig_(p), p_(p), cfg_(cfg) {
    if (cfg.timeout) limits_ = Limits::with_timeout(*cfg.timeout);
  }

  SolveOutput run() {
    auto t0 = Clock::now();
    try {
      prepare();
      dispatch();
    } catch (const ResourceLimit& e) {
      give_up(std::string("resource limit: ") + e.what());
    }
    if (out_.success && cfg_.verify) {
      try {
        if (!verify_solution(orig_, out_.solution, limits_)) give_up("verification failed");
      } catch (const ResourceLimit& e) {
        give_up(std::string("verification hit a resource limit: ") + e.what());
      }
    }
    out_.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return std::move(out_);
  }

 private:
  void prepare() {
    cls_ = classify(p_);
    if (cls_.kind == ConjectureKind::NonSingleInvocation) {
      auto r = to_single_invocation(p_);
      if (auto* q = std::get_if<SynthProblem>(&r)) {
        p_ = *q;
        cls_ = classify(p_);
        out_.converted_to_si = cls_.kind != ConjectureKind::NonSingleInvocation;
        note("converted to single invocation: " + to_string(p_.constraint));
      } else {
        note("not single invocation: " + std::get<Failure>(r).reason);
      }
    }
    out_.kind = cls_.kind;
    note(std::string("class ") + conjecture_kind_name(cls_.kind));
  }

  void dispatch() {
    bool si = cls_.kind != ConjectureKind::NonSingleInvocation;
    bool io = cls_.kind == ConjectureKind::IOExamples;
    bool grammar = p_.has_grammar();
    switch (cfg_.mode) {
      case Mode::Cegqi:
        if (!si) return give_up("conjecture is not single invocation");
        if (cegqi()) return;
        return;
      case Mode::Enum:
        enumerate(io);
        return;
      case Mode::Portfolio:
        if (!si) {
          enumerate(io);
          return;
        }
        portfolio(io);
        return;
      case Mode::Auto:
        break;
    }
    if (io && grammar) return enumerate(true);
    if (si && !grammar) {
      cegqi();
      return;
    }
    if (si && grammar) return portfolio(io);
    enumerate(false);
  }

  bool cegqi() {
    CegqiResult r = solve_cegqi(p_, cfg_.max_iters, limits_);
    out_.stats.cegqi_iterations = r.iterations;
    for (std::size_t i = 0; i < r.trace.instances.size(); ++i) {
      std::string line = "instance " + std::to_string(i + 1) + ":";
      for (const auto& t : r.trace.instances[i]) line += " " + to_string(t);
      note(line);
    }
    if (!r.solved) {
      give_up("cegqi: " + r.reason);
      return false;
    }
    succeed(*r.solution, "cegqi");
    return true;
  }

  void portfolio(bool io) {
    CegqiResult r;
    try {
      r = solve_cegqi(p_, cfg_.max_iters, limits_);
    } catch (const ResourceLimit& e) {
      r.reason = e.what();
    }
    out_.stats.cegqi_iterations = r.iterations;
    if (r.solved) {
      if (!p_.has_grammar()) return succeed(*r.solution, "cegqi");
      note("cegqi solution: " + print_solution(*r.solution));
      Limits rl = limits_;
      if (cfg_.timeout) {
        rl = Limits::with_timeout(*cfg_.timeout * cfg_.recon_share);
        if (limits_.deadline && *rl.deadline > *limits_.deadline) rl.deadline = limits_.deadline;
      }
      try {
        auto rec = reconstruct(*r.solution, p_, cfg_.recon_budget, rl);
        if (auto* s = std::get_if<Solution>(&rec)) return succeed(*s, "cegqi+reconstruction");
        note("reconstruction failed: " + std::get<Failure>(rec).reason);
      } catch (const ResourceLimit&) {
        note("reconstruction ran out of time");
      }
    } else {
      note("cegqi gave up: " + r.reason);
    }
    enumerate(io);
  }

  void enumerate(bool io) {
    if (p_.functions.size() != 1) return give_up("enumeration handles a single function to synthesize");
    const SynthFun& f = p_.functions[0];
    Grammar g = f.grammar ? *f.grammar : default_grammar(f.params, f.ret);
    DatatypeFamily fam = grammar_to_datatypes(g);
    EnumOptions opts;
    opts.max_size = cfg_.max_size;
    opts.rewriter_pruning = cfg_.rewriter_pruning;
    opts.io_pruning = io && cfg_.io_pruning;
    opts.trace = cfg_.trace;
    opts.limits = limits_;
    if (opts.io_pruning) {
      for (const auto& pt : input_points(extract_io_examples(p_))) opts.io_points.push_back(pt);
    }
    EnumResult r = solve_enum(p_, fam, opts);
    auto& st = out_.stats;
    st.enumerated = r.stats.enumerated;
    st.retained = r.stats.retained;
    st.pruned_rewriter = r.stats.pruned_rewriter;
    st.pruned_signature = r.stats.pruned_signature;
    st.blocked_exact = r.stats.blocked_exact;
    st.blocked_by_pattern = r.stats.blocked_by_pattern;
    st.patterns = r.stats.patterns;
    st.cex_points = r.stats.cex_points;
    for (const auto& e : r.trace) {
      std::string line = std::string(event_name(e.kind)) + " " + e.value + " = " + e.analog;
      if (!e.detail.empty()) line += " [" + e.detail + "]";
      note(line);
    }
    if (!r.solution) return give_up("enum: " + r.reason);
    succeed(*r.solution, opts.io_pruning ? "enum+io" : "enum");
  }

  void succeed(Solution s, const std::string& strategy) {
    out_.success = true;
    out_.solution = std::move(s);
    out_.strategy = strategy;
    out_.reason.clear();
  }

  void give_up(const std::string& reason) {
    out_.success = false;
    out_.solution = {};
    out_.reason = reason;
  }

  void note(const std::string& line) {
    if (cfg_.trace) out_.trace.push_back(line);
  }

  const SynthProblem& orig_;
  SynthProblem p_;
  SolverConfig cfg_;
  Limits limits_;
  ConjectureClass cls_;
  SolveOutput out_;
};

}  // namespace

SolveOutput solve(const SynthProblem& p, const SolverConfig& cfg) { return Solver(p, cfg).run(); }

std::string format_stats(const SolveOutput& out) {
  std::ostringstream os;
  const auto& s = out.stats;
  os << "result=" << (out.success ? "success" : "gave-up") << "\n";
  os << "class=" << conjecture_kind_name(out.kind) << "\n";
  if (out.success) os << "strategy=" << out.strategy << "\n";
  os << "enumerated=" << s.enumerated << "\n";
  os << "retained=" << s.retained << "\n";
  os << "pruned_rewriter=" << s.pruned_rewriter << "\n";
  os << "pruned_signature=" << s.pruned_signature << "\n";
  os << "blocked_exact=" << s.blocked_exact << "\n";
  os << "blocked_by_pattern=" << s.blocked_by_pattern << "\n";
  os << "patterns=" << s.patterns << "\n";
  os << "cegqi_iterations=" << s.cegqi_iterations << "\n";
  os << "cex_points=" << s.cex_points << "\n";
  os << "wall_seconds=" << s.wall_seconds << "\n";
  return os.str();
}

}  // namespace liasynth
