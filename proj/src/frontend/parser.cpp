#include <cctype>
#include <map>
#include <set>

#include "liasynth/errors.hpp"
#include "liasynth/frontend.hpp"
#include "liasynth/term_ops.hpp"

namespace liasynth {

namespace {

struct SExpr {
  bool atom = false;
  std::string text;
  std::vector<SExpr> items;
  int line = 1, col = 1;

  bool is(const char* s) const { return atom && text == s; }
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    while (true) {
      skip();
      if (pos_ >= s_.size()) return out;
      out.push_back(read());
    }
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SExpr read() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", line_, col_);
    SExpr e;
    e.line = line_;
    e.col = col_;
    char c = s_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    if (c == '(') {
      advance();
      while (true) {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unclosed '('", e.line, e.col);
        if (s_[pos_] == ')') {
          advance();
          return e;
        }
        e.items.push_back(read());
      }
    }
    e.atom = true;
    if (c == '|') {
      advance();
      while (pos_ < s_.size() && s_[pos_] != '|') {
        e.text += s_[pos_];
        advance();
      }
      if (pos_ >= s_.size()) throw ParseError("unclosed '|'", e.line, e.col);
      advance();
      return e;
    }
    while (pos_ < s_.size()) {
      char d = s_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      e.text += d;
      advance();
    }
    return e;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

[[noreturn]] void fail(const SExpr& e, const std::string& msg) {
  throw ParseError(msg, e.line, e.col);
}

bool is_numeral(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

const std::set<std::string> kReserved = {"+", "-", "*", "<=", "<", ">=", ">", "=", "not",
                                         "and", "or", "=>", "ite", "true", "false", "Int",
                                         "Bool", "let", "lambda", "define-fun", "synth-fun",
                                         "declare-var", "constraint", "check-synth", "set-logic"};

std::string symbol(const SExpr& e, const char* what) {
  if (!e.atom) fail(e, std::string("expected ") + what);
  if (e.text.empty() || is_numeral(e.text) || kReserved.count(e.text)) {
    fail(e, std::string("invalid ") + what + " '" + e.text + "'");
  }
  for (char c : e.text) {
    if (c == '#') fail(e, std::string("invalid character '#' in ") + what);
  }
  return e.text;
}

BaseSort parse_sort(const SExpr& e) {
  if (e.is("Int")) return BaseSort::Int;
  if (e.is("Bool")) return BaseSort::Bool;
  fail(e, "expected sort Int or Bool");
}

struct FunInfo {
  BaseSort ret;
  std::vector<BaseSort> params;
};

class TermParser {
 public:
  std::map<std::string, Term> vars;
  std::map<std::string, FunInfo> funs;

  Term parse(const SExpr& e) {
    if (e.atom) return atom(e);
    if (e.items.empty()) fail(e, "empty application");
    const SExpr& head = e.items[0];
    if (!head.atom) fail(head, "expected an operator");
    const std::string& op = head.text;
    std::vector<Term> args;
    for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(parse(e.items[i]));
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi) {
        fail(head, "wrong number of arguments for '" + op + "'");
      }
    };
    auto ints = [&]() {
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].sort() != BaseSort::Int) throw SortError(where(e.items[i + 1]) + "expected Int argument to '" + op + "'");
      }
    };
    auto bools = [&]() {
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].sort() != BaseSort::Bool) throw SortError(where(e.items[i + 1]) + "expected Bool argument to '" + op + "'");
      }
    };
    if (op == "+") {
      need(1, SIZE_MAX);
      ints();
      return mk_add(args);
    }
    if (op == "-") {
      need(1, SIZE_MAX);
      ints();
      if (args.size() == 1) return mk_neg(args[0]);
      Term acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = mk_sub(acc, args[i]);
      return acc;
    }
    if (op == "*") {
      need(2, 2);
      ints();
      if (args[0].is_int_const()) return mk_mul(args[0].value(), args[1]);
      if (args[1].is_int_const()) return mk_mul(args[1].value(), args[0]);
      fail(head, "'*' needs an integer literal operand");
    }
    if (op == "<=" || op == "<" || op == ">=" || op == ">") {
      need(2, 2);
      ints();
      Kind k = op == "<=" ? Kind::Le : op == "<" ? Kind::Lt : op == ">=" ? Kind::Ge : Kind::Gt;
      return mk_cmp(k, args[0], args[1]);
    }
    if (op == "=") {
      need(2, 2);
      if (args[0].sort() != args[1].sort()) throw SortError(where(head) + "'=' on different sorts");
      return mk_eq(args[0], args[1]);
    }
    if (op == "not") {
      need(1, 1);
      bools();
      return mk_not(args[0]);
    }
    if (op == "and" || op == "or") {
      need(1, SIZE_MAX);
      bools();
      return op == "and" ? mk_and(args) : mk_or(args);
    }
    if (op == "=>") {
      need(2, SIZE_MAX);
      bools();
      // Right associative.
      Term acc = args.back();
      for (std::size_t i = args.size() - 1; i-- > 0;) acc = mk_implies(args[i], acc);
      return acc;
    }
    if (op == "ite") {
      need(3, 3);
      if (args[0].sort() != BaseSort::Bool) throw SortError(where(e.items[1]) + "ite condition must be Bool");
      if (args[1].sort() != args[2].sort()) throw SortError(where(head) + "ite branches differ in sort");
      return mk_ite(args[0], args[1], args[2]);
    }
    auto f = funs.find(op);
    if (f != funs.end()) {
      if (args.size() != f->second.params.size()) fail(head, "wrong number of arguments for '" + op + "'");
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].sort() != f->second.params[i]) {
          throw SortError(where(e.items[i + 1]) + "argument sort mismatch for '" + op + "'");
        }
      }
      return mk_apply(op, f->second.ret, args);
    }
    fail(head, "unknown operator '" + op + "'");
  }

  static std::string where(const SExpr& e) {
    return std::to_string(e.line) + ":" + std::to_string(e.col) + ": ";
  }

 private:
  Term atom(const SExpr& e) {
    if (is_numeral(e.text)) return mk_int(Integer(e.text));
    if (e.text == "true") return mk_true();
    if (e.text == "false") return mk_false();
    auto v = vars.find(e.text);
    if (v != vars.end()) return v->second;
    auto f = funs.find(e.text);
    if (f != funs.end() && f->second.params.empty()) return mk_apply(e.text, f->second.ret, {});
    fail(e, "unbound symbol '" + e.text + "'");
  }
};

std::vector<Term> parse_params(const SExpr& e, std::set<std::string>& names) {
  if (e.atom) fail(e, "expected a parameter list");
  std::vector<Term> out;
  for (const auto& p : e.items) {
    if (p.atom || p.items.size() != 2) fail(p, "expected (name Sort)");
    std::string n = symbol(p.items[0], "parameter name");
    if (!names.insert(n).second) fail(p.items[0], "duplicate parameter '" + n + "'");
    out.push_back(mk_var(n, parse_sort(p.items[1])));
  }
  return out;
}

Grammar parse_grammar(const std::vector<const SExpr*>& parts, const std::vector<Term>& params) {
  Grammar g;
  g.params = params;
  const SExpr* decls = nullptr;
  const SExpr* rules = nullptr;
  if (parts.size() == 2) {
    decls = parts[0];
    rules = parts[1];
  } else if (parts.size() == 1) {
    rules = parts[0];
  } else {
    fail(*parts.back(), "malformed grammar");
  }
  std::set<std::string> names;
  for (const auto& p : params) names.insert(p.name());
  auto declare = [&](const SExpr& n, const SExpr& s) {
    std::string name = symbol(n, "nonterminal");
    if (names.count(name)) fail(n, "nonterminal '" + name + "' clashes with a parameter or nonterminal");
    names.insert(name);
    g.nonterminals.push_back({name, parse_sort(s)});
  };
  if (decls) {
    if (decls->atom || decls->items.empty()) fail(*decls, "expected nonterminal declarations");
    for (const auto& d : decls->items) {
      if (d.atom || d.items.size() != 2) fail(d, "expected (NT Sort)");
      declare(d.items[0], d.items[1]);
    }
  }
  if (rules->atom || rules->items.empty()) fail(*rules, "expected grammar rules");
  if (!decls) {
    for (const auto& r : rules->items) {
      if (r.atom || r.items.size() != 3) fail(r, "expected (NT Sort (rules))");
      declare(r.items[0], r.items[1]);
    }
  }
  TermParser tp;
  for (const auto& p : params) tp.vars[p.name()] = p;
  for (const auto& nt : g.nonterminals) tp.vars[nt.name] = mk_var(nt.name, nt.sort);
  for (const auto& r : rules->items) {
    if (r.atom || r.items.size() != 3) fail(r, "expected (NT Sort (rules))");
    std::string lhs = r.items[0].atom ? r.items[0].text : "";
    const NonTerminal* nt = g.find(lhs);
    if (!nt) fail(r.items[0], "undeclared nonterminal '" + lhs + "'");
    if (parse_sort(r.items[1]) != nt->sort) fail(r.items[1], "sort differs from declaration of '" + lhs + "'");
    if (r.items[2].atom) fail(r.items[2], "expected a list of productions");
    for (const auto& rhs : r.items[2].items) {
      Term t = tp.parse(rhs);
      if (t.sort() != nt->sort) throw SortError(TermParser::where(rhs) + "production sort differs from '" + lhs + "'");
      g.rules.push_back({lhs, t});
    }
  }
  if (g.nonterminals.empty()) fail(*rules, "grammar without nonterminals");
  g.start = g.nonterminals[0].name;
  return g;
}

}  // namespace

SynthProblem parse_problem(const std::string& text) {
  std::vector<SExpr> cmds = Reader(text).read_all();
  SynthProblem p;
  TermParser tp;
  std::set<std::string> globals;
  std::vector<Term> constraints;
  bool checked = false;
  for (const auto& c : cmds) {
    if (c.atom || c.items.empty() || !c.items[0].atom) fail(c, "expected a command");
    if (checked) fail(c, "command after (check-synth)");
    const std::string& cmd = c.items[0].text;
    if (cmd == "set-logic") {
      if (c.items.size() != 2 || !c.items[1].atom) fail(c, "malformed set-logic");
      if (c.items[1].text != "LIA") fail(c.items[1], "unsupported logic '" + c.items[1].text + "'");
    } else if (cmd == "synth-fun") {
      if (c.items.size() < 4) fail(c, "malformed synth-fun");
      SynthFun f;
      f.name = symbol(c.items[1], "function name");
      if (!globals.insert(f.name).second) fail(c.items[1], "duplicate symbol '" + f.name + "'");
      std::set<std::string> pnames;
      f.params = parse_params(c.items[2], pnames);
      f.ret = parse_sort(c.items[3]);
      if (c.items.size() > 4) {
        std::vector<const SExpr*> parts;
        for (std::size_t i = 4; i < c.items.size(); ++i) parts.push_back(&c.items[i]);
        f.grammar = parse_grammar(parts, f.params);
        if (f.grammar->start_sort() != f.ret) {
          throw GrammarError(TermParser::where(c.items[4]) + "start symbol sort of " + f.name +
                             " differs from its return sort");
        }
        f.grammar->validate();
      }
      FunInfo info{f.ret, {}};
      for (const auto& x : f.params) info.params.push_back(x.sort());
      tp.funs[f.name] = info;
      p.functions.push_back(std::move(f));
    } else if (cmd == "declare-var") {
      if (c.items.size() != 3) fail(c, "malformed declare-var");
      std::string n = symbol(c.items[1], "variable name");
      if (!globals.insert(n).second) fail(c.items[1], "duplicate symbol '" + n + "'");
      Term v = mk_var(n, parse_sort(c.items[2]));
      tp.vars[n] = v;
      p.universals.push_back(v);
    } else if (cmd == "constraint") {
      if (c.items.size() != 2) fail(c, "malformed constraint");
      Term t = tp.parse(c.items[1]);
      if (t.sort() != BaseSort::Bool) throw SortError(TermParser::where(c.items[1]) + "constraint must be Bool");
      constraints.push_back(t);
    } else if (cmd == "check-synth") {
      checked = true;
    } else {
      fail(c.items[0], "unknown command '" + cmd + "'");
    }
  }
  int last_line = cmds.empty() ? 1 : cmds.back().line;
  if (!checked) throw ParseError("missing (check-synth)", last_line, 1);
  if (p.functions.empty()) throw ParseError("no synth-fun declared", last_line, 1);
  if (constraints.empty()) throw ParseError("no constraint given", last_line, 1);
  p.constraint = mk_and(constraints);
  p.validate();
  return p;
}

Term parse_term(const std::string& text, const std::vector<Term>& vars) {
  auto es = Reader(text).read_all();
  if (es.size() != 1) throw ParseError("expected exactly one term", 1, 1);
  TermParser tp;
  for (const auto& v : vars) tp.vars[v.name()] = v;
  return tp.parse(es[0]);
}

std::pair<std::string, Term> parse_define_fun(const std::string& text) {
  auto es = Reader(text).read_all();
  if (es.size() != 1) throw ParseError("expected exactly one define-fun", 1, 1);
  const SExpr& e = es[0];
  if (e.atom || e.items.size() != 5 || !e.items[0].is("define-fun")) fail(e, "malformed define-fun");
  std::string name = symbol(e.items[1], "function name");
  std::set<std::string> pnames;
  auto params = parse_params(e.items[2], pnames);
  BaseSort ret = parse_sort(e.items[3]);
  TermParser tp;
  for (const auto& v : params) tp.vars[v.name()] = v;
  Term body = tp.parse(e.items[4]);
  if (body.sort() != ret) throw SortError(TermParser::where(e.items[4]) + "body sort differs from declared sort");
  return {name, mk_lambda(params, body)};
}

}  // namespace liasynth
