// Bounded general simplex over exact rationals with Bland's pivoting rule,
// plus depth-first branch and bound for integrality.

#include <algorithm>
#include <map>
#include <optional>

#include "liasynth/errors.hpp"
#include "liasynth/qf_solver.hpp"

namespace liasynth {

Limits Limits::with_timeout(double seconds) {
  Limits l;
  l.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(seconds));
  return l;
}

void Limits::check() const {
  if (expired()) throw ResourceLimit("time budget exhausted");
}

namespace {

class Simplex {
 public:
  explicit Simplex(int n) { grow(n); }

  int num_vars() const { return static_cast<int>(val_.size()); }

  // New basic variable s = sum coeffs.
  int add_row(const std::vector<std::pair<int, Integer>>& coeffs) {
    int s = num_vars();
    grow(s + 1);
    std::map<int, Rational> row;
    Rational v = 0;
    for (const auto& [x, a] : coeffs) {
      Rational ra(a);
      if (row_of_[x] >= 0) {
        // Expand a basic variable through its row.
        for (const auto& [y, b] : rows_[row_of_[x]]) add_to(row, y, ra * b);
      } else {
        add_to(row, x, ra);
      }
      v += ra * val_[x];
    }
    row_of_[s] = static_cast<int>(rows_.size());
    rows_.push_back(std::move(row));
    basic_.push_back(s);
    val_[s] = v;
    return s;
  }

  void set_upper(int x, const Rational& b) {
    if (hi_[x] && *hi_[x] <= b) return;
    hi_[x] = b;
    if (row_of_[x] < 0 && val_[x] > b) update(x, b);
  }

  void set_lower(int x, const Rational& b) {
    if (lo_[x] && *lo_[x] >= b) return;
    lo_[x] = b;
    if (row_of_[x] < 0 && val_[x] < b) update(x, b);
  }

  struct Bounds {
    std::vector<std::optional<Rational>> lo, hi;
  };
  Bounds save() const { return {lo_, hi_}; }
  void restore(const Bounds& b) {
    lo_ = b.lo;
    hi_ = b.hi;
    // Non-basic values must sit within their bounds again.
    for (int x = 0; x < num_vars(); ++x) {
      if (row_of_[x] >= 0) continue;
      if (lo_[x] && val_[x] < *lo_[x]) update(x, *lo_[x]);
      if (hi_[x] && val_[x] > *hi_[x]) update(x, *hi_[x]);
    }
  }

  const Rational& value(int x) const { return val_[x]; }

  bool check(const Limits& limits) {
    for (int v = 0; v < num_vars(); ++v) {
      if (lo_[v] && hi_[v] && *lo_[v] > *hi_[v]) return false;
    }
    for (std::uint64_t iter = 0;; ++iter) {
      if ((iter & 255) == 255) limits.check();
      int xi = -1;
      for (int v = 0; v < num_vars(); ++v) {
        if (row_of_[v] < 0) continue;
        if ((lo_[v] && val_[v] < *lo_[v]) || (hi_[v] && val_[v] > *hi_[v])) {
          xi = v;
          break;
        }
      }
      if (xi < 0) return true;
      const auto& row = rows_[row_of_[xi]];
      bool below = lo_[xi] && val_[xi] < *lo_[xi];
      int xj = -1;
      for (const auto& [y, a] : row) {  // map order gives Bland's smallest index
        bool can_inc = !hi_[y] || val_[y] < *hi_[y];
        bool can_dec = !lo_[y] || val_[y] > *lo_[y];
        bool ok = below ? ((a > 0 && can_inc) || (a < 0 && can_dec))
                        : ((a < 0 && can_inc) || (a > 0 && can_dec));
        if (ok) {
          xj = y;
          break;
        }
      }
      if (xj < 0) return false;
      pivot_and_update(xi, xj, below ? *lo_[xi] : *hi_[xi]);
    }
  }

 private:
  static void add_to(std::map<int, Rational>& row, int x, const Rational& a) {
    if (a == 0) return;
    auto it = row.find(x);
    if (it == row.end()) {
      row.emplace(x, a);
    } else {
      it->second += a;
      if (it->second == 0) row.erase(it);
    }
  }

  void grow(int n) {
    val_.resize(n, Rational(0));
    lo_.resize(n);
    hi_.resize(n);
    row_of_.resize(n, -1);
  }

  // Moves non-basic x to value v and updates the basic variables.
  void update(int x, const Rational& v) {
    Rational delta = v - val_[x];
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      auto it = rows_[r].find(x);
      if (it != rows_[r].end()) val_[basic_[r]] += it->second * delta;
    }
    val_[x] = v;
  }

  void pivot_and_update(int xi, int xj, const Rational& v) {
    int ri = row_of_[xi];
    Rational aij = rows_[ri].at(xj);
    Rational theta = (v - val_[xi]) / aij;
    val_[xi] = v;
    val_[xj] += theta;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (static_cast<int>(r) == ri) continue;
      auto it = rows_[r].find(xj);
      if (it != rows_[r].end()) val_[basic_[r]] += it->second * theta;
    }
    // xi = aij*xj + rest  =>  xj = (xi - rest) / aij
    std::map<int, Rational> nrow;
    for (const auto& [y, a] : rows_[ri]) {
      if (y == xj) continue;
      nrow.emplace(y, -a / aij);
    }
    nrow.emplace(xi, Rational(1) / aij);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (static_cast<int>(r) == ri) continue;
      auto it = rows_[r].find(xj);
      if (it == rows_[r].end()) continue;
      Rational c = it->second;
      rows_[r].erase(it);
      for (const auto& [y, a] : nrow) add_to(rows_[r], y, c * a);
    }
    rows_[ri] = std::move(nrow);
    basic_[ri] = xj;
    row_of_[xj] = ri;
    row_of_[xi] = -1;
  }

  std::vector<Rational> val_;
  std::vector<std::optional<Rational>> lo_, hi_;
  std::vector<int> row_of_;
  std::vector<int> basic_;
  std::vector<std::map<int, Rational>> rows_;
};

// Depth-first branch and bound, iterative so that deep searches end at the
// node cap rather than on the call stack.
class BranchAndBound {
 public:
  BranchAndBound(Simplex& s, int n, const Limits& limits)
      : s_(s), n_(n), limits_(limits) {}

  bool run() {
    struct Frame {
      Simplex::Bounds saved;
      int x;
      Integer fl;
      bool second;
    };
    std::vector<Frame> stack;
    for (;;) {
      if (++nodes_ > limits_.max_bb_nodes) {
        throw ResourceLimit("branch and bound node cap exceeded");
      }
      if ((nodes_ & 63) == 0) limits_.check();
      bool feasible = s_.check(limits_);
      if (feasible) {
        int x = fractional();
        if (x < 0) return true;
        Integer fl = floor_rat(s_.value(x));
        stack.push_back({s_.save(), x, fl, false});
        s_.set_upper(x, Rational(fl));
        continue;
      }
      while (!stack.empty() && stack.back().second) {
        s_.restore(stack.back().saved);
        stack.pop_back();
      }
      if (stack.empty()) return false;
      Frame& f = stack.back();
      s_.restore(f.saved);
      f.second = true;
      s_.set_lower(f.x, Rational(f.fl + 1));
    }
  }

 private:
  int fractional() const {
    for (int x = 0; x < n_; ++x) {
      if (!is_integral(s_.value(x))) return x;
    }
    return -1;
  }

  Simplex& s_;
  int n_;
  const Limits& limits_;
  std::uint64_t nodes_ = 0;
};

// sum c[x] * x + k
struct Lin {
  std::map<int, Integer> c;
  Integer k = 0;

  void add(const Lin& o, const Integer& scale) {
    for (const auto& [x, a] : o.c) {
      Integer& v = c[x];
      v += scale * a;
      if (v == 0) c.erase(x);
    }
    k += scale * o.k;
  }

  // Replaces x by e.
  void subst(int x, const Lin& e) {
    auto it = c.find(x);
    if (it == c.end()) return;
    Integer a = it->second;
    c.erase(it);
    add(e, a);
  }

  Integer gcd() const {
    Integer g = 0;
    for (const auto& [x, a] : c) g = gcd_int(g, a);
    return g;
  }
};

// Integer elimination of equalities. Each step either solves a unit
// coefficient or introduces t with x = t - sum q_i y_i, shrinking the other
// coefficients below |a_x| as in Euclid's algorithm.
class EqualitySolver {
 public:
  explicit EqualitySolver(int n) : next_(n) {}

  // False if the equalities have no integer solution.
  bool solve(std::vector<Lin> eqs, std::vector<Lin>& ineqs) {
    while (!eqs.empty()) {
      Lin e = std::move(eqs.back());
      eqs.pop_back();
      Integer g = e.gcd();
      if (g == 0) {
        if (e.k != 0) return false;
        continue;
      }
      if (e.k % g != 0) return false;
      for (auto& [x, a] : e.c) a /= g;
      e.k /= g;
      int xk = -1;
      Integer best;
      for (const auto& [x, a] : e.c) {
        if (xk < 0 || abs_int(a) < best) {
          xk = x;
          best = abs_int(a);
        }
      }
      Integer ak = e.c.at(xk);
      Lin def;
      if (best == 1) {
        // ak * xk + rest = 0  =>  xk = -ak * rest
        for (const auto& [x, a] : e.c) {
          if (x != xk) def.c[x] = -ak * a;
        }
        def.k = -ak * e.k;
      } else {
        int t = next_++;
        def.c[t] = 1;
        for (const auto& [x, a] : e.c) {
          if (x == xk) continue;
          Integer q = floor_div(a, ak);
          if (q != 0) def.c[x] = -q;
        }
        e.subst(xk, def);
        eqs.push_back(std::move(e));
      }
      for (auto& o : eqs) o.subst(xk, def);
      for (auto& o : ineqs) o.subst(xk, def);
      defs_.emplace_back(xk, std::move(def));
    }
    return true;
  }

  int num_vars() const { return next_; }

  void complete(std::vector<Integer>& vals) const {
    vals.resize(next_, Integer(0));
    for (auto it = defs_.rbegin(); it != defs_.rend(); ++it) {
      Integer v = it->second.k;
      for (const auto& [x, a] : it->second.c) v += a * vals[x];
      vals[it->first] = v;
    }
  }

 private:
  int next_;
  std::vector<std::pair<int, Lin>> defs_;
};

// Tightened form: coefficients divided by their gcd, constant rounded.
bool tighten(Lin& l) {
  Integer g = l.gcd();
  if (g == 0) return l.k <= 0;
  for (auto& [x, a] : l.c) a /= g;
  l.k = -floor_div(-l.k, g);
  return true;
}

}  // namespace

std::optional<std::vector<Integer>> solve_ilp(int num_vars,
                                              const std::vector<LinearConstraint>& cs,
                                              const Limits& limits) {
  std::vector<Lin> ineqs;
  for (const auto& c : cs) {
    Lin l;
    for (const auto& [x, a] : c.coeffs) {
      Integer& v = l.c[x];
      v += a;
      if (v == 0) l.c.erase(x);
    }
    l.k = c.constant;
    if (!tighten(l)) return std::nullopt;
    if (!l.c.empty()) ineqs.push_back(std::move(l));
  }
  // a.x + k <= 0 together with -a.x + k' <= 0 and k' = -k is an equality.
  std::vector<Lin> eqs;
  std::vector<bool> used(ineqs.size(), false);
  for (std::size_t i = 0; i < ineqs.size(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < ineqs.size(); ++j) {
      if (used[j] || ineqs[j].c.size() != ineqs[i].c.size()) continue;
      bool opposite = std::all_of(ineqs[i].c.begin(), ineqs[i].c.end(), [&](const auto& m) {
        auto it = ineqs[j].c.find(m.first);
        return it != ineqs[j].c.end() && it->second == -m.second;
      });
      if (!opposite) continue;
      if (ineqs[i].k + ineqs[j].k > 0) return std::nullopt;
      if (ineqs[i].k + ineqs[j].k == 0) {
        used[i] = used[j] = true;
        eqs.push_back(ineqs[i]);
        break;
      }
    }
  }
  std::vector<Lin> rest;
  for (std::size_t i = 0; i < ineqs.size(); ++i) {
    if (!used[i]) rest.push_back(std::move(ineqs[i]));
  }
  EqualitySolver eq(num_vars);
  if (!eq.solve(std::move(eqs), rest)) return std::nullopt;
  int n = eq.num_vars();

  Simplex s(n);
  Integer amax = 1;
  std::size_t m = 0;
  for (auto& l : rest) {
    if (!tighten(l)) return std::nullopt;
    if (l.c.empty()) continue;
    ++m;
    Integer bound = -l.k;
    amax = std::max(amax, abs_int(bound));
    std::vector<std::pair<int, Integer>> coeffs(l.c.begin(), l.c.end());
    for (const auto& [x, a] : coeffs) amax = std::max(amax, abs_int(a));
    if (coeffs.size() == 1) {
      const auto& [x, a] = coeffs[0];
      if (a > 0) {
        s.set_upper(x, Rational(floor_div(bound, a)));
      } else {
        s.set_lower(x, Rational(ceil_div(bound, a)));
      }
      continue;
    }
    int slack = s.add_row(coeffs);
    s.set_upper(slack, Rational(bound));
  }
  // A feasible system has a solution within this box. Depth-first search
  // over an unbounded region can run away, so smaller boxes come first; only
  // the last one decides infeasibility.
  m = std::max<std::size_t>(m, 1);
  Integer box = Integer(n) * boost::multiprecision::pow(Integer(m) * amax, static_cast<unsigned>(2 * m + 1));
  std::vector<Integer> boxes;
  for (Integer b = 16; b < box; b *= b) boxes.push_back(b);
  boxes.push_back(box);
  BranchAndBound bb(s, n, limits);
  auto base = s.save();
  bool found = false;
  for (const auto& b : boxes) {
    s.restore(base);
    for (int x = 0; x < n; ++x) {
      s.set_upper(x, Rational(b));
      s.set_lower(x, Rational(-b));
    }
    if (bb.run()) {
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;
  std::vector<Integer> out;
  for (int x = 0; x < n; ++x) out.push_back(floor_rat(s.value(x)));
  eq.complete(out);
  out.resize(num_vars);
  return out;
}

}  // namespace liasynth
