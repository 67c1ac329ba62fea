#include <algorithm>
#include <unordered_map>

#include "levels.hpp"
#include "liasynth/enumerate.hpp"
#include "liasynth/errors.hpp"
#include "liasynth/qf_solver.hpp"
#include "pattern_tree.hpp"

namespace liasynth {

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::Retained: return "retained";
    case EventKind::PrunedRewriter: return "pruned-rewriter";
    case EventKind::PrunedSignature: return "pruned-signature";
    case EventKind::BlockedByPattern: return "blocked";
    case EventKind::Refuted: return "refuted";
    case EventKind::Solved: return "solved";
  }
  return "?";
}

struct EnumSession::Impl {
  struct Table {
    std::vector<DtValue> raw;
    std::vector<DtValue> filtered;
    std::size_t watermark = 0;
  };
  struct Memo {
    std::size_t checked = 0;
    long blocked = -1;
  };

  DatatypeFamily fam;
  EnumOptions opts;
  EnumStats stats;
  std::vector<TraceEvent> trace;
  CandidateDb db;

  std::vector<detail::PatTree> trees;
  std::vector<BlockingPattern> patterns;
  std::vector<JustificationKind> kinds;
  detail::PatternIndex index;

  std::map<std::pair<int, std::size_t>, Table> tables;
  std::unordered_map<std::uint64_t, Memo> memo;

  bool started = false;
  std::size_t root_size = 0;
  std::vector<DtValue> snapshot;
  std::size_t root_pos = 0;

  std::vector<PrunedValue> pruned;
  std::vector<BlockedValue> blocked;
  std::vector<DtValue> drawn;

  Impl(DatatypeFamily f, EnumOptions o) : fam(std::move(f)), opts(std::move(o)) {
    if (opts.rewriter_pruning && opts.eager_seeds) {
      for (auto& t : detail::seed_trees(fam)) add_pattern(std::move(t), JustificationKind::Seed);
    }
  }

  std::size_t add_pattern(detail::PatTree t, JustificationKind k) {
    std::size_t id = trees.size();
    index.add(t, id);
    patterns.push_back(detail::to_pattern(fam, t));
    kinds.push_back(k);
    trees.push_back(std::move(t));
    stats.patterns = trees.size();
    return id;
  }

  // Pattern blocking n at some position, or -1.
  long blocked_by(const DtNode& n) {
    Memo& m = memo[n.id];
    if (m.blocked >= 0 || m.checked == trees.size()) return m.blocked;
    long hit = index.first_match(n, m.checked);
    if (hit >= 0) {
      m.blocked = hit;
      return hit;
    }
    for (const auto& c : n.children) {
      long b = blocked_by(*c);
      if (b >= 0) {
        m.blocked = b;
        return b;
      }
    }
    m.checked = trees.size();
    return -1;
  }

  void refilter(Table& t) {
    if (t.watermark == trees.size()) return;
    std::vector<DtValue> keep;
    keep.reserve(t.filtered.size());
    for (auto& v : t.filtered) {
      if (blocked_by(*v) < 0) keep.push_back(std::move(v));
    }
    t.filtered = std::move(keep);
    t.watermark = trees.size();
  }

  const std::vector<DtValue>& level(int dt, std::size_t size) {
    auto key = std::make_pair(dt, size);
    auto it = tables.find(key);
    if (it == tables.end()) {
      detail::LevelLookup lookup = [this](int d, std::size_t s) -> const std::vector<DtValue>& {
        return level(d, s);
      };
      Table t;
      t.raw = detail::build_level(fam, dt, size, lookup);
      t.filtered = t.raw;
      it = tables.emplace(key, std::move(t)).first;
    }
    refilter(it->second);
    return it->second.filtered;
  }

  std::optional<DtValue> draw() {
    while (true) {
      if (root_pos >= snapshot.size()) {
        if (started && root_size >= opts.max_size) return std::nullopt;
        root_size = started ? root_size + 1 : 0;
        started = true;
        level(fam.start, root_size);
        snapshot = tables.at({fam.start, root_size}).raw;
        root_pos = 0;
        continue;
      }
      if ((root_pos & 63) == 0) opts.limits.check();
      DtValue v = snapshot[root_pos++];
      long b = blocked_by(*v);
      if (b < 0) return v;
      ++stats.blocked_by_pattern;
      if (opts.audit) blocked.push_back({v, static_cast<std::size_t>(b)});
      if (opts.trace) {
        trace.push_back({EventKind::BlockedByPattern, value_to_string(fam, v),
                         to_string(v->analog),
                         pattern_to_string(patterns[b]) + " " + justification_name(kinds[b])});
      }
    }
  }

  void prune(const DtValue& v, Justification j) {
    bool sig = j.kind == JustificationKind::Signature;
    if (sig) {
      ++stats.pruned_signature;
    } else {
      ++stats.pruned_rewriter;
    }
    auto t = detail::generalize_tree(fam, detail::tree_of(v), j);
    std::size_t id = add_pattern(std::move(t), j.kind);
    if (opts.trace) {
      trace.push_back({sig ? EventKind::PrunedSignature : EventKind::PrunedRewriter,
                       value_to_string(fam, v), to_string(v->analog),
                       pattern_to_string(patterns[id]) + " " + justification_name(j.kind)});
    }
    if (opts.audit) pruned.push_back({v, std::move(j)});
  }

  std::optional<DtValue> next_admitted() {
    while (auto v = draw()) {
      ++stats.enumerated;
      if (opts.audit) drawn.push_back(*v);
      const DtValue& d = *v;
      if (opts.rewriter_pruning && db.find_key(d->key)) {
        prune(d, {JustificationKind::Rewriter, d->key, {}, {}});
        continue;
      }
      std::optional<std::vector<Value>> sig;
      if (opts.io_pruning && !opts.io_points.empty()) {
        sig = signature_of(fam, d, opts.io_points);
        if (db.find_signature(*sig)) {
          prune(d, {JustificationKind::Signature, {}, *sig, opts.io_points});
          continue;
        }
      }
      db.add({d, d->key, sig});
      ++stats.retained;
      if (opts.trace) {
        trace.push_back({EventKind::Retained, value_to_string(fam, d), to_string(d->analog), {}});
      }
      return d;
    }
    return std::nullopt;
  }
};

EnumSession::EnumSession(DatatypeFamily fam, EnumOptions opts)
    : impl_(std::make_unique<Impl>(std::move(fam), std::move(opts))) {}
EnumSession::~EnumSession() = default;

std::optional<DtValue> EnumSession::next_admitted() { return impl_->next_admitted(); }

void EnumSession::refute(const DtValue& v, const std::string& why) {
  --impl_->stats.retained;
  ++impl_->stats.blocked_exact;
  if (impl_->opts.trace) {
    impl_->trace.push_back(
        {EventKind::Refuted, value_to_string(impl_->fam, v), to_string(v->analog), why});
  }
}

void EnumSession::mark_solved(const DtValue& v) {
  if (impl_->opts.trace) {
    impl_->trace.push_back(
        {EventKind::Solved, value_to_string(impl_->fam, v), to_string(v->analog), {}});
  }
}

const DatatypeFamily& EnumSession::family() const { return impl_->fam; }
const EnumStats& EnumSession::stats() const { return impl_->stats; }
EnumStats& EnumSession::stats() { return impl_->stats; }
const std::vector<TraceEvent>& EnumSession::trace() const { return impl_->trace; }
const CandidateDb& EnumSession::db() const { return impl_->db; }
const std::vector<BlockingPattern>& EnumSession::patterns() const { return impl_->patterns; }
const std::vector<JustificationKind>& EnumSession::pattern_kinds() const { return impl_->kinds; }
const std::vector<PrunedValue>& EnumSession::pruned() const { return impl_->pruned; }
const std::vector<BlockedValue>& EnumSession::blocked() const { return impl_->blocked; }
const std::vector<DtValue>& EnumSession::drawn() const { return impl_->drawn; }

std::vector<DtValue> enumerate_values(const DatatypeFamily& fam, std::size_t max_size,
                                      const std::vector<BlockingPattern>& patterns) {
  std::vector<DtValue> out;
  for (std::size_t s = 0; s <= max_size; ++s) {
    for (auto& v : all_values(fam, fam.start, s)) {
      bool hit = std::any_of(patterns.begin(), patterns.end(),
                             [&](const BlockingPattern& p) { return blocks_anywhere(fam, p, v); });
      if (!hit) out.push_back(std::move(v));
    }
  }
  return out;
}

EnumResult solve_enum(const SynthProblem& p, const DatatypeFamily& fam, const EnumOptions& opts) {
  EnumResult res;
  if (p.functions.size() != 1) {
    res.reason = "enumeration handles a single function to synthesize";
    return res;
  }
  const SynthFun& f = p.functions[0];
  if (fam.params.size() != f.params.size() || fam.dt(fam.start).sort != f.ret) {
    throw GrammarError("datatype family does not match the signature of " + f.name);
  }
  EnumSession s(fam, opts);
  std::vector<Assignment> cex;
  auto finish = [&](EnumResult& r) {
    r.stats = s.stats();
    r.stats.cex_points = cex.size();
    r.trace = s.trace();
  };
  while (auto v = s.next_admitted()) {
    opts.limits.check();
    Solution cand;
    cand.bindings[f.name] = mk_lambda(fam.params, (*v)->analog);
    Term inst = apply_solution(p, cand);
    bool refuted = std::any_of(cex.begin(), cex.end(),
                               [&](const Assignment& a) { return !evaluate_bool(inst, a); });
    if (refuted) {
      s.refute(*v, "cached point");
      continue;
    }
    SatResult r = check_sat(mk_not(inst), opts.limits);
    if (r.sat) {
      Assignment pt;
      for (const auto& u : p.universals) {
        auto it = r.model.find(u.name());
        if (it != r.model.end()) {
          pt[u.name()] = it->second;
        } else if (u.sort() == BaseSort::Bool) {
          pt[u.name()] = false;
        } else {
          pt[u.name()] = Integer(0);
        }
      }
      std::string why = "counterexample";
      for (const auto& [k, val] : pt) why += " " + k + "=" + to_string(val);
      cex.push_back(std::move(pt));
      s.refute(*v, why);
      continue;
    }
    s.mark_solved(*v);
    res.solution = std::move(cand);
    finish(res);
    return res;
  }
  res.reason = "search space exhausted at size " + std::to_string(opts.max_size);
  finish(res);
  return res;
}

}  // namespace liasynth
