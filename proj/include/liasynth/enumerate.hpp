#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "liasynth/datatypes.hpp"
#include "liasynth/limits.hpp"
#include "liasynth/problem.hpp"

namespace liasynth {

/// "The n-th child of the parent whose type is `datatype`", n counted from 1.
struct PathStep {
  std::string datatype;
  int occurrence = 1;
  bool operator==(const PathStep&) const = default;
};
using SelectorPath = std::vector<PathStep>;

std::string path_to_string(const SelectorPath& p);

/// Conjunction of discriminator tests; a value matching all of them is
/// blocked. Equivalent to one clause  not is_C1(t1) or ... or not is_Cn(tn).
struct BlockingPattern {
  std::string anchor;
  std::vector<std::pair<SelectorPath, std::string>> constraints;
};

std::string pattern_to_string(const BlockingPattern& p);

/// Follows a path from v; nullopt if some step does not resolve.
std::optional<DtValue> resolve_path(const DatatypeFamily& fam, const DtValue& v,
                                    const SelectorPath& path);

/// True iff v has the anchor datatype and every constraint resolves to a
/// subvalue with the named top constructor.
bool blocks(const DatatypeFamily& fam, const BlockingPattern& p, const DtValue& v);
/// True iff p, shifted to some position of v, blocks the subvalue there.
bool blocks_anywhere(const DatatypeFamily& fam, const BlockingPattern& p, const DtValue& v);

/// One constraint per node of v.
BlockingPattern make_blocking_pattern(const DatatypeFamily& fam, const DtValue& v);

/// Prefixes every path. `root` is the datatype the shifted pattern applies
/// to. Throws SynthError if the prefix does not land on p's anchor.
BlockingPattern shift_pattern(const DatatypeFamily& fam, const BlockingPattern& p,
                              const SelectorPath& prefix, const std::string& root);

enum class JustificationKind { Rewriter, Signature, Seed };
const char* justification_name(JustificationKind k);

/// Why a value may be blocked: its normal form has `key`, or it evaluates to
/// `signature` on `points`.
struct Justification {
  JustificationKind kind = JustificationKind::Rewriter;
  std::string key;
  std::vector<Value> signature;
  std::vector<Point> points;
};

/// Does every value matched by the pattern satisfy the justification? Holes
/// become fresh variables annotated with their datatype; a normal form equal
/// to a hole of the anchor's datatype also justifies (the hole is a strictly
/// smaller value of the same type). Signatures use three-valued evaluation.
bool pattern_justified(const DatatypeFamily& fam, const BlockingPattern& p,
                       const Justification& j);

/// Greedy pre-order dropping of subtrees from make_blocking_pattern(v) while
/// the justification still holds.
BlockingPattern generalize_pattern(const DatatypeFamily& fam, const DtValue& v,
                                   const Justification& j);

/// Patterns valid by the rewriter alone: identity elements and constant
/// conditions over leaves, e.g. plus(_, 0) and if(leq(0, 1), _, _).
std::vector<BlockingPattern> eager_seed_patterns(const DatatypeFamily& fam);

struct DbEntry {
  DtValue value;
  std::string key;
  std::optional<std::vector<Value>> signature;
};

class CandidateDb {
 public:
  const DbEntry* find_key(const std::string& key) const;
  const DbEntry* find_signature(const std::vector<Value>& sig) const;
  void add(DbEntry e);
  const std::vector<DbEntry>& entries() const { return entries_; }

 private:
  std::vector<DbEntry> entries_;
  std::map<std::string, std::size_t> by_key_;
  std::map<std::vector<Value>, std::size_t> by_sig_;
};

struct EnumOptions {
  std::size_t max_size = 8;
  bool rewriter_pruning = true;
  bool io_pruning = false;
  bool eager_seeds = true;
  std::vector<Point> io_points;  // signature points (parameter values)
  bool trace = false;
  bool audit = false;  // keep pruned and blocked values for inspection
  Limits limits;
};

/// enumerated = retained + pruned_rewriter + pruned_signature + blocked_exact
struct EnumStats {
  std::size_t enumerated = 0;
  std::size_t retained = 0;
  std::size_t pruned_rewriter = 0;
  std::size_t pruned_signature = 0;
  std::size_t blocked_exact = 0;
  std::size_t blocked_by_pattern = 0;
  std::size_t patterns = 0;
  std::size_t cex_points = 0;
};

enum class EventKind { Retained, PrunedRewriter, PrunedSignature, BlockedByPattern, Refuted, Solved };
const char* event_name(EventKind k);

struct TraceEvent {
  EventKind kind;
  std::string value;
  std::string analog;
  std::string detail;  // pattern and justification, where relevant
};

struct PrunedValue {
  DtValue value;
  Justification why;
};

struct BlockedValue {
  DtValue value;
  std::size_t pattern;  // index into patterns()
};

/// One enumeration session: generator, pattern store and candidate database.
class EnumSession {
 public:
  EnumSession(DatatypeFamily fam, EnumOptions opts);
  ~EnumSession();
  EnumSession(const EnumSession&) = delete;
  EnumSession& operator=(const EnumSession&) = delete;

  /// Next start-datatype value in size order that is neither blocked by a
  /// pattern nor a duplicate; pruned duplicates are recorded along the way.
  /// nullopt once the size cap is exhausted.
  std::optional<DtValue> next_admitted();
  /// Counts an admitted value as refuted and blocks it exactly.
  void refute(const DtValue& v, const std::string& why);
  void mark_solved(const DtValue& v);

  const DatatypeFamily& family() const;
  const EnumStats& stats() const;
  EnumStats& stats();
  const std::vector<TraceEvent>& trace() const;
  const CandidateDb& db() const;
  const std::vector<BlockingPattern>& patterns() const;
  const std::vector<JustificationKind>& pattern_kinds() const;
  const std::vector<PrunedValue>& pruned() const;
  const std::vector<BlockedValue>& blocked() const;
  /// Values drawn from the generator, in order (audit mode only).
  const std::vector<DtValue>& drawn() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Plain generator without database or seeds: every value up to the cap,
/// minus those blocked by `patterns` at any position.
std::vector<DtValue> enumerate_values(const DatatypeFamily& fam, std::size_t max_size,
                                      const std::vector<BlockingPattern>& patterns = {});

struct EnumResult {
  std::optional<Solution> solution;
  std::string reason;  // when no solution
  EnumStats stats;
  std::vector<TraceEvent> trace;
};

/// Enumerative synthesis for the single function of p over `fam`.
/// Throws ResourceLimit when the limits expire.
EnumResult solve_enum(const SynthProblem& p, const DatatypeFamily& fam, const EnumOptions& opts);

}  // namespace liasynth
