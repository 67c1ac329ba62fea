#pragma once

// Closed patterns as trees: every constrained node's ancestors are
// constrained too, so matching is a simultaneous walk.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "liasynth/enumerate.hpp"

namespace liasynth::detail {

struct PatTree {
  int dt = 0;
  int ctor = -1;  // -1: hole
  std::vector<PatTree> children;

  bool is_hole() const { return ctor < 0; }
};

PatTree tree_of(const DtValue& v);
BlockingPattern to_pattern(const DatatypeFamily& fam, const PatTree& t);
/// nullopt unless the pattern is closed.
std::optional<PatTree> to_tree(const DatatypeFamily& fam, const BlockingPattern& p);
bool tree_matches(const PatTree& t, const DtNode& v);
std::string tree_to_string(const DatatypeFamily& fam, const PatTree& t);

/// Discrimination trie over pre-order constructor sequences, one per root
/// datatype. A hole edge skips a whole subvalue.
class PatternIndex {
 public:
  void add(const PatTree& t, std::size_t id);
  /// Smallest id >= lo of a pattern matching v at its root, or -1.
  long first_match(const DtNode& v, std::size_t lo) const;

 private:
  struct Node {
    std::map<int, std::unique_ptr<Node>> next;  // -1 is the hole edge
    std::vector<std::size_t> ids;
  };
  void search(const Node& n, std::vector<const DtNode*>& todo, std::size_t lo, long& best) const;
  std::map<int, Node> roots_;
};

bool tree_justified(const DatatypeFamily& fam, const PatTree& t, const Justification& j);
/// Drops subtrees in pre-order while the justification holds.
PatTree generalize_tree(const DatatypeFamily& fam, PatTree t, const Justification& j);
std::vector<PatTree> seed_trees(const DatatypeFamily& fam);

/// Three-valued evaluation: variables missing from env are unknown.
std::optional<Value> partial_eval(const Term& t, const Assignment& env);

Assignment point_env(const DatatypeFamily& fam, const Point& p);

}  // namespace liasynth::detail
