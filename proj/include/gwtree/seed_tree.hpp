#pragma once

// Breadth-first seed encoding of Galton-Watson trees.
//
// Node i (1-based) of the tree has seed[i-1] children. Nodes are labelled top
// to bottom and left to right, so the children of node i receive the next
// unused labels in order.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace gwtree {

/// A k-truncated seed (X_1, ..., X_k) of offspring counts.
class SeedPrefix {
 public:
  /// Throws std::invalid_argument if counts is empty or any count is negative.
  explicit SeedPrefix(std::vector<int> counts);

  /// Parses "3,0,2,1,0,0,0". Whitespace around entries is ignored.
  static SeedPrefix parse(std::string_view text);

  int length() const { return static_cast<int>(counts_.size()); }
  /// Child count of node `index` (1-based).
  int count(int index) const { return counts_[static_cast<std::size_t>(index - 1)]; }
  const std::vector<int>& counts() const { return counts_; }

  /// The first min(k, length()) entries.
  SeedPrefix truncated(int k) const;

  std::string to_string() const;

  friend bool operator==(const SeedPrefix&, const SeedPrefix&) = default;

 private:
  std::vector<int> counts_;
};

/// Whether a prefix pins down the whole tree.
struct TreeStatus {
  bool complete = false;
  /// |T| when complete, otherwise the number of explored nodes (|T| > nodes).
  int nodes = 0;

  static TreeStatus Complete(int n) { return {true, n}; }
  static TreeStatus Incomplete(int explored) { return {false, explored}; }

  friend bool operator==(const TreeStatus&, const TreeStatus&) = default;
};

/// BFS reconstruction of the part of the tree whose child counts are known.
class TreeView {
 public:
  int num_nodes_known() const { return static_cast<int>(level_.size()); }
  /// Total node labels generated so far (known nodes plus children beyond the prefix).
  int num_generated() const { return generated_; }
  TreeStatus status() const { return status_; }
  int prefix_length() const { return prefix_length_; }

  /// Parent of known node c >= 2.
  int parent(int c) const { return parent_[static_cast<std::size_t>(c - 1)]; }
  int level(int node) const { return level_[static_cast<std::size_t>(node - 1)]; }
  int children(int node) const { return children_[static_cast<std::size_t>(node - 1)]; }

  /// Number of known nodes whose level satisfies `filter`.
  int level_counts(const std::function<bool(int)>& filter) const;

  friend TreeView build_tree(const SeedPrefix& seed);

 private:
  std::vector<int> parent_;  // 0 for the root
  std::vector<int> level_;
  std::vector<int> children_;
  int generated_ = 1;
  int prefix_length_ = 0;
  TreeStatus status_;
};

TreeView build_tree(const SeedPrefix& seed);

/// Incremental BFS walk: feed child counts one node at a time.
///
/// Tracks the generated-label count and the level boundary, which is all the
/// state needed to assign levels to subsequent nodes.
class BfsCursor {
 public:
  /// Index of the next node to be fed (1-based).
  int next_index() const { return next_; }
  /// Level of the next node to be fed. Valid only while !complete().
  int next_level() const { return level_; }
  int generated() const { return generated_; }
  bool complete() const { return complete_; }

  /// Records that node next_index() has `children` children. Returns true if
  /// the tree is complete after this node.
  bool feed(int children) {
    generated_ += children;
    const int index = next_++;
    if (generated_ == index) {
      complete_ = true;
    } else if (index == level_end_) {
      ++level_;
      level_end_ = generated_;
    }
    return complete_;
  }

 private:
  int next_ = 1;
  int level_ = 0;
  int level_end_ = 1;
  int generated_ = 1;
  bool complete_ = false;
};

}  // namespace gwtree
