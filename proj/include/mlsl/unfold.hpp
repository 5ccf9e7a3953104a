#pragma once

#include <vector>

#include "mlsl/graph.hpp"
#include "mlsl/rng.hpp"

namespace mlsl {

// Tree node produced by unfolding. in_edge is the graph edge instance that
// led here (-1 for the root); the same graph node may back many tree nodes.
struct UnfoldTreeNode {
  int graph_node = -1;
  int depth = 0;
  int parent = -1;
  int in_edge = -1;
};

// Depth-bounded tree rooted at node 0, built breadth-first; child order
// before any policy is applied is edge insertion order. Treat as immutable
// after construction; safe for concurrent reads.
struct UnfoldTree {
  const Graph* graph = nullptr;
  int depth_limit = 0;
  std::vector<UnfoldTreeNode> nodes;
  std::vector<std::vector<int>> children;

  int root() const { return 0; }
  int size() const { return static_cast<int>(nodes.size()); }
  const Vec& in_features(int tid) const;
};

// Full unfolding: a tree node u at depth k < D gets one child per outgoing
// graph edge of u, including edges back to u's parent and each parallel
// edge separately. Depth-D nodes are leaves.
UnfoldTree unfold_full(const Graph& g, const std::string& root_id, int depth);
UnfoldTree unfold_full(const Graph& g, int root, int depth);

// Asymmetric unfolding: as unfold_full, but a non-root node whose tree
// parent corresponds to graph node u' skips children z with z == u'. A
// self-loop therefore expands at the root (no parent to exclude) and is
// skipped below, where the copy's parent is the same graph node.
UnfoldTree unfold_asymmetric(const Graph& g, const std::string& root_id,
                             int depth);
UnfoldTree unfold_asymmetric(const Graph& g, int root, int depth);

struct ChildOrderPolicy {
  enum class Kind { kAsLoaded, kRandomShuffle, kFixedByFeature };

  Kind kind = Kind::kAsLoaded;
  int feature_index = 0;  // FixedByFeature only
  bool ascending = true;  // FixedByFeature only

  static ChildOrderPolicy as_loaded() { return {}; }
  static ChildOrderPolicy random_shuffle() {
    return {Kind::kRandomShuffle, 0, true};
  }
  static ChildOrderPolicy by_feature(int index, bool ascending = true) {
    return {Kind::kFixedByFeature, index, ascending};
  }
};

// Permutes each node's child list per the policy. RandomShuffle draws an
// independent permutation per node (node id order) from rng; FixedByFeature
// sorts by the named incoming-edge feature, stable on tree-node id.
UnfoldTree order_children(UnfoldTree t, const ChildOrderPolicy& policy,
                          RngStream& rng);

}  // namespace mlsl
