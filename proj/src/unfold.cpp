#include "mlsl/unfold.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace mlsl {

const Vec& UnfoldTree::in_features(int tid) const {
  const UnfoldTreeNode& n = nodes.at(tid);
  if (n.in_edge < 0) {
    throw std::logic_error("UnfoldTree: root has no incoming edge");
  }
  return graph->edge(static_cast<std::size_t>(n.in_edge)).features;
}

namespace {

UnfoldTree unfold_impl(const Graph& g, int root, int depth, bool asymmetric) {
  if (root < 0 || root >= g.node_count()) {
    throw ValidationError("unfold: root node index out of range");
  }
  if (depth < 1) {
    throw ValidationError("unfold: depth must be >= 1");
  }

  UnfoldTree t;
  t.graph = &g;
  t.depth_limit = depth;
  t.nodes.push_back(UnfoldTreeNode{root, 0, -1, -1});
  t.children.emplace_back();

  std::deque<int> queue{0};
  while (!queue.empty()) {
    int tid = queue.front();
    queue.pop_front();
    const UnfoldTreeNode node = t.nodes[tid];
    if (node.depth >= depth) continue;
    int parent_graph_node =
        node.parent >= 0 ? t.nodes[node.parent].graph_node : -1;
    for (std::size_t e : g.out_edges(node.graph_node)) {
      int z = g.edge(e).dst;
      if (asymmetric && node.parent >= 0 && z == parent_graph_node) continue;
      int child = t.size();
      t.nodes.push_back(
          UnfoldTreeNode{z, node.depth + 1, tid, static_cast<int>(e)});
      t.children.emplace_back();
      t.children[tid].push_back(child);
      queue.push_back(child);
    }
  }
  return t;
}

}  // namespace

UnfoldTree unfold_full(const Graph& g, int root, int depth) {
  return unfold_impl(g, root, depth, false);
}

UnfoldTree unfold_full(const Graph& g, const std::string& root_id, int depth) {
  return unfold_impl(g, g.node_index(root_id), depth, false);
}

UnfoldTree unfold_asymmetric(const Graph& g, int root, int depth) {
  return unfold_impl(g, root, depth, true);
}

UnfoldTree unfold_asymmetric(const Graph& g, const std::string& root_id,
                             int depth) {
  return unfold_impl(g, g.node_index(root_id), depth, true);
}

UnfoldTree order_children(UnfoldTree t, const ChildOrderPolicy& policy,
                          RngStream& rng) {
  switch (policy.kind) {
    case ChildOrderPolicy::Kind::kAsLoaded:
      break;
    case ChildOrderPolicy::Kind::kRandomShuffle:
      for (auto& kids : t.children) rng.shuffle(kids);
      break;
    case ChildOrderPolicy::Kind::kFixedByFeature: {
      if (t.graph && policy.feature_index >= t.graph->feature_width()) {
        throw ValidationError("order_children: feature index out of range");
      }
      for (auto& kids : t.children) {
        // Children were created with ascending ids, so a stable sort
        // tie-breaks on tree-node id.
        std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
          double fa = t.in_features(a)[policy.feature_index];
          double fb = t.in_features(b)[policy.feature_index];
          return policy.ascending ? fa < fb : fa > fb;
        });
      }
      break;
    }
  }
  return t;
}

}  // namespace mlsl
