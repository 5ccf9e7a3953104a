#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlsl/common.hpp"

namespace mlsl {

// One directed edge instance. Parallel edges are distinct instances.
struct Edge {
  int src = -1;
  int dst = -1;
  Vec features;
};

// Directed multigraph with a fixed-width real feature vector per edge.
// Node ids are opaque strings, mapped to dense indices internally.
// Immutable once built; construction is single-writer.
class Graph {
 public:
  explicit Graph(int feature_width = 0);

  int feature_width() const { return feature_width_; }

  // Returns the node's index, creating it if new. Ids may not contain
  // commas or line breaks (they must survive the CSV edge-list format).
  int add_node(const std::string& id);

  bool has_node(const std::string& id) const {
    return id_to_index_.count(id) > 0;
  }
  int node_index(const std::string& id) const;  // throws on unknown id
  const std::string& node_id(int index) const { return node_ids_.at(index); }
  int node_count() const { return static_cast<int>(node_ids_.size()); }

  // Endpoints are created on demand. Features must be finite and of
  // length feature_width().
  void add_edge(const std::string& src, const std::string& dst, Vec features);
  void add_edge(int src, int dst, Vec features);

  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }

  // Outgoing edge indices of a node, in edge insertion order.
  std::span<const std::size_t> out_edges(int node) const;

  int out_degree(int node) const;
  int in_degree(int node) const;

 private:
  int feature_width_;
  std::vector<std::string> node_ids_;
  std::unordered_map<std::string, int> id_to_index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_edges_;
  std::vector<int> in_degree_;
};

// Copy of g with one reversed edge (v, u, features) appended per original
// edge (u, v, features), in original edge order. Used to traverse logically
// undirected data (e.g. bipartite vote graphs) with the directed unfoldings.
Graph with_reverse_edges(const Graph& g);

// Dual graph: one node per edge instance of g; one dual edge per composable
// pair ((u,v), (v,w)), carrying the feature vector of the target edge (v,w).
// Poses edge-label prediction as node prediction.
Graph build_dual(const Graph& g);

}  // namespace mlsl
