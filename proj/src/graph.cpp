#include "mlsl/graph.hpp"

#include <string>

namespace mlsl {

Graph::Graph(int feature_width) : feature_width_(feature_width) {
  if (feature_width < 0) {
    throw ValidationError("Graph: feature width must be non-negative");
  }
}

int Graph::add_node(const std::string& id) {
  auto it = id_to_index_.find(id);
  if (it != id_to_index_.end()) return it->second;
  if (id.empty() || id.find_first_of(",\n\r") != std::string::npos) {
    throw ValidationError("Graph: node id not representable in edge-list "
                          "format: '" + id + "'");
  }
  int index = static_cast<int>(node_ids_.size());
  node_ids_.push_back(id);
  id_to_index_.emplace(node_ids_.back(), index);
  out_edges_.emplace_back();
  in_degree_.push_back(0);
  return index;
}

int Graph::node_index(const std::string& id) const {
  auto it = id_to_index_.find(id);
  if (it == id_to_index_.end()) {
    throw ValidationError("Graph: unknown node id '" + id + "'");
  }
  return it->second;
}

void Graph::add_edge(const std::string& src, const std::string& dst,
                     Vec features) {
  int s = add_node(src);
  int d = add_node(dst);
  add_edge(s, d, std::move(features));
}

void Graph::add_edge(int src, int dst, Vec features) {
  if (src < 0 || src >= node_count() || dst < 0 || dst >= node_count()) {
    throw ValidationError("Graph: edge endpoint out of range");
  }
  if (features.size() != feature_width_) {
    throw ValidationError("Graph: edge feature width " +
                          std::to_string(features.size()) + " != declared " +
                          std::to_string(feature_width_));
  }
  if (!features.allFinite()) {
    throw ValidationError("Graph: edge features must be finite");
  }
  std::size_t e = edges_.size();
  edges_.push_back(Edge{src, dst, std::move(features)});
  out_edges_[src].push_back(e);
  in_degree_[dst] += 1;
}

std::span<const std::size_t> Graph::out_edges(int node) const {
  return out_edges_.at(node);
}

int Graph::out_degree(int node) const {
  return static_cast<int>(out_edges_.at(node).size());
}

int Graph::in_degree(int node) const { return in_degree_.at(node); }

Graph with_reverse_edges(const Graph& g) {
  Graph out(g.feature_width());
  for (int v = 0; v < g.node_count(); ++v) out.add_node(g.node_id(v));
  for (const Edge& e : g.edges()) out.add_edge(e.src, e.dst, e.features);
  for (const Edge& e : g.edges()) out.add_edge(e.dst, e.src, e.features);
  return out;
}

Graph build_dual(const Graph& g) {
  Graph dual(g.feature_width());
  // Dual node per edge instance; the index prefix keeps parallel edges
  // distinct.
  std::vector<std::string> names(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    names[e] = std::to_string(e) + ":" + g.node_id(ed.src) + "->" +
               g.node_id(ed.dst);
    dual.add_node(names[e]);
  }
  for (std::size_t e1 = 0; e1 < g.edge_count(); ++e1) {
    int mid = g.edge(e1).dst;
    for (std::size_t e2 : g.out_edges(mid)) {
      dual.add_edge(names[e1], names[e2], g.edge(e2).features);
    }
  }
  return dual;
}

}  // namespace mlsl
