#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "brw/gw_trees.hpp"

namespace brw {

class TraceGraph;

/// Plain undirected simple graph on vertices 0..n-1.
class Graph {
 public:
  explicit Graph(std::size_t n = 0) : adj_(n) {}

  std::size_t size() const noexcept { return adj_.size(); }
  std::size_t add_vertex();
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  const std::vector<int>& neighbors(int v) const { return adj_.at(static_cast<std::size_t>(v)); }
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
  std::size_t edge_count() const noexcept;

  /// Distances from src, -1 where unreachable or beyond max_radius.
  std::vector<int> distances(int src, int max_radius = std::numeric_limits<int>::max()) const;
  /// Component id of each vertex, skipping vertices with removed[v] set
  /// (their id is -1).  Returns the number of components.
  std::size_t components(std::vector<int>& id, const std::vector<char>& removed) const;

  /// Tree edges with vertex ids preserved.
  static Graph from_tree(const MarkedTree& tree);
  /// Trace edges on trace vertex indices.
  static Graph from_trace(const TraceGraph& trace);

 private:
  std::vector<std::vector<int>> adj_;
};

/// A finite graph with a distinguished vertex set.  complete[v] says that
/// v's neighbourhood in the (possibly infinite) underlying object is fully
/// present; samplers clear it on vertices whose children were not generated.
struct MarkedGraph {
  Graph graph;
  std::vector<char> marked;
  std::vector<char> complete;

  std::size_t size() const noexcept { return graph.size(); }
  std::vector<int> marked_vertices() const;

  static MarkedGraph from_tree(const MarkedTree& tree);
};

}  // namespace brw
