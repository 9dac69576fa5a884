#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "brw/group_graph.hpp"
#include "brw/gw_trees.hpp"
#include "brw/rng.hpp"

namespace brw {

/// Tree-indexed walk: values[v] = X(v).  The parent array of the index tree
/// is kept alongside so the walk is self-contained.
struct TreeWalk {
  GroupSpec group;
  Elem start;
  std::vector<Vertex> parent;
  std::vector<Elem> values;

  std::size_t size() const noexcept { return values.size(); }
  const Elem& operator[](Vertex v) const { return values.at(static_cast<std::size_t>(v)); }
  /// Tree vertices mapped to x.
  std::vector<Vertex> preimage(const Elem& x) const;
};

/// Assigns X(root) = start and, in breadth-first order, gives every child a
/// uniformly chosen neighbour of its parent's value.
TreeWalk run_walk(const MarkedTree& tree, const GroupSpec& g, const Elem& start, Rng& rng);

/// Subgraph of G spanned by the crossed edges, with multiplicities.
class TraceGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;  // (smaller index, larger index)

  explicit TraceGraph(const TreeWalk& walk);

  const GroupSpec& group() const noexcept { return group_; }
  /// Visited elements in first-visit order; index 0 is X(o).
  const std::vector<Elem>& vertices() const noexcept { return vertices_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  bool contains(const Elem& x) const { return index_.count(x) != 0; }
  std::size_t index_of(const Elem& x) const;
  /// #X^{-1}(x); zero for unvisited elements.
  std::size_t visits(const Elem& x) const;
  const std::vector<std::size_t>& visit_counts() const noexcept { return visits_; }
  const std::map<Edge, std::size_t>& edges() const noexcept { return edges_; }
  std::size_t multiplicity(const Elem& x, const Elem& y) const;

  /// One line "word word multiplicity" per edge, in index order.
  std::string to_edge_list() const;

 private:
  GroupSpec group_;
  std::vector<Elem> vertices_;
  std::unordered_map<Elem, std::size_t, ElemHash> index_;
  std::vector<std::size_t> visits_;
  std::map<Edge, std::size_t> edges_;
};

TraceGraph trace(const TreeWalk& walk);

struct OriginVisitReplicate {
  std::vector<std::uint64_t> counts;  ///< counts[n] = #{v : depth(v) <= n, X(v) = start}
  std::vector<char> survived;         ///< survived[n] = tree reaches depth n
  bool truncated = false;             ///< vertex budget hit
};

struct OriginVisitDepth {
  int depth = 0;
  double mean_all = 0.0;  ///< over all replicates
  double se_all = 0.0;
  std::size_t survivors = 0;
  double mean_survived = 0.0;  ///< over replicates that reach this depth
  double se_survived = 0.0;
};

enum class VisitTrend { Stabilizes, Grows };

struct OriginVisitResult {
  std::vector<OriginVisitReplicate> replicates;
  std::vector<OriginVisitDepth> per_depth;
  /// Grows when the surviving-run mean at the last depth exceeds the mean at
  /// half that depth by more than 10% and by more than four standard errors.
  VisitTrend trend = VisitTrend::Stabilizes;
};

/// Replicate i uses substream(seed, i); the result does not depend on
/// `workers`.
OriginVisitResult origin_visit_experiment(const OffspringDistribution& mu, const GroupSpec& g, const Elem& start,
                                          int depth_budget, std::size_t replicates, std::uint64_t seed,
                                          unsigned workers = 1, std::size_t vertex_budget = 2'000'000);

}  // namespace brw
