#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "brw/graph.hpp"
#include "brw/group_graph.hpp"
#include "brw/gw_trees.hpp"

namespace brw {

class TraceGraph;

/// Parent value of vertices whose parent is on the virtual ray.
inline constexpr Vertex kRay = -2;

/// A finite tree oriented towards an end: a virtual infinite ray is attached
/// at the anchor, every real vertex has exactly one parent (possibly on the
/// ray), and layer(parent) = layer(child) - 1 with the anchor in layer 0.
/// Ray vertices occupy layers -1, -2, ... and are never marked.
class OrientedTree {
 public:
  /// Orients `tree` towards a ray attached at `anchor` (default: the root).
  explicit OrientedTree(const MarkedTree& tree, Vertex anchor = 0);
  /// Generic form: parent[v] is a real vertex or kRay; layers must satisfy
  /// the parent relation.  Several vertices may hang off the ray.
  OrientedTree(std::vector<Vertex> parent, std::vector<int> layer);

  std::size_t size() const noexcept { return parent_.size(); }
  Vertex parent(Vertex v) const { return parent_.at(static_cast<std::size_t>(v)); }
  const std::vector<Vertex>& children(Vertex v) const { return children_.at(static_cast<std::size_t>(v)); }
  /// Real vertices attached directly to the ray.
  const std::vector<Vertex>& ray_children() const noexcept { return ray_children_; }
  int layer(Vertex v) const { return layer_.at(static_cast<std::size_t>(v)); }
  /// Top-down order (parents before children).
  const std::vector<Vertex>& order() const noexcept { return order_; }

 private:
  void finish();

  std::vector<Vertex> parent_;
  std::vector<int> layer_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<Vertex> ray_children_;
  std::vector<Vertex> order_;
};

/// For every vertex u: the number of marks at distance >= r from u minus the
/// marks in the two heaviest directions at u (a direction being a component
/// of the ray-augmented tree minus u).  u is (k,r)-branching iff this is
/// >= k.  Throws DomainError when A is empty.
std::vector<std::int64_t> branching_margins(const OrientedTree& t, const std::vector<Vertex>& A, int r);
std::vector<Vertex> branching_vertices(const OrientedTree& t, const std::vector<Vertex>& A, int k, int r);

/// Sentinel margin for vertices with no descendant r layers down.
inline constexpr std::int64_t kNoDescendant = std::numeric_limits<std::int64_t>::min();

/// For every vertex v: |A_v| - max_w |A_w| over descendants w with
/// sigma^r(w) = v (A_x = marks strictly below x), or kNoDescendant.  Computed
/// with one post-order pass over each auxiliary tree T_1..T_r.
std::vector<std::int64_t> supported_margins(const OrientedTree& t, const std::vector<Vertex>& A, int r);
std::vector<Vertex> supported_vertices(const OrientedTree& t, const std::vector<Vertex>& A, int k, int r);

/// T_m: vertices in layers congruent to m mod r are linked to their r-th
/// ancestor, every other vertex to its nearest such ancestor.  r = 1 gives
/// back t.
OrientedTree auxiliary_tree(const OrientedTree& t, int m, int r);
/// Whether layer `layer` belongs to residue class m (1 <= m <= r).
bool in_residue_class(int layer, int m, int r) noexcept;

/// floor(r (2|A| - k) / k), possibly negative.
std::int64_t magic_bound(std::size_t marks, int k, int r);

struct BranchingReport {
  int k = 0;
  int r = 0;
  std::size_t vertices = 0;
  std::size_t marks = 0;
  std::vector<Vertex> branching;
  std::vector<Vertex> supported;
  std::int64_t bound = 0;
  bool pass = false;  ///< |branching| <= max(bound, 0)
};

BranchingReport magic_bound_check(const OrientedTree& t, const std::vector<Vertex>& A, int k, int r);

struct ComponentSummary {
  std::size_t size = 0;
  std::size_t marked = 0;
};

struct EndsProfile {
  std::vector<ComponentSummary> components;  ///< by marked count, then size, descending
  std::size_t qualifying = 0;                ///< components with marked >= m_threshold
};

/// Removes the closed ball of `radius` around `center` and summarizes the
/// remaining components.
EndsProfile ends_profile(const Graph& graph, const std::vector<int>& A, int center, int radius,
                         std::size_t m_threshold);
EndsProfile ends_profile(const MarkedTree& tree, const std::vector<Vertex>& A, Vertex center, int radius,
                         std::size_t m_threshold);
EndsProfile ends_profile(const TraceGraph& trace, const std::vector<Elem>& A, const Elem& center, int radius,
                         std::size_t m_threshold);

}  // namespace brw
