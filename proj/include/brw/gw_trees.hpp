#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "brw/rng.hpp"

namespace brw {

/// Finite-support offspring law over {0, 1, ..., K}, K <= 64.
class OffspringDistribution {
 public:
  static constexpr std::size_t kMaxSupport = 65;

  /// Throws DomainError on negative entries, a sum off 1 by more than 1e-12,
  /// or support above kMaxSupport.
  explicit OffspringDistribution(std::vector<double> pmf);

  static OffspringDistribution dirac(int k);

  const std::vector<double>& pmf() const noexcept { return pmf_; }
  double operator[](std::size_t k) const noexcept { return k < pmf_.size() ? pmf_[k] : 0.0; }
  double mean() const noexcept { return mean_; }
  /// mu(1) < 1.
  bool nontrivial() const noexcept { return (*this)[1] < 1.0; }
  int max_offspring() const noexcept { return static_cast<int>(pmf_.size()) - 1; }

  int sample(Rng& rng) const noexcept;

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
};

/// Binomial p-thinning: mu^p(k) = sum_{n>=k} C(n,k) p^k (1-p)^(n-k) mu(n).
OffspringDistribution thin(const OffspringDistribution& mu, double p);

/// Smallest fixed point of the generating function.  Exactly 1 when the law
/// is nontrivial with mean <= 1; 0 for the trivial law delta_1.
double extinction_probability(const OffspringDistribution& mu);

using Vertex = std::int32_t;
inline constexpr Vertex kNoVertex = -1;

/// Finite rooted tree with optional marks and optional edge labels.
///
/// The label of the edge {parent(v), v} is stored at v.  A vertex is "open"
/// when the sampler stopped before generating all of its children (depth cap
/// or vertex budget); `truncated` records that the vertex budget was hit.
class MarkedTree {
 public:
  MarkedTree();

  std::size_t size() const noexcept { return parent_.size(); }
  Vertex root() const noexcept { return 0; }

  Vertex add_child(Vertex parent);

  Vertex parent(Vertex v) const { return parent_.at(idx(v)); }
  const std::vector<Vertex>& children(Vertex v) const { return children_.at(idx(v)); }
  int depth(Vertex v) const { return depth_.at(idx(v)); }
  int height() const noexcept;
  /// Number of vertices at each depth 0..height().
  std::vector<std::size_t> generation_sizes() const;

  bool is_marked(Vertex v) const { return marked_.at(idx(v)) != 0; }
  void set_marked(Vertex v, bool on = true) { marked_.at(idx(v)) = on ? 1 : 0; }
  void clear_marks();
  std::vector<Vertex> marked_vertices() const;
  std::size_t marked_count() const noexcept;

  bool has_labels() const noexcept { return !labels_.empty(); }
  /// Label of the edge above v; v must not be the root.
  double label(Vertex v) const { return labels_.at(idx(v)); }
  /// One label per vertex (root entry ignored) or empty to remove labels.
  void set_labels(std::vector<double> labels);

  bool truncated() const noexcept { return truncated_; }
  void set_truncated(bool t) noexcept { truncated_ = t; }
  bool is_open(Vertex v) const { return open_.at(idx(v)) != 0; }
  void set_open(Vertex v, bool on = true) { open_.at(idx(v)) = on ? 1 : 0; }

  /// Vertices in breadth-first order (ids are already BFS-ordered for trees
  /// built by the samplers, but not necessarily for hand-built ones).
  std::vector<Vertex> bfs_order() const;

  /// Builds a tree from a parent array; vertex 0 must be the root and every
  /// parent id must be smaller than its child.
  static MarkedTree from_parents(const std::vector<Vertex>& parents);

  /// Line format: header "# brw-tree v1 n=<n> truncated=<0|1>", then one
  /// line "id parent depth mark label" per vertex (parent -1 for the root,
  /// label "-" when absent).
  std::string to_text() const;
  static MarkedTree from_text(std::string_view text);

 private:
  std::size_t idx(Vertex v) const {
    return static_cast<std::size_t>(v);
  }

  std::vector<Vertex> parent_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<int> depth_;
  std::vector<char> marked_;
  std::vector<char> open_;
  std::vector<double> labels_;
  bool truncated_ = false;
};

struct GwLimits {
  std::size_t vertex_budget = 1'000'000;
  int max_depth = std::numeric_limits<int>::max();
};

/// Breadth-first Galton-Watson tree.  Vertices at max_depth are left open
/// without drawing offspring.  When adding a drawn child would exceed the
/// budget the tree is flagged truncated and generation stops.
MarkedTree sample_gw(const OffspringDistribution& mu, std::size_t budget, Rng& rng);
MarkedTree sample_gw(const OffspringDistribution& mu, const GwLimits& limits, Rng& rng);

enum class GwVariant { Augmented, Unimodular };

/// Augmented GW tree rooted at o: o's own offspring plus an extra neighbour
/// o' (added as o's last child) that carries an independent GW(mu) tree.
/// Unimodular: o's offspring count k is accepted with probability 1/(k+1)
/// before anything else is generated.
MarkedTree sample_unimodular_gw(const OffspringDistribution& mu, std::size_t budget, Rng& rng,
                                GwVariant variant = GwVariant::Unimodular,
                                std::size_t retry_limit = 1'000'000);
MarkedTree sample_unimodular_gw(const OffspringDistribution& mu, const GwLimits& limits, Rng& rng,
                                GwVariant variant = GwVariant::Unimodular,
                                std::size_t retry_limit = 1'000'000);

/// Draws i.i.d. labels in (0, 1] for every edge if the tree has none.
void ensure_edge_labels(MarkedTree& tree, Rng& rng);

/// Ids (root first, BFS order) of the root component among edges with
/// label <= p.  Labels must be present.
std::vector<Vertex> root_component(const MarkedTree& tree, double p);

/// The subtree spanned by `vertices`, which must contain the root and be
/// closed under taking parents.  Vertex i of the result is vertices[i];
/// marks, labels, open flags and the truncated flag carry over.
MarkedTree induced_subtree(const MarkedTree& tree, const std::vector<Vertex>& vertices);

/// Root component of {e : U(e) <= p}.  Labels are drawn first if absent, so
/// repeated calls with growing p give nested components.
MarkedTree percolate_root_component(MarkedTree& tree, double p, Rng& rng);

}  // namespace brw
