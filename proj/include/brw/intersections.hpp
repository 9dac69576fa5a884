#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "brw/group_graph.hpp"
#include "brw/gw_trees.hpp"
#include "brw/magic.hpp"
#include "brw/rng.hpp"

namespace brw {

/// sum_{n,m <= N} mean1^n mean2^m p_{n+m}(x, y).
long double expected_pairs_truncated(double mean1, double mean2, const GroupSpec& g, const Elem& x, const Elem& y,
                                     int N);
/// The same partial sums for every cutoff 0..N.
std::vector<long double> expected_pairs_series(double mean1, double mean2, const GroupSpec& g, const Elem& x,
                                               const Elem& y, int N);

struct IntersectionRecord {
  double mean1 = 0.0;
  double mean2 = 0.0;
  int depth1 = 0;  ///< requested cutoffs
  int depth2 = 0;
  int reached1 = 0;  ///< achieved heights
  int reached2 = 0;
  bool truncated = false;       ///< a vertex budget was hit
  std::vector<Elem> I;          ///< elements visited by both walks, sorted
  std::vector<Vertex> pulled;   ///< X1^{-1}(X2(V(T2))), sorted T1 ids
  std::uint64_t pair_count = 0; ///< #{(u, v) : X1(u) = X2(v)}
  MarkedTree tree1;             ///< T1, kept for the ends diagnostic
};

/// Independent GW(mu1), GW(mu2) trees cut at depths N1, N2 and walks from x
/// and y.  Draw order: T1, X1, T2, X2.
IntersectionRecord sample_intersections(const OffspringDistribution& mu1, const OffspringDistribution& mu2,
                                        const GroupSpec& g, const Elem& x, const Elem& y, int N1, int N2, Rng& rng,
                                        std::size_t vertex_budget = 2'000'000);

struct ThinnedPoint {
  double p = 0.0;
  std::vector<Vertex> pulled;  ///< I^p as sorted T1 ids
  std::uint64_t pair_count = 0;
};

struct ThinnedReplicate {
  bool truncated = false;
  std::vector<ThinnedPoint> points;  ///< in p_grid order
};

struct ThinnedSweep {
  std::vector<double> p_grid;
  std::vector<ThinnedReplicate> replicates;
  /// Replicates where some p1 <= p2 in the grid has I^{p1} not contained in
  /// I^{p2}.
  std::size_t inclusion_violations = 0;
};

/// Replicate i draws, from substream(seed, i), exactly what
/// sample_intersections draws with x = y = identity and N1 = N2 = depth,
/// then edge labels for T1 and T2.  I^p is computed on the root components
/// of {U(e) <= p}.
ThinnedSweep thinned_intersection_sweep(const OffspringDistribution& mu1, const OffspringDistribution& mu2,
                                        const GroupSpec& g, const std::vector<double>& p_grid, int depth,
                                        std::size_t replicates, std::uint64_t seed, unsigned workers = 1,
                                        std::size_t vertex_budget = 2'000'000);

enum class EndsVerdict { Empty, AtMostTwoEndsCompatible, ThreeOrMoreEndsCompatible };
std::string to_string(EndsVerdict verdict);

struct EndsCensusEntry {
  int k = 0;
  int r = 0;
  std::size_t branching = 0;       ///< |B_{k,r}| in T1 with marks I
  std::size_t branching_in_I = 0;  ///< |B_{k,r} cap I|
  double root_fraction = 0.0;      ///< |B cap I| / |I|: P(uniform root of I branches)
  double bound = 0.0;              ///< 2r/k
  bool within_bound = true;
};

struct EndsDiagnostic {
  EndsVerdict verdict = EndsVerdict::Empty;
  std::size_t marks = 0;
  std::vector<EndsCensusEntry> census;
};

/// Branching census of I inside T1 (oriented towards a ray at its root).
/// The verdict is ThreeOrMoreEndsCompatible when some r in the grid has a
/// (k_max, r)-branching vertex, k_max the largest k in the grid.
EndsDiagnostic intersection_ends_diagnostic(const MarkedTree& tree1, const std::vector<Vertex>& I,
                                            const std::vector<int>& k_grid, const std::vector<int>& r_grid);
EndsDiagnostic intersection_ends_diagnostic(const IntersectionRecord& record, const std::vector<int>& k_grid,
                                            const std::vector<int>& r_grid);

struct TraceEndsReplicate {
  bool survived = false;  ///< the tree reaches the depth budget
  bool truncated = false;
  std::vector<std::size_t> qualifying;  ///< per radius
  std::vector<std::size_t> M;           ///< per radius n: generation-n vertices with >= m_threshold descendants
};

struct TraceEndsResult {
  std::vector<int> radius_grid;
  std::vector<TraceEndsReplicate> replicates;
  std::vector<double> median_surviving;  ///< per radius, over surviving runs
  bool non_decreasing = false;           ///< medians never drop along the grid
};

/// Grows BRW traces to `depth`, deletes balls of each radius around the
/// start and counts remaining components holding >= m_threshold trace
/// vertices.
TraceEndsResult trace_ends_experiment(const OffspringDistribution& mu, const GroupSpec& g, int depth,
                                      const std::vector<int>& radius_grid, std::size_t m_threshold,
                                      std::size_t replicates, std::uint64_t seed, unsigned workers = 1,
                                      std::size_t vertex_budget = 2'000'000);

}  // namespace brw
