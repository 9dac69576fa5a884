#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "brw/graph.hpp"
#include "brw/group_graph.hpp"
#include "brw/gw_trees.hpp"
#include "brw/rng.hpp"

namespace brw {

/// Bounded-radius transport F(G, A, u, v) >= 0.
///
/// `reach`: F vanishes when dist(u, v) > reach.  `radius`: F depends only on
/// the radius-`radius` balls around u and v.  The evaluator receives the
/// precomputed distance between u and v.
struct TransportFunction {
  std::string name;
  int reach = 1;
  int radius = 1;
  std::function<double(const MarkedGraph&, int u, int v, int dist)> eval;

  double operator()(const MarkedGraph& g, int u, int v, int dist) const { return eval(g, u, v, dist); }
};

/// Built-ins, selected by name:
///   "adjacency"        1(u ~ v)
///   "leaf-target"      1(v is a leaf and dist(u,v) <= R)
///   "nearest-marked"   1/|N(u)| for v in N(u), the marked vertices other than
///                      u at minimal distance <= R from u
///   "degree-ratio"     1(u ~ v) deg(v)/deg(u)
///   "marked-neighbors" 1(dist(u,v) <= R) times the number of marked
///                      neighbours of v
///   "distinct"         1(u != v), unbounded reach; meant for finite graphs
///   "other-leaf"       1(u != v and v is a leaf), unbounded reach; finite graphs
/// Throws ConfigError on an unknown name.
inline constexpr int kUnboundedReach = 1 << 20;

TransportFunction builtin_transport(const std::string& name, int R = 2);
std::vector<std::string> builtin_transport_names();

/// One draw of a rooted marked graph together with its weight ingredient.
struct MtpSample {
  MarkedGraph graph;
  int root = 0;
  /// #X^{-1}(rho) for the walk whose preimage defines the weight (1 when
  /// not applicable).
  std::size_t preimage_count = 1;
};

struct WeightFunction {
  std::string name;
  std::function<double(const MtpSample&)> eval;
};

/// "one" (W = 1) or "inverse-preimage" (W = 1 / preimage_count).
WeightFunction builtin_weight(const std::string& name);

struct ExactMtpResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool equal = false;  ///< |lhs - rhs| < 1e-12
};

/// Both sides of the transport identity for a uniform root on A:
/// |A|^-1 sum_{u,v in A} F(u, v) against |A|^-1 sum_{u,v in A} F(v, u).
/// Throws DomainError when A is empty.
ExactMtpResult exact_mtp_check(const MarkedGraph& graph, const TransportFunction& F);

/// Sample i is drawn from substream(seed, i), so results do not depend on
/// the worker count.
using Sampler = std::function<MtpSample(Rng&)>;

struct MtpOptions {
  std::size_t samples = 10'000;  ///< at least 1000
  double alpha = 0.01;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct MtpReport {
  std::string transport;
  std::string weight;
  double estimate = 0.0;  ///< weighted mean of the paired difference
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.0;
  double mean_weight = 0.0;
  std::size_t n = 0;             ///< conclusive samples used
  std::size_t inconclusive = 0;  ///< samples that could not certify the radius
  bool pass = false;             ///< 0 lies inside the confidence interval
};

/// Paired test of E[W sum_v F(rho, v)] = E[W sum_v F(v, rho)], v over the
/// marked set.  The weight is normalized by its sample mean (ratio
/// estimator with delta-method variance).  A sample is conclusive when every
/// vertex within reach + radius - 1 of the root is complete.  Throws
/// TruncationInsufficient when more than 10% of samples are inconclusive and
/// DomainError when fewer than 1000 samples are requested.
MtpReport mc_mtp_test(const Sampler& sampler, const TransportFunction& F, const WeightFunction& W,
                      const MtpOptions& options);
/// Same test for several transports sharing one set of samples.
std::vector<MtpReport> mc_mtp_test(const Sampler& sampler, const std::vector<TransportFunction>& Fs,
                                   const WeightFunction& W, const MtpOptions& options);

/// Whether every vertex within `depth` of the root is complete.
bool conclusive(const MarkedGraph& graph, int root, int depth);

/// Marked graph with vertex v renamed perm[v].
MarkedGraph relabel(const MarkedGraph& graph, const std::vector<int>& perm);

// ---------------------------------------------------------------------------
// Samplers

enum class TargetRule { Start, Ball, All, BrwTrace };

struct TargetSpec {
  TargetRule rule = TargetRule::Start;
  int ball_radius = 1;  ///< for Ball
  /// Offspring law of the second walk for BrwTrace (defaults to the first).
  std::vector<double> second_offspring;
};

TargetRule parse_target_rule(const std::string& name);
std::string to_string(TargetRule rule);

/// Pull-back: a unimodular GW tree T of depth `depth`, a T-indexed walk X
/// from the identity, and marks X^{-1}(A), rooted at o.
///   Start     A = {e}
///   Ball      A = B_c(z) with z uniform in B_c(e), so e is uniform in A
///   All       A = V(G)
///   BrwTrace  A = X2(V(T2)) for an independent unimodular BRW from e;
///             preimage_count = #X2^{-1}(e)
Sampler pullback_sampler(const GroupSpec& g, const TargetSpec& target, const OffspringDistribution& mu, int depth,
                         std::size_t vertex_budget = 1'000'000);

/// Push-forward of A = V(T): the ball of radius `ball_radius` in G around
/// the identity, marked with X(V(T)), rooted at e; preimage_count =
/// #X^{-1}(e).  Vertices on the sphere of the ball are incomplete.
Sampler pushforward_sampler(const GroupSpec& g, const OffspringDistribution& mu, int depth, int ball_radius,
                            std::size_t vertex_budget = 1'000'000);

/// Root uniform on the marked vertices of a fixed finite graph.
Sampler uniform_root_sampler(MarkedGraph graph);
/// Root always `root`.
Sampler fixed_root_sampler(MarkedGraph graph, int root);

/// The ball of radius `radius` around the identity in the Cayley graph, with
/// the element of every vertex.  Vertex 0 is the identity.
struct CayleyBall {
  Graph graph;
  std::vector<Elem> elems;
  std::vector<int> dist;
};
CayleyBall cayley_ball(const GroupSpec& g, int radius);

}  // namespace brw
