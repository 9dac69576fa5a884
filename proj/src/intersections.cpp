#include "brw/intersections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "brw/errors.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"
#include "brw/tree_walk.hpp"

namespace brw {

std::vector<long double> expected_pairs_series(double mean1, double mean2, const GroupSpec& g, const Elem& x,
                                               const Elem& y, int N) {
  if (N < 0) throw DomainError("N must be non-negative");
  if (!(mean1 >= 0.0) || !(mean2 >= 0.0)) throw DomainError("means must be non-negative");
  const auto p = transition_column(g, x, y, 2 * N);
  const auto n_terms = static_cast<std::size_t>(N) + 1;
  std::vector<long double> pa(n_terms, 1.0L);
  std::vector<long double> pb(n_terms, 1.0L);
  for (std::size_t n = 1; n < n_terms; ++n) {
    pa[n] = pa[n - 1] * mean1;
    pb[n] = pb[n - 1] * mean2;
  }
  auto term = [&](std::size_t n, std::size_t m) {
    const long double q = p[n + m];
    return q == 0.0L ? 0.0L : pa[n] * pb[m] * q;
  };
  std::vector<long double> out;
  out.reserve(n_terms);
  CompensatedSum<long double> total;
  for (std::size_t K = 0; K < n_terms; ++K) {
    // New terms of the square [0,K]^2: the row m = K and the column n = K.
    CompensatedSum<long double> inc;
    for (std::size_t n = 0; n <= K; ++n) inc.add(term(n, K));
    for (std::size_t m = 0; m < K; ++m) inc.add(term(K, m));
    total.add(inc.value());
    out.push_back(total.value());
  }
  return out;
}

long double expected_pairs_truncated(double mean1, double mean2, const GroupSpec& g, const Elem& x, const Elem& y,
                                     int N) {
  return expected_pairs_series(mean1, mean2, g, x, y, N).back();
}

IntersectionRecord sample_intersections(const OffspringDistribution& mu1, const OffspringDistribution& mu2,
                                        const GroupSpec& g, const Elem& x, const Elem& y, int N1, int N2, Rng& rng,
                                        std::size_t vertex_budget) {
  if (N1 < 0 || N2 < 0) throw DomainError("depth cutoffs must be non-negative");
  IntersectionRecord rec;
  rec.mean1 = mu1.mean();
  rec.mean2 = mu2.mean();
  rec.depth1 = N1;
  rec.depth2 = N2;
  rec.tree1 = sample_gw(mu1, GwLimits{vertex_budget, N1}, rng);
  const TreeWalk walk1 = run_walk(rec.tree1, g, x, rng);
  const MarkedTree tree2 = sample_gw(mu2, GwLimits{vertex_budget, N2}, rng);
  const TreeWalk walk2 = run_walk(tree2, g, y, rng);
  rec.reached1 = rec.tree1.height();
  rec.reached2 = tree2.height();
  rec.truncated = rec.tree1.truncated() || tree2.truncated();

  std::unordered_map<Elem, std::uint64_t, ElemHash> visits2;
  for (const Elem& z : walk2.values) ++visits2[z];
  std::unordered_map<Elem, char, ElemHash> shared;
  for (std::size_t u = 0; u < walk1.size(); ++u) {
    auto it = visits2.find(walk1.values[u]);
    if (it == visits2.end()) continue;
    rec.pair_count += it->second;
    rec.pulled.push_back(static_cast<Vertex>(u));
    shared.emplace(walk1.values[u], 1);
  }
  for (const auto& kv : shared) rec.I.push_back(kv.first);
  std::sort(rec.I.begin(), rec.I.end());
  return rec;
}

ThinnedSweep thinned_intersection_sweep(const OffspringDistribution& mu1, const OffspringDistribution& mu2,
                                        const GroupSpec& g, const std::vector<double>& p_grid, int depth,
                                        std::size_t replicates, std::uint64_t seed, unsigned workers,
                                        std::size_t vertex_budget) {
  if (p_grid.empty()) throw DomainError("p grid is empty");
  for (double p : p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p grid entries must lie in [0,1]");
  if (depth < 0) throw DomainError("depth must be non-negative");
  g.validate();
  const Elem e = identity(g);

  ThinnedSweep out;
  out.p_grid = p_grid;
  out.replicates.resize(replicates);
  std::vector<char> violated(replicates, 0);
  parallel_for(replicates, workers, [&](std::size_t r) {
    Rng rng = substream(seed, r);
    MarkedTree tree1 = sample_gw(mu1, GwLimits{vertex_budget, depth}, rng);
    const TreeWalk walk1 = run_walk(tree1, g, e, rng);
    MarkedTree tree2 = sample_gw(mu2, GwLimits{vertex_budget, depth}, rng);
    const TreeWalk walk2 = run_walk(tree2, g, e, rng);
    ensure_edge_labels(tree1, rng);
    ensure_edge_labels(tree2, rng);

    ThinnedReplicate rep;
    rep.truncated = tree1.truncated() || tree2.truncated();
    for (double p : p_grid) {
      ThinnedPoint point;
      point.p = p;
      std::unordered_map<Elem, std::uint64_t, ElemHash> visits2;
      for (Vertex v : root_component(tree2, p)) ++visits2[walk2[v]];
      for (Vertex u : root_component(tree1, p)) {
        auto it = visits2.find(walk1[u]);
        if (it == visits2.end()) continue;
        point.pair_count += it->second;
        point.pulled.push_back(u);
      }
      std::sort(point.pulled.begin(), point.pulled.end());
      rep.points.push_back(std::move(point));
    }
    for (std::size_t i = 0; i < rep.points.size(); ++i)
      for (std::size_t j = 0; j < rep.points.size(); ++j)
        if (rep.points[i].p <= rep.points[j].p &&
            !std::includes(rep.points[j].pulled.begin(), rep.points[j].pulled.end(), rep.points[i].pulled.begin(),
                           rep.points[i].pulled.end()))
          violated[r] = 1;
    out.replicates[r] = std::move(rep);
  });
  out.inclusion_violations = static_cast<std::size_t>(std::count(violated.begin(), violated.end(), 1));
  return out;
}

std::string to_string(EndsVerdict verdict) {
  switch (verdict) {
    case EndsVerdict::Empty: return "finite/empty";
    case EndsVerdict::AtMostTwoEndsCompatible: return "at-most-two-ends-compatible";
    case EndsVerdict::ThreeOrMoreEndsCompatible: return "three-or-more-ends-compatible";
  }
  return "?";
}

EndsDiagnostic intersection_ends_diagnostic(const MarkedTree& tree1, const std::vector<Vertex>& I,
                                            const std::vector<int>& k_grid, const std::vector<int>& r_grid) {
  if (k_grid.empty() || r_grid.empty()) throw DomainError("k and r grids must be nonempty");
  EndsDiagnostic out;
  std::vector<Vertex> marks = I;
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  out.marks = marks.size();
  if (marks.empty()) return out;
  const OrientedTree oriented(tree1);
  std::vector<char> in_I(tree1.size(), 0);
  for (Vertex v : marks) in_I.at(static_cast<std::size_t>(v)) = 1;
  const int k_max = *std::max_element(k_grid.begin(), k_grid.end());
  bool wide = false;
  for (int r : r_grid) {
    const auto margin = branching_margins(oriented, marks, r);
    for (int k : k_grid) {
      if (k < 1) throw DomainError("k must be at least 1");
      EndsCensusEntry entry;
      entry.k = k;
      entry.r = r;
      for (std::size_t v = 0; v < margin.size(); ++v) {
        if (margin[v] < k) continue;
        ++entry.branching;
        if (in_I[v]) ++entry.branching_in_I;
      }
      entry.root_fraction = static_cast<double>(entry.branching_in_I) / static_cast<double>(marks.size());
      entry.bound = 2.0 * r / k;
      entry.within_bound = entry.root_fraction <= entry.bound;
      if (k == k_max && entry.branching > 0) wide = true;
      out.census.push_back(entry);
    }
  }
  out.verdict = wide ? EndsVerdict::ThreeOrMoreEndsCompatible : EndsVerdict::AtMostTwoEndsCompatible;
  return out;
}

EndsDiagnostic intersection_ends_diagnostic(const IntersectionRecord& record, const std::vector<int>& k_grid,
                                            const std::vector<int>& r_grid) {
  return intersection_ends_diagnostic(record.tree1, record.pulled, k_grid, r_grid);
}

TraceEndsResult trace_ends_experiment(const OffspringDistribution& mu, const GroupSpec& g, int depth,
                                      const std::vector<int>& radius_grid, std::size_t m_threshold,
                                      std::size_t replicates, std::uint64_t seed, unsigned workers,
                                      std::size_t vertex_budget) {
  if (radius_grid.empty()) throw DomainError("radius grid is empty");
  if (depth < 0) throw DomainError("depth must be non-negative");
  if (m_threshold < 1) throw DomainError("m_threshold must be at least 1");
  g.validate();
  const Elem e = identity(g);
  TraceEndsResult out;
  out.radius_grid = radius_grid;
  out.replicates.resize(replicates);
  parallel_for(replicates, workers, [&](std::size_t i) {
    Rng rng = substream(seed, i);
    const MarkedTree tree = sample_gw(mu, GwLimits{vertex_budget, depth}, rng);
    const TreeWalk walk = run_walk(tree, g, e, rng);
    const TraceGraph tr(walk);
    TraceEndsReplicate rep;
    rep.survived = tree.height() >= depth;
    rep.truncated = tree.truncated();
    std::vector<std::size_t> below(tree.size(), 0);
    for (std::size_t v = tree.size(); v-- > 1;)
      below[static_cast<std::size_t>(tree.parent(static_cast<Vertex>(v)))] += below[v] + 1;
    for (int radius : radius_grid) {
      rep.qualifying.push_back(ends_profile(tr, tr.vertices(), e, radius, m_threshold).qualifying);
      std::size_t m = 0;
      for (std::size_t v = 0; v < tree.size(); ++v)
        if (tree.depth(static_cast<Vertex>(v)) == radius && below[v] >= m_threshold) ++m;
      rep.M.push_back(m);
    }
    out.replicates[i] = std::move(rep);
  });
  for (std::size_t k = 0; k < radius_grid.size(); ++k) {
    std::vector<std::size_t> values;
    for (const auto& rep : out.replicates)
      if (rep.survived) values.push_back(rep.qualifying[k]);
    if (values.empty()) {
      out.median_surviving.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    std::sort(values.begin(), values.end());
    const std::size_t h = values.size() / 2;
    out.median_surviving.push_back(values.size() % 2 ? static_cast<double>(values[h])
                                                     : 0.5 * static_cast<double>(values[h - 1] + values[h]));
  }
  out.non_decreasing = !out.median_surviving.empty();
  for (std::size_t k = 0; k < out.median_surviving.size(); ++k) {
    if (std::isnan(out.median_surviving[k])) out.non_decreasing = false;
    if (k > 0 && out.median_surviving[k] < out.median_surviving[k - 1]) out.non_decreasing = false;
  }
  return out;
}

}  // namespace brw
