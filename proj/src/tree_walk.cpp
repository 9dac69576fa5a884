#include "brw/tree_walk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brw/errors.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"

namespace brw {

std::vector<Vertex> TreeWalk::preimage(const Elem& x) const {
  std::vector<Vertex> out;
  for (std::size_t v = 0; v < values.size(); ++v)
    if (values[v] == x) out.push_back(static_cast<Vertex>(v));
  return out;
}

TreeWalk run_walk(const MarkedTree& tree, const GroupSpec& g, const Elem& start, Rng& rng) {
  g.validate();
  validate(g, start);
  TreeWalk walk{g, start, std::vector<Vertex>(tree.size()), std::vector<Elem>(tree.size())};
  const auto deg = static_cast<std::uint64_t>(g.degree());
  for (Vertex v : tree.bfs_order()) {
    const auto i = static_cast<std::size_t>(v);
    walk.parent[i] = tree.parent(v);
    if (v == tree.root())
      walk.values[i] = start;
    else
      walk.values[i] = step(g, walk.values[static_cast<std::size_t>(tree.parent(v))],
                            static_cast<int>(uniform_below(rng, deg)));
  }
  return walk;
}

TraceGraph::TraceGraph(const TreeWalk& walk) : group_(walk.group) {
  // Breadth-first over the index tree gives a first-visit order that starts
  // at X(o) and only ever adds vertices adjacent to visited ones.
  std::vector<std::vector<Vertex>> children(walk.size());
  for (std::size_t v = 1; v < walk.size(); ++v) {
    if (walk.parent[v] == kNoVertex) throw DomainError("walk has more than one root");
    children[static_cast<std::size_t>(walk.parent[v])].push_back(static_cast<Vertex>(v));
  }
  auto visit = [&](const Elem& x) {
    auto [it, inserted] = index_.try_emplace(x, vertices_.size());
    if (inserted) {
      vertices_.push_back(x);
      visits_.push_back(0);
    }
    ++visits_[it->second];
    return it->second;
  };
  if (walk.size() == 0) return;
  std::vector<std::pair<Vertex, std::size_t>> queue{{0, visit(walk.values[0])}};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [v, vi] = queue[head];
    for (Vertex c : children[static_cast<std::size_t>(v)]) {
      const std::size_t ci = visit(walk.values[static_cast<std::size_t>(c)]);
      ++edges_[{std::min(vi, ci), std::max(vi, ci)}];
      queue.emplace_back(c, ci);
    }
  }
}

std::size_t TraceGraph::index_of(const Elem& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) throw DomainError("element not in trace");
  return it->second;
}

std::size_t TraceGraph::visits(const Elem& x) const {
  auto it = index_.find(x);
  return it == index_.end() ? 0 : visits_[it->second];
}

std::size_t TraceGraph::multiplicity(const Elem& x, const Elem& y) const {
  auto ix = index_.find(x);
  auto iy = index_.find(y);
  if (ix == index_.end() || iy == index_.end()) return 0;
  auto it = edges_.find({std::min(ix->second, iy->second), std::max(ix->second, iy->second)});
  return it == edges_.end() ? 0 : it->second;
}

std::string TraceGraph::to_edge_list() const {
  std::ostringstream out;
  for (const auto& [edge, m] : edges_)
    out << to_string(group_, vertices_[edge.first]) << ' ' << to_string(group_, vertices_[edge.second]) << ' ' << m
        << '\n';
  return out.str();
}

TraceGraph trace(const TreeWalk& walk) { return TraceGraph(walk); }

OriginVisitResult origin_visit_experiment(const OffspringDistribution& mu, const GroupSpec& g, const Elem& start,
                                          int depth_budget, std::size_t replicates, std::uint64_t seed,
                                          unsigned workers, std::size_t vertex_budget) {
  if (depth_budget < 1) throw DomainError("depth budget must be at least 1");
  if (replicates < 1) throw DomainError("need at least one replicate");
  g.validate();
  validate(g, start);
  const auto depths = static_cast<std::size_t>(depth_budget) + 1;

  OriginVisitResult result;
  result.replicates.resize(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    Rng rng = substream(seed, r);
    const MarkedTree tree = sample_gw(mu, GwLimits{vertex_budget, depth_budget}, rng);
    const TreeWalk walk = run_walk(tree, g, start, rng);
    OriginVisitReplicate rep;
    rep.counts.assign(depths, 0);
    rep.survived.assign(depths, 0);
    rep.truncated = tree.truncated();
    for (std::size_t v = 0; v < tree.size(); ++v) {
      const auto d = static_cast<std::size_t>(tree.depth(static_cast<Vertex>(v)));
      rep.survived[d] = 1;
      if (walk.values[v] == start) ++rep.counts[d];
    }
    for (std::size_t n = 1; n < depths; ++n) rep.counts[n] += rep.counts[n - 1];
    result.replicates[r] = std::move(rep);
  });

  for (std::size_t n = 0; n < depths; ++n) {
    RunningStats all;
    RunningStats surviving;
    for (const auto& rep : result.replicates) {
      const auto c = static_cast<double>(rep.counts[n]);
      all.add(c);
      if (rep.survived[n]) surviving.add(c);
    }
    result.per_depth.push_back({static_cast<int>(n), all.mean(), all.std_error(), surviving.count(),
                                surviving.mean(), surviving.std_error()});
  }
  const auto& last = result.per_depth.back();
  const auto& mid = result.per_depth[depths / 2];
  const double gap = last.mean_survived - mid.mean_survived;
  const double se = std::hypot(last.se_survived, mid.se_survived);
  if (last.survivors > 1 && gap > 0.1 * mid.mean_survived && gap > 4.0 * se) result.trend = VisitTrend::Grows;
  return result;
}

}  // namespace brw
