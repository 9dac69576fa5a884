#include "brw/graph.hpp"

#include <algorithm>

#include "brw/errors.hpp"
#include "brw/tree_walk.hpp"

namespace brw {

std::size_t Graph::add_vertex() {
  adj_.emplace_back();
  return adj_.size() - 1;
}

void Graph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= size() || static_cast<std::size_t>(v) >= size())
    throw DomainError("edge endpoint out of range");
  if (u == v) throw DomainError("self-loops are not supported");
  if (has_edge(u, v)) return;
  adj_[static_cast<std::size_t>(u)].push_back(v);
  adj_[static_cast<std::size_t>(v)].push_back(u);
}

bool Graph::has_edge(int u, int v) const {
  const auto& a = neighbors(u);
  return std::find(a.begin(), a.end(), v) != a.end();
}

std::size_t Graph::edge_count() const noexcept {
  std::size_t twice = 0;
  for (const auto& a : adj_) twice += a.size();
  return twice / 2;
}

std::vector<int> Graph::distances(int src, int max_radius) const {
  std::vector<int> dist(size(), -1);
  dist.at(static_cast<std::size_t>(src)) = 0;
  std::vector<int> queue{src};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    const int du = dist[static_cast<std::size_t>(u)];
    if (du >= max_radius) continue;
    for (int w : adj_[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(w)] != -1) continue;
      dist[static_cast<std::size_t>(w)] = du + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

std::size_t Graph::components(std::vector<int>& id, const std::vector<char>& removed) const {
  id.assign(size(), -1);
  std::size_t count = 0;
  std::vector<int> stack;
  for (std::size_t s = 0; s < size(); ++s) {
    if (id[s] != -1 || (!removed.empty() && removed[s])) continue;
    id[s] = static_cast<int>(count);
    stack.assign(1, static_cast<int>(s));
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : adj_[static_cast<std::size_t>(u)]) {
        const auto wi = static_cast<std::size_t>(w);
        if (id[wi] != -1 || (!removed.empty() && removed[wi])) continue;
        id[wi] = static_cast<int>(count);
        stack.push_back(w);
      }
    }
    ++count;
  }
  return count;
}

Graph Graph::from_tree(const MarkedTree& tree) {
  Graph g(tree.size());
  for (std::size_t v = 1; v < tree.size(); ++v) {
    const auto vv = static_cast<Vertex>(v);
    g.adj_[v].push_back(tree.parent(vv));
    g.adj_[static_cast<std::size_t>(tree.parent(vv))].push_back(vv);
  }
  return g;
}

Graph Graph::from_trace(const TraceGraph& trace) {
  Graph g(trace.vertex_count());
  for (const auto& [edge, m] : trace.edges()) {
    (void)m;
    g.add_edge(static_cast<int>(edge.first), static_cast<int>(edge.second));
  }
  return g;
}

std::vector<int> MarkedGraph::marked_vertices() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < marked.size(); ++v)
    if (marked[v]) out.push_back(static_cast<int>(v));
  return out;
}

MarkedGraph MarkedGraph::from_tree(const MarkedTree& tree) {
  MarkedGraph mg{Graph::from_tree(tree), std::vector<char>(tree.size(), 0), std::vector<char>(tree.size(), 1)};
  for (std::size_t v = 0; v < tree.size(); ++v) {
    mg.marked[v] = tree.is_marked(static_cast<Vertex>(v)) ? 1 : 0;
    mg.complete[v] = tree.is_open(static_cast<Vertex>(v)) ? 0 : 1;
  }
  return mg;
}

}  // namespace brw
