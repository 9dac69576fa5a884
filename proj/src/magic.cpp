#include "brw/magic.hpp"

#include <algorithm>
#include <string>

#include "brw/errors.hpp"
#include "brw/tree_walk.hpp"

namespace brw {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::vector<char> mark_vector(std::size_t n, const std::vector<Vertex>& A) {
  std::vector<char> marked(n, 0);
  for (Vertex a : A) {
    if (a < 0 || static_cast<std::size_t>(a) >= n) throw DomainError("marked vertex id out of range");
    marked[static_cast<std::size_t>(a)] = 1;
  }
  return marked;
}

void check_kr(int k, int r) {
  if (k < 1) throw DomainError("k must be at least 1");
  if (r < 1) throw DomainError("r must be at least 1");
}

}  // namespace

OrientedTree::OrientedTree(const MarkedTree& tree, Vertex anchor) {
  const std::size_t n = tree.size();
  if (anchor < 0 || static_cast<std::size_t>(anchor) >= n) throw DomainError("anchor not in tree");
  const Graph g = Graph::from_tree(tree);
  parent_.assign(n, kRay);
  layer_.assign(n, -1);
  layer_[static_cast<std::size_t>(anchor)] = 0;
  std::vector<Vertex> queue{anchor};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    for (int w : g.neighbors(u)) {
      const auto wi = static_cast<std::size_t>(w);
      if (layer_[wi] != -1) continue;
      layer_[wi] = layer_[static_cast<std::size_t>(u)] + 1;
      parent_[wi] = u;
      queue.push_back(w);
    }
  }
  finish();
}

OrientedTree::OrientedTree(std::vector<Vertex> parent, std::vector<int> layer)
    : parent_(std::move(parent)), layer_(std::move(layer)) {
  if (parent_.size() != layer_.size()) throw DomainError("parent and layer arrays differ in length");
  for (std::size_t v = 0; v < parent_.size(); ++v) {
    const Vertex p = parent_[v];
    if (p == kRay) continue;
    if (p < 0 || static_cast<std::size_t>(p) >= parent_.size()) throw DomainError("parent id out of range");
    if (layer_[static_cast<std::size_t>(p)] != layer_[v] - 1) throw DomainError("layers must drop by one towards the ray");
  }
  finish();
}

void OrientedTree::finish() {
  const std::size_t n = parent_.size();
  children_.assign(n, {});
  ray_children_.clear();
  for (std::size_t v = 0; v < n; ++v) {
    if (parent_[v] == kRay)
      ray_children_.push_back(static_cast<Vertex>(v));
    else
      children_[static_cast<std::size_t>(parent_[v])].push_back(static_cast<Vertex>(v));
  }
  order_ = ray_children_;
  order_.reserve(n);
  for (std::size_t head = 0; head < order_.size(); ++head)
    for (Vertex c : children_[static_cast<std::size_t>(order_[head])]) order_.push_back(c);
  if (order_.size() != n) throw DomainError("parent array contains a cycle");
}

bool in_residue_class(int layer, int m, int r) noexcept { return ((layer - m) % r + r) % r == 0; }

OrientedTree auxiliary_tree(const OrientedTree& t, int m, int r) {
  if (r < 1) throw DomainError("r must be at least 1");
  if (m < 1 || m > r) throw DomainError("residue m must lie in 1..r");
  const std::size_t n = t.size();
  std::vector<Vertex> parent(n, kRay);
  std::vector<int> layer(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const int L = t.layer(static_cast<Vertex>(v));
    const int j = ((L - m - 1) % r + r) % r + 1;
    Vertex a = static_cast<Vertex>(v);
    for (int s = 0; s < j && a != kRay; ++s) a = t.parent(a);
    parent[v] = a;
    layer[v] = static_cast<int>(ceil_div(L - m, r)) + 1;
  }
  return OrientedTree(std::move(parent), std::move(layer));
}

std::vector<std::int64_t> branching_margins(const OrientedTree& t, const std::vector<Vertex>& A, int r) {
  if (r < 1) throw DomainError("r must be at least 1");
  if (A.empty()) throw DomainError("mark set A is empty");
  const std::size_t n = t.size();
  const auto marked = mark_vector(n, A);
  const auto R = static_cast<std::size_t>(r);

  // cnt[v*R + j]: marks in the subtree of v exactly j layers below v.
  std::vector<std::int64_t> cnt(n * R, 0);
  std::vector<std::int64_t> sub(n, 0);  // marks in the subtree of v, v included
  std::int64_t total = 0;
  for (auto it = t.order().rbegin(); it != t.order().rend(); ++it) {
    const auto v = static_cast<std::size_t>(*it);
    cnt[v * R] = marked[v];
    sub[v] = marked[v];
    total += marked[v];
    for (Vertex c : t.children(*it)) {
      const auto ci = static_cast<std::size_t>(c);
      sub[v] += sub[ci];
      for (std::size_t j = 1; j < R; ++j) cnt[v * R + j] += cnt[ci * R + j - 1];
    }
  }
  auto prefix = [&](std::size_t v, std::int64_t upto) {  // sum of cnt_j(v), j = 0..upto
    std::int64_t s = 0;
    for (std::int64_t j = 0; j <= upto; ++j) s += cnt[v * R + static_cast<std::size_t>(j)];
    return s;
  };

  std::vector<std::int64_t> margin(n, 0);
  std::vector<std::int64_t> far;
  for (std::size_t u = 0; u < n; ++u) {
    far.clear();
    std::int64_t sum = 0;
    for (Vertex c : t.children(static_cast<Vertex>(u))) {
      const auto ci = static_cast<std::size_t>(c);
      far.push_back(sub[ci] - prefix(ci, r - 2));
      sum += far.back();
    }
    // Marks outside u's subtree within distance r-1, reached through the
    // ancestors a_1..a_{r-1}.
    std::int64_t near_up = 0;
    std::size_t below = u;
    Vertex a = t.parent(static_cast<Vertex>(u));
    for (int i = 1; i <= r - 1 && a != kRay; ++i) {
      const auto ai = static_cast<std::size_t>(a);
      near_up += prefix(ai, r - 1 - i) - prefix(below, r - 2 - i);
      below = ai;
      a = t.parent(a);
    }
    far.push_back(total - sub[u] - near_up);
    sum += far.back();
    std::int64_t top1 = 0, top2 = 0;
    for (std::int64_t f : far) {
      if (f > top1) {
        top2 = top1;
        top1 = f;
      } else if (f > top2) {
        top2 = f;
      }
    }
    margin[u] = sum - top1 - top2;
  }
  return margin;
}

std::vector<Vertex> branching_vertices(const OrientedTree& t, const std::vector<Vertex>& A, int k, int r) {
  check_kr(k, r);
  const auto margin = branching_margins(t, A, r);
  std::vector<Vertex> out;
  for (std::size_t v = 0; v < margin.size(); ++v)
    if (margin[v] >= k) out.push_back(static_cast<Vertex>(v));
  return out;
}

std::vector<std::int64_t> supported_margins(const OrientedTree& t, const std::vector<Vertex>& A, int r) {
  if (r < 1) throw DomainError("r must be at least 1");
  const std::size_t n = t.size();
  const auto marked = mark_vector(n, A);
  std::vector<std::int64_t> margin(n, kNoDescendant);
  std::vector<std::int64_t> below(n);
  for (int m = 1; m <= r; ++m) {
    const OrientedTree aux = r == 1 ? t : auxiliary_tree(t, m, r);
    std::fill(below.begin(), below.end(), 0);
    for (auto it = aux.order().rbegin(); it != aux.order().rend(); ++it) {
      const auto v = static_cast<std::size_t>(*it);
      std::int64_t heaviest = kNoDescendant;
      for (Vertex c : aux.children(*it)) {
        const auto ci = static_cast<std::size_t>(c);
        below[v] += marked[ci] + below[ci];
        if (in_residue_class(t.layer(c), m, r)) heaviest = std::max(heaviest, below[ci]);
      }
      if (in_residue_class(t.layer(*it), m, r) && heaviest != kNoDescendant) margin[v] = below[v] - heaviest;
    }
  }
  return margin;
}

std::vector<Vertex> supported_vertices(const OrientedTree& t, const std::vector<Vertex>& A, int k, int r) {
  check_kr(k, r);
  const auto margin = supported_margins(t, A, r);
  std::vector<Vertex> out;
  for (std::size_t v = 0; v < margin.size(); ++v)
    if (margin[v] != kNoDescendant && margin[v] >= k) out.push_back(static_cast<Vertex>(v));
  return out;
}

std::int64_t magic_bound(std::size_t marks, int k, int r) {
  check_kr(k, r);
  return floor_div(static_cast<std::int64_t>(r) * (2 * static_cast<std::int64_t>(marks) - k), k);
}

BranchingReport magic_bound_check(const OrientedTree& t, const std::vector<Vertex>& A, int k, int r) {
  BranchingReport rep;
  rep.k = k;
  rep.r = r;
  rep.vertices = t.size();
  const auto marked = mark_vector(t.size(), A);
  rep.marks = static_cast<std::size_t>(std::count(marked.begin(), marked.end(), 1));
  rep.branching = branching_vertices(t, A, k, r);
  rep.supported = supported_vertices(t, A, k, r);
  rep.bound = magic_bound(rep.marks, k, r);
  rep.pass = static_cast<std::int64_t>(rep.branching.size()) <= std::max<std::int64_t>(rep.bound, 0);
  return rep;
}

EndsProfile ends_profile(const Graph& graph, const std::vector<int>& A, int center, int radius,
                         std::size_t m_threshold) {
  if (center < 0 || static_cast<std::size_t>(center) >= graph.size()) throw DomainError("center not in graph");
  if (radius < 0) throw DomainError("radius must be non-negative");
  if (m_threshold < 1) throw DomainError("m_threshold must be at least 1");
  const auto dist = graph.distances(center, radius);
  std::vector<char> removed(graph.size(), 0);
  for (std::size_t v = 0; v < graph.size(); ++v) removed[v] = dist[v] != -1;
  std::vector<int> id;
  const std::size_t count = graph.components(id, removed);
  EndsProfile out;
  out.components.resize(count);
  for (std::size_t v = 0; v < graph.size(); ++v)
    if (id[v] != -1) ++out.components[static_cast<std::size_t>(id[v])].size;
  std::vector<char> seen(graph.size(), 0);
  for (int a : A) {
    if (a < 0 || static_cast<std::size_t>(a) >= graph.size()) throw DomainError("marked vertex not in graph");
    const auto ai = static_cast<std::size_t>(a);
    if (seen[ai] || id[ai] == -1) continue;
    seen[ai] = 1;
    ++out.components[static_cast<std::size_t>(id[ai])].marked;
  }
  std::sort(out.components.begin(), out.components.end(), [](const ComponentSummary& x, const ComponentSummary& y) {
    return x.marked != y.marked ? x.marked > y.marked : x.size > y.size;
  });
  for (const auto& c : out.components)
    if (c.marked >= m_threshold) ++out.qualifying;
  return out;
}

EndsProfile ends_profile(const MarkedTree& tree, const std::vector<Vertex>& A, Vertex center, int radius,
                         std::size_t m_threshold) {
  return ends_profile(Graph::from_tree(tree), std::vector<int>(A.begin(), A.end()), center, radius, m_threshold);
}

EndsProfile ends_profile(const TraceGraph& trace, const std::vector<Elem>& A, const Elem& center, int radius,
                         std::size_t m_threshold) {
  if (!trace.contains(center)) throw DomainError("center not in trace");
  std::vector<int> marks;
  for (const Elem& a : A)
    if (trace.contains(a)) marks.push_back(static_cast<int>(trace.index_of(a)));
  return ends_profile(Graph::from_trace(trace), marks, static_cast<int>(trace.index_of(center)), radius,
                      m_threshold);
}

}  // namespace brw
