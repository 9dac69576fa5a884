#include "brw/gw_trees.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "brw/errors.hpp"

namespace brw {

OffspringDistribution::OffspringDistribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw DomainError("offspring pmf is empty");
  if (pmf_.size() > kMaxSupport) throw DomainError("offspring support exceeds 64");
  long double total = 0.0L;
  long double mean = 0.0L;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    if (!(pmf_[k] >= 0.0) || !std::isfinite(pmf_[k])) throw DomainError("offspring pmf entries must be >= 0");
    total += pmf_[k];
    mean += static_cast<long double>(k) * pmf_[k];
  }
  if (std::fabs(static_cast<double>(total - 1.0L)) > 1e-12) throw DomainError("offspring pmf must sum to 1");
  while (pmf_.size() > 1 && pmf_.back() == 0.0) pmf_.pop_back();
  mean_ = static_cast<double>(mean);
  cdf_.resize(pmf_.size());
  long double acc = 0.0L;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    acc += pmf_[k];
    cdf_[k] = static_cast<double>(acc);
  }
}

OffspringDistribution OffspringDistribution::dirac(int k) {
  if (k < 0 || static_cast<std::size_t>(k) >= kMaxSupport) throw DomainError("dirac offspring out of range");
  std::vector<double> pmf(static_cast<std::size_t>(k) + 1, 0.0);
  pmf.back() = 1.0;
  return OffspringDistribution(std::move(pmf));
}

int OffspringDistribution::sample(Rng& rng) const noexcept {
  const double u = uniform01(rng);
  for (std::size_t k = 0; k + 1 < cdf_.size(); ++k)
    if (u < cdf_[k]) return static_cast<int>(k);
  return static_cast<int>(cdf_.size()) - 1;
}

OffspringDistribution thin(const OffspringDistribution& mu, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("thinning probability must lie in [0,1]");
  const auto& src = mu.pmf();
  const std::size_t K = src.size();
  std::vector<long double> out(K, 0.0L);
  for (std::size_t n = 0; n < K; ++n) {
    if (src[n] == 0.0) continue;
    // Binomial(n, p) weights built by the multiplicative recurrence.
    long double binom = 1.0L;
    for (std::size_t k = 0; k <= n; ++k) {
      const long double w = binom * std::pow(static_cast<long double>(p), static_cast<long double>(k)) *
                            std::pow(1.0L - p, static_cast<long double>(n - k));
      out[k] += w * src[n];
      binom = binom * static_cast<long double>(n - k) / static_cast<long double>(k + 1);
    }
  }
  long double total = 0.0L;
  for (long double v : out) total += v;
  std::vector<double> pmf(K);
  for (std::size_t k = 0; k < K; ++k) pmf[k] = static_cast<double>(out[k] / total);
  return OffspringDistribution(std::move(pmf));
}

double extinction_probability(const OffspringDistribution& mu) {
  if (!mu.nontrivial()) return 0.0;
  if (mu.mean() <= 1.0 + 1e-12) return 1.0;
  const auto& pmf = mu.pmf();
  auto f = [&](long double s) {
    long double acc = 0.0L;
    for (std::size_t k = pmf.size(); k-- > 0;) acc = acc * s + pmf[k];
    return acc;
  };
  long double q = 0.0L;
  for (std::size_t it = 0; it < 100'000'000; ++it) {
    const long double next = f(q);
    const bool done = std::fabs(static_cast<double>(next - q)) < 1e-12;
    q = next;
    if (done) break;
  }
  return static_cast<double>(q);
}

// ---------------------------------------------------------------------------

MarkedTree::MarkedTree()
    : parent_{kNoVertex}, children_(1), depth_{0}, marked_{0}, open_{0} {}

Vertex MarkedTree::add_child(Vertex parent) {
  if (parent < 0 || static_cast<std::size_t>(parent) >= size()) throw DomainError("parent id out of range");
  if (size() >= static_cast<std::size_t>(std::numeric_limits<Vertex>::max()))
    throw DomainError("tree too large");
  const auto v = static_cast<Vertex>(size());
  parent_.push_back(parent);
  children_.emplace_back();
  children_[idx(parent)].push_back(v);
  depth_.push_back(depth_[idx(parent)] + 1);
  marked_.push_back(0);
  open_.push_back(0);
  if (!labels_.empty()) labels_.push_back(1.0);
  return v;
}

int MarkedTree::height() const noexcept { return *std::max_element(depth_.begin(), depth_.end()); }

std::vector<std::size_t> MarkedTree::generation_sizes() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(height()) + 1, 0);
  for (int d : depth_) ++out[static_cast<std::size_t>(d)];
  return out;
}

void MarkedTree::clear_marks() { std::fill(marked_.begin(), marked_.end(), 0); }

std::vector<Vertex> MarkedTree::marked_vertices() const {
  std::vector<Vertex> out;
  for (std::size_t v = 0; v < size(); ++v)
    if (marked_[v]) out.push_back(static_cast<Vertex>(v));
  return out;
}

std::size_t MarkedTree::marked_count() const noexcept {
  return static_cast<std::size_t>(std::count(marked_.begin(), marked_.end(), 1));
}

void MarkedTree::set_labels(std::vector<double> labels) {
  if (!labels.empty() && labels.size() != size()) throw DomainError("need one label per vertex");
  for (std::size_t v = 1; v < labels.size(); ++v)
    if (!(labels[v] >= 0.0 && labels[v] <= 1.0)) throw DomainError("edge labels must lie in [0,1]");
  labels_ = std::move(labels);
}

std::vector<Vertex> MarkedTree::bfs_order() const {
  std::vector<Vertex> order;
  order.reserve(size());
  order.push_back(root());
  for (std::size_t head = 0; head < order.size(); ++head)
    for (Vertex c : children_[idx(order[head])]) order.push_back(c);
  return order;
}

MarkedTree MarkedTree::from_parents(const std::vector<Vertex>& parents) {
  if (parents.empty() || parents[0] != kNoVertex) throw DomainError("vertex 0 must be the root");
  MarkedTree t;
  for (std::size_t v = 1; v < parents.size(); ++v) {
    if (parents[v] < 0 || static_cast<std::size_t>(parents[v]) >= v)
      throw DomainError("parent ids must precede their children");
    t.add_child(parents[v]);
  }
  return t;
}

std::string MarkedTree::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "# brw-tree v1 n=" << size() << " truncated=" << (truncated_ ? 1 : 0) << '\n';
  for (std::size_t v = 0; v < size(); ++v) {
    out << v << ' ' << parent_[v] << ' ' << depth_[v] << ' ' << int(marked_[v]) << ' ';
    if (labels_.empty() || v == 0)
      out << '-';
    else
      out << labels_[v];
    out << '\n';
  }
  return out.str();
}

MarkedTree MarkedTree::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  bool truncated = false;
  std::vector<Vertex> parents;
  std::vector<int> marks;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("truncated=1") != std::string::npos) truncated = true;
      continue;
    }
    std::istringstream row(line);
    long long id = 0, parent = 0;
    int depth = 0, mark = 0;
    std::string label;
    if (!(row >> id >> parent >> depth >> mark >> label)) throw DomainError("malformed tree line: " + line);
    if (id != static_cast<long long>(parents.size())) throw DomainError("tree ids must be consecutive");
    parents.push_back(static_cast<Vertex>(parent));
    marks.push_back(mark);
    labels.push_back(label);
  }
  MarkedTree t = from_parents(parents);
  t.set_truncated(truncated);
  for (std::size_t v = 0; v < marks.size(); ++v) t.set_marked(static_cast<Vertex>(v), marks[v] != 0);
  if (labels.size() > 1 && labels[1] != "-") {
    std::vector<double> values(labels.size(), 1.0);
    for (std::size_t v = 1; v < labels.size(); ++v) values[v] = std::stod(labels[v]);
    t.set_labels(std::move(values));
  }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

// Continues breadth-first generation from vertex `first` onward.
void grow(MarkedTree& t, const OffspringDistribution& mu, const GwLimits& limits, Rng& rng, std::size_t first) {
  for (std::size_t i = first; i < t.size(); ++i) {
    const auto v = static_cast<Vertex>(i);
    if (t.depth(v) >= limits.max_depth) {
      t.set_open(v);
      continue;
    }
    const int k = mu.sample(rng);
    for (int c = 0; c < k; ++c) {
      if (t.size() >= limits.vertex_budget) {
        t.set_truncated(true);
        for (std::size_t w = i; w < t.size(); ++w) t.set_open(static_cast<Vertex>(w));
        return;
      }
      t.add_child(v);
    }
  }
}

}  // namespace

MarkedTree sample_gw(const OffspringDistribution& mu, std::size_t budget, Rng& rng) {
  return sample_gw(mu, GwLimits{budget, std::numeric_limits<int>::max()}, rng);
}

MarkedTree sample_gw(const OffspringDistribution& mu, const GwLimits& limits, Rng& rng) {
  if (limits.vertex_budget < 1) throw DomainError("vertex budget must be at least 1");
  if (limits.max_depth < 0) throw DomainError("max_depth must be non-negative");
  MarkedTree t;
  grow(t, mu, limits, rng, 0);
  return t;
}

MarkedTree sample_unimodular_gw(const OffspringDistribution& mu, std::size_t budget, Rng& rng, GwVariant variant,
                                std::size_t retry_limit) {
  return sample_unimodular_gw(mu, GwLimits{budget, std::numeric_limits<int>::max()}, rng, variant, retry_limit);
}

MarkedTree sample_unimodular_gw(const OffspringDistribution& mu, const GwLimits& limits, Rng& rng, GwVariant variant,
                                std::size_t retry_limit) {
  if (limits.vertex_budget < 2) throw DomainError("vertex budget must be at least 2");
  if (limits.max_depth < 0) throw DomainError("max_depth must be non-negative");
  int k = 0;
  if (variant == GwVariant::Augmented) {
    k = mu.sample(rng);
  } else {
    std::size_t tries = 0;
    for (;;) {
      if (tries++ >= retry_limit) throw SamplingFailure("root-degree rejection exceeded the retry limit");
      k = mu.sample(rng);
      if (uniform01(rng) * (k + 1) < 1.0) break;
    }
  }
  MarkedTree t;
  if (limits.max_depth == 0) {
    t.set_open(t.root());
    return t;
  }
  // o's own children first, then o' as the last child.
  for (int c = 0; c <= k; ++c) {
    if (t.size() >= limits.vertex_budget) {
      t.set_truncated(true);
      for (std::size_t w = 0; w < t.size(); ++w) t.set_open(static_cast<Vertex>(w));
      return t;
    }
    t.add_child(t.root());
  }
  grow(t, mu, limits, rng, 1);
  return t;
}

// ---------------------------------------------------------------------------

void ensure_edge_labels(MarkedTree& tree, Rng& rng) {
  if (tree.has_labels()) return;
  std::vector<double> labels(tree.size(), 1.0);
  for (std::size_t v = 1; v < labels.size(); ++v) labels[v] = 1.0 - uniform01(rng);
  tree.set_labels(std::move(labels));
}

std::vector<Vertex> root_component(const MarkedTree& tree, double p) {
  if (!tree.has_labels()) throw DomainError("tree has no edge labels");
  std::vector<Vertex> out{tree.root()};
  for (std::size_t head = 0; head < out.size(); ++head)
    for (Vertex c : tree.children(out[head]))
      if (tree.label(c) <= p) out.push_back(c);
  return out;
}

MarkedTree induced_subtree(const MarkedTree& tree, const std::vector<Vertex>& vertices) {
  if (vertices.empty() || vertices[0] != tree.root()) throw DomainError("subtree must start at the root");
  std::vector<Vertex> new_id(tree.size(), kNoVertex);
  new_id[0] = 0;
  MarkedTree out;
  std::vector<double> labels;
  if (tree.has_labels()) labels.push_back(1.0);
  out.set_marked(0, tree.is_marked(0));
  out.set_open(0, tree.is_open(0));
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const Vertex v = vertices[i];
    const Vertex p = tree.parent(v);
    if (p == kNoVertex || new_id[static_cast<std::size_t>(p)] == kNoVertex)
      throw DomainError("subtree vertices must list parents before children");
    const Vertex w = out.add_child(new_id[static_cast<std::size_t>(p)]);
    new_id[static_cast<std::size_t>(v)] = w;
    out.set_marked(w, tree.is_marked(v));
    out.set_open(w, tree.is_open(v));
    if (tree.has_labels()) labels.push_back(tree.label(v));
  }
  if (tree.has_labels()) out.set_labels(std::move(labels));
  out.set_truncated(tree.truncated());
  return out;
}

MarkedTree percolate_root_component(MarkedTree& tree, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percolation parameter must lie in [0,1]");
  ensure_edge_labels(tree, rng);
  return induced_subtree(tree, root_component(tree, p));
}

}  // namespace brw
