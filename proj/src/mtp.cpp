#include "brw/mtp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>
#include <unordered_set>

#include "brw/errors.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"
#include "brw/tree_walk.hpp"

namespace brw {

// ---------------------------------------------------------------------------
// Transport and weight functions

TransportFunction builtin_transport(const std::string& name, int R) {
  if (R < 1) throw ConfigError("transport radius must be at least 1");
  if (name == "adjacency")
    return {name, 1, 1, [](const MarkedGraph&, int, int, int dist) { return dist == 1 ? 1.0 : 0.0; }};
  if (name == "distinct")
    return {name, kUnboundedReach, 0, [](const MarkedGraph&, int u, int v, int) { return u != v ? 1.0 : 0.0; }};
  if (name == "other-leaf")
    return {name, kUnboundedReach, 1, [](const MarkedGraph& g, int u, int v, int) {
              return u != v && g.graph.degree(v) == 1 ? 1.0 : 0.0;
            }};
  if (name == "leaf-target")
    return {name, R, 1, [R](const MarkedGraph& g, int, int v, int dist) {
              return dist >= 0 && dist <= R && g.graph.degree(v) == 1 ? 1.0 : 0.0;
            }};
  if (name == "degree-ratio")
    return {name, 1, 1, [](const MarkedGraph& g, int u, int v, int dist) {
              return dist == 1 ? static_cast<double>(g.graph.degree(v)) / g.graph.degree(u) : 0.0;
            }};
  if (name == "marked-neighbors")
    return {name, R, 1, [R](const MarkedGraph& g, int, int v, int dist) {
              if (dist < 0 || dist > R) return 0.0;
              double count = 0.0;
              for (int w : g.graph.neighbors(v)) count += g.marked[static_cast<std::size_t>(w)] ? 1.0 : 0.0;
              return count;
            }};
  if (name == "nearest-marked")
    return {name, R, R, [R](const MarkedGraph& g, int u, int v, int dist) {
              if (u == v || dist < 1 || dist > R || !g.marked[static_cast<std::size_t>(v)]) return 0.0;
              const auto d = g.graph.distances(u, dist);
              // v is nearest iff no marked vertex other than u is strictly closer.
              std::size_t ties = 0;
              for (std::size_t w = 0; w < d.size(); ++w) {
                if (d[w] < 1 || !g.marked[w]) continue;
                if (d[w] < dist) return 0.0;
                if (d[w] == dist) ++ties;
              }
              return 1.0 / static_cast<double>(ties);
            }};
  throw ConfigError("unknown transport function '" + name + "'");
}

std::vector<std::string> builtin_transport_names() {
  return {"adjacency", "leaf-target", "nearest-marked", "degree-ratio", "marked-neighbors", "distinct", "other-leaf"};
}

WeightFunction builtin_weight(const std::string& name) {
  if (name == "one") return {name, [](const MtpSample&) { return 1.0; }};
  if (name == "inverse-preimage")
    return {name, [](const MtpSample& s) {
              if (s.preimage_count == 0) throw DomainError("root has an empty preimage");
              return 1.0 / static_cast<double>(s.preimage_count);
            }};
  throw ConfigError("unknown weight function '" + name + "'");
}

// ---------------------------------------------------------------------------
// Exact check

ExactMtpResult exact_mtp_check(const MarkedGraph& graph, const TransportFunction& F) {
  const auto A = graph.marked_vertices();
  if (A.empty()) throw DomainError("mark set A is empty");
  CompensatedSum<long double> lhs;
  CompensatedSum<long double> rhs;
  std::vector<std::vector<int>> dist;
  dist.reserve(A.size());
  for (int u : A) dist.push_back(graph.graph.distances(u));
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (std::size_t j = 0; j < A.size(); ++j) {
      const int d = dist[i][static_cast<std::size_t>(A[j])];
      if (d < 0 || d > F.reach) continue;
      lhs.add(F(graph, A[i], A[j], d));
      rhs.add(F(graph, A[j], A[i], d));
    }
  }
  const long double n = static_cast<long double>(A.size());
  ExactMtpResult out;
  out.lhs = static_cast<double>(lhs.value() / n);
  out.rhs = static_cast<double>(rhs.value() / n);
  out.equal = std::fabs(out.lhs - out.rhs) < 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo test

bool conclusive(const MarkedGraph& graph, int root, int depth) {
  if (depth < 0) return true;
  const auto d = graph.graph.distances(root, depth);
  for (std::size_t v = 0; v < d.size(); ++v)
    if (d[v] != -1 && !graph.complete[v]) return false;
  return true;
}

MarkedGraph relabel(const MarkedGraph& graph, const std::vector<int>& perm) {
  const std::size_t n = graph.size();
  if (perm.size() != n) throw DomainError("permutation has the wrong length");
  MarkedGraph out{Graph(n), std::vector<char>(n, 0), std::vector<char>(n, 1)};
  for (std::size_t v = 0; v < n; ++v) {
    const auto pv = static_cast<std::size_t>(perm[v]);
    out.marked[pv] = graph.marked[v];
    out.complete[pv] = graph.complete[v];
    for (int w : graph.graph.neighbors(static_cast<int>(v)))
      if (static_cast<int>(v) < w) out.graph.add_edge(perm[v], perm[static_cast<std::size_t>(w)]);
  }
  return out;
}

namespace {

constexpr double kInconclusive = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<MtpReport> mc_mtp_test(const Sampler& sampler, const std::vector<TransportFunction>& Fs,
                                   const WeightFunction& W, const MtpOptions& options) {
  if (options.samples < 1000) throw DomainError("mc_mtp_test needs at least 1000 samples");
  const double z = normal_two_sided_quantile(options.alpha);
  if (Fs.empty()) throw DomainError("no transport functions given");
  int max_reach = 0;
  for (const auto& F : Fs) max_reach = std::max(max_reach, F.reach);

  const std::size_t n = options.samples;
  std::vector<double> weights(n);
  std::vector<double> diffs(n * Fs.size());
  parallel_for(n, options.workers, [&](std::size_t i) {
    Rng rng = substream(options.seed, i);
    const MtpSample s = sampler(rng);
    weights[i] = W.eval(s);
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) throw DomainError("weight must be positive and finite");
    const auto dist = s.graph.graph.distances(s.root, max_reach);
    for (std::size_t f = 0; f < Fs.size(); ++f) {
      const auto& F = Fs[f];
      if (!conclusive(s.graph, s.root, F.reach + F.radius - 1)) {
        diffs[i * Fs.size() + f] = kInconclusive;
        continue;
      }
      long double out = 0.0L;
      long double in = 0.0L;
      for (std::size_t v = 0; v < dist.size(); ++v) {
        if (dist[v] < 0 || dist[v] > F.reach || !s.graph.marked[v]) continue;
        out += F(s.graph, s.root, static_cast<int>(v), dist[v]);
        in += F(s.graph, static_cast<int>(v), s.root, dist[v]);
      }
      diffs[i * Fs.size() + f] = static_cast<double>(out - in);
    }
  });

  std::vector<MtpReport> reports;
  for (std::size_t f = 0; f < Fs.size(); ++f) {
    MtpReport rep;
    rep.transport = Fs[f].name;
    rep.weight = W.name;
    rep.alpha = options.alpha;
    CompensatedSum<long double> wsum;
    CompensatedSum<long double> wdsum;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = diffs[i * Fs.size() + f];
      if (std::isnan(d)) {
        ++rep.inconclusive;
        continue;
      }
      ++rep.n;
      wsum.add(weights[i]);
      wdsum.add(static_cast<long double>(weights[i]) * d);
    }
    if (10 * rep.inconclusive > n)
      throw TruncationInsufficient("transport '" + rep.transport + "': " + std::to_string(rep.inconclusive) + " of " +
                                   std::to_string(n) + " samples cannot certify the evaluation radius");
    if (rep.n < 2) throw TruncationInsufficient("too few conclusive samples");
    const long double mean_w = wsum.value() / static_cast<long double>(rep.n);
    const long double est = wdsum.value() / wsum.value();
    RunningStats resid;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = diffs[i * Fs.size() + f];
      if (std::isnan(d)) continue;
      resid.add(static_cast<double>(weights[i] * (d - est) / mean_w));
    }
    rep.mean_weight = static_cast<double>(mean_w);
    rep.estimate = static_cast<double>(est);
    rep.std_error = resid.std_error();
    rep.ci_low = rep.estimate - z * rep.std_error;
    rep.ci_high = rep.estimate + z * rep.std_error;
    rep.pass = rep.std_error > 0.0 ? (rep.ci_low <= 0.0 && 0.0 <= rep.ci_high) : std::fabs(rep.estimate) <= 1e-12;
    reports.push_back(rep);
  }
  return reports;
}

MtpReport mc_mtp_test(const Sampler& sampler, const TransportFunction& F, const WeightFunction& W,
                      const MtpOptions& options) {
  return mc_mtp_test(sampler, std::vector<TransportFunction>{F}, W, options).front();
}

// ---------------------------------------------------------------------------
// Samplers

TargetRule parse_target_rule(const std::string& name) {
  if (name == "start") return TargetRule::Start;
  if (name == "ball") return TargetRule::Ball;
  if (name == "all") return TargetRule::All;
  if (name == "brw-trace") return TargetRule::BrwTrace;
  throw ConfigError("unknown target rule '" + name + "'");
}

std::string to_string(TargetRule rule) {
  switch (rule) {
    case TargetRule::Start: return "start";
    case TargetRule::Ball: return "ball";
    case TargetRule::All: return "all";
    case TargetRule::BrwTrace: return "brw-trace";
  }
  return "?";
}

CayleyBall cayley_ball(const GroupSpec& g, int radius) {
  g.validate();
  if (radius < 0) throw DomainError("ball radius must be non-negative");
  CayleyBall ball;
  std::unordered_map<Elem, int, ElemHash> index;
  ball.elems.push_back(identity(g));
  ball.dist.push_back(0);
  ball.graph.add_vertex();
  index.emplace(ball.elems[0], 0);
  for (std::size_t head = 0; head < ball.elems.size(); ++head) {
    const int d = ball.dist[head];
    if (d == radius) continue;
    const Elem x = ball.elems[head];
    for (const Elem& y : neighbors(g, x)) {
      auto [it, inserted] = index.try_emplace(y, static_cast<int>(ball.elems.size()));
      if (inserted) {
        ball.elems.push_back(y);
        ball.dist.push_back(d + 1);
        ball.graph.add_vertex();
      }
      ball.graph.add_edge(static_cast<int>(head), it->second);
    }
    if (ball.elems.size() > 50'000'000) throw DomainError("Cayley ball too large");
  }
  return ball;
}

Sampler pullback_sampler(const GroupSpec& g, const TargetSpec& target, const OffspringDistribution& mu, int depth,
                         std::size_t vertex_budget) {
  g.validate();
  if (depth < 1) throw DomainError("sampler depth must be at least 1");
  std::shared_ptr<const std::vector<Elem>> ball;
  if (target.rule == TargetRule::Ball) {
    if (target.ball_radius < 0) throw DomainError("ball radius must be non-negative");
    ball = std::make_shared<const std::vector<Elem>>(cayley_ball(g, target.ball_radius).elems);
  }
  const OffspringDistribution mu2 =
      target.second_offspring.empty() ? mu : OffspringDistribution(target.second_offspring);
  const GwLimits limits{vertex_budget, depth};
  return [g, target, mu, mu2, limits, ball](Rng& rng) {
    MarkedTree tree = sample_unimodular_gw(mu, limits, rng);
    const Elem e = identity(g);
    const TreeWalk walk = run_walk(tree, g, e, rng);
    MtpSample s;
    switch (target.rule) {
      case TargetRule::Start:
        for (std::size_t v = 0; v < tree.size(); ++v) tree.set_marked(static_cast<Vertex>(v), walk.values[v] == e);
        break;
      case TargetRule::Ball: {
        const Elem& z = (*ball)[uniform_below(rng, ball->size())];
        for (std::size_t v = 0; v < tree.size(); ++v)
          tree.set_marked(static_cast<Vertex>(v), distance(g, walk.values[v], z) <= target.ball_radius);
        break;
      }
      case TargetRule::All:
        for (std::size_t v = 0; v < tree.size(); ++v) tree.set_marked(static_cast<Vertex>(v));
        break;
      case TargetRule::BrwTrace: {
        const MarkedTree tree2 = sample_unimodular_gw(mu2, limits, rng);
        const TreeWalk walk2 = run_walk(tree2, g, e, rng);
        std::unordered_set<Elem, ElemHash> visited(walk2.values.begin(), walk2.values.end());
        s.preimage_count = static_cast<std::size_t>(std::count(walk2.values.begin(), walk2.values.end(), e));
        for (std::size_t v = 0; v < tree.size(); ++v)
          tree.set_marked(static_cast<Vertex>(v), visited.count(walk.values[v]) != 0);
        break;
      }
    }
    s.graph = MarkedGraph::from_tree(tree);
    s.root = 0;
    return s;
  };
}

Sampler pushforward_sampler(const GroupSpec& g, const OffspringDistribution& mu, int depth, int ball_radius,
                            std::size_t vertex_budget) {
  g.validate();
  if (depth < 1) throw DomainError("sampler depth must be at least 1");
  auto ball = std::make_shared<const CayleyBall>(cayley_ball(g, ball_radius));
  auto index = std::make_shared<std::unordered_map<Elem, int, ElemHash>>();
  for (std::size_t i = 0; i < ball->elems.size(); ++i) index->emplace(ball->elems[i], static_cast<int>(i));
  std::shared_ptr<const std::unordered_map<Elem, int, ElemHash>> lookup = index;
  const GwLimits limits{vertex_budget, depth};
  return [g, mu, limits, ball, lookup, ball_radius](Rng& rng) {
    const MarkedTree tree = sample_unimodular_gw(mu, limits, rng);
    const Elem e = identity(g);
    const TreeWalk walk = run_walk(tree, g, e, rng);
    MtpSample s;
    const std::size_t n = ball->elems.size();
    s.graph = MarkedGraph{ball->graph, std::vector<char>(n, 0), std::vector<char>(n, 1)};
    for (std::size_t i = 0; i < n; ++i) s.graph.complete[i] = ball->dist[i] < ball_radius;
    std::size_t at_root = 0;
    for (const Elem& x : walk.values) {
      if (x == e) ++at_root;
      auto it = lookup->find(x);
      if (it != lookup->end()) s.graph.marked[static_cast<std::size_t>(it->second)] = 1;
    }
    s.preimage_count = at_root;
    s.root = 0;
    return s;
  };
}

Sampler uniform_root_sampler(MarkedGraph graph) {
  auto shared = std::make_shared<const MarkedGraph>(std::move(graph));
  const auto marked = shared->marked_vertices();
  if (marked.empty()) throw DomainError("mark set A is empty");
  return [shared, marked](Rng& rng) {
    MtpSample s;
    s.graph = *shared;
    s.root = marked[uniform_below(rng, marked.size())];
    return s;
  };
}

Sampler fixed_root_sampler(MarkedGraph graph, int root) {
  if (root < 0 || static_cast<std::size_t>(root) >= graph.size()) throw DomainError("root not in graph");
  auto shared = std::make_shared<const MarkedGraph>(std::move(graph));
  return [shared, root](Rng&) {
    MtpSample s;
    s.graph = *shared;
    s.root = root;
    return s;
  };
}

}  // namespace brw
