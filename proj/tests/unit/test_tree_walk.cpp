#include <doctest.h>

#include <map>
#include <numeric>
#include <vector>

#include "brw/graph.hpp"
#include "brw/tree_walk.hpp"
#include "oracles.hpp"

using namespace brw;

TEST_CASE("walk on small index trees") {
  const auto g = GroupSpec::regular_tree(4);
  Rng rng(1, 0);
  const auto single = run_walk(testing::path_tree(1), g, identity(g), rng);
  CHECK(single.size() == 1);
  CHECK(single[0] == identity(g));

  const auto z = GroupSpec::lattice(1);
  const std::size_t n = 20000;
  std::size_t plus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = substream(2, i);
    const auto w = run_walk(testing::path_tree(2), z, identity(z), r);
    CHECK(distance(z, w[0], w[1]) == 1);
    plus += w[1].w[0] == 1;
  }
  CHECK(testing::within(plus / double(n), 0.5, testing::binomial_sigma(0.5, n)));

  std::size_t same = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = substream(3, i);
    const auto w = run_walk(testing::star_tree(2), g, identity(g), r);
    same += w[1] == w[2];
  }
  CHECK(testing::within(same / double(n), 0.25, testing::binomial_sigma(0.25, n)));
}

TEST_CASE("walk values step along tree edges") {
  const auto g = GroupSpec::free_group(2);
  Rng rng(4, 0);
  const auto t = sample_gw(OffspringDistribution({0.2, 0.3, 0.5}), GwLimits{5000, 10}, rng);
  const auto start = parse_elem(g, "1.2");
  const auto w = run_walk(t, g, start, rng);
  CHECK(w[0] == start);
  for (std::size_t v = 1; v < t.size(); ++v) {
    const auto x = static_cast<Vertex>(v);
    CHECK(distance(g, w[x], w[t.parent(x)]) == 1);
  }
  CHECK(w.preimage(start).front() == 0);
}

TEST_CASE("trace graph") {
  const auto g = GroupSpec::regular_tree(3);
  Rng rng(5, 0);
  const auto single = trace(run_walk(testing::path_tree(1), g, identity(g), rng));
  CHECK(single.vertex_count() == 1);
  CHECK(single.edges().empty());
  CHECK(single.visits(identity(g)) == 1);

  for (int rep = 0; rep < 50; ++rep) {
    Rng r = substream(6, rep);
    const auto t = sample_gw(OffspringDistribution({0.3, 0.2, 0.5}), GwLimits{3000, 9}, r);
    const auto w = run_walk(t, g, identity(g), r);
    const auto tr = trace(w);
    CHECK(tr.vertices().front() == identity(g));
    const auto visits = tr.visit_counts();
    CHECK(std::accumulate(visits.begin(), visits.end(), std::size_t{0}) == t.size());
    std::size_t mult = 0;
    for (const auto& [edge, m] : tr.edges()) {
      CHECK(edge.first < edge.second);
      CHECK(distance(g, tr.vertices()[edge.first], tr.vertices()[edge.second]) == 1);
      mult += m;
    }
    CHECK(mult == t.size() - 1);
    for (std::size_t v = 0; v < t.size(); ++v) CHECK(tr.contains(w[static_cast<Vertex>(v)]));
    const auto graph = Graph::from_trace(tr);
    std::vector<int> id;
    CHECK(graph.components(id, std::vector<char>(graph.size(), 0)) == 1);
  }
}

TEST_CASE("time reversal along a path") {
  // Tree rooted at 0 with a path 0-1-3-5 plus side branches, and the same
  // tree re-rooted at 5 (old ids 5,3,1,0,4,2 become 0..5).
  const auto forward = MarkedTree::from_parents({kNoVertex, 0, 0, 1, 1, 3});
  const auto reversed = MarkedTree::from_parents({kNoVertex, 0, 1, 2, 2, 3});
  const auto g = GroupSpec::regular_tree(3);
  const auto x = identity(g);
  const auto y = parse_elem(g, "2");
  const double p = double(return_probability(g, 3, x, y));
  REQUIRE(p > 0.0);
  const std::size_t n = 60000;
  std::size_t hit_forward = 0, hit_reversed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng r1 = substream(7, i);
    hit_forward += run_walk(forward, g, x, r1)[5] == y;
    Rng r2 = substream(8, i);
    hit_reversed += run_walk(reversed, g, y, r2)[3] == x;
  }
  CHECK(testing::within(hit_forward / double(n), p, testing::binomial_sigma(p, n)));
  CHECK(testing::within(hit_reversed / double(n), p, testing::binomial_sigma(p, n)));
}

TEST_CASE("bridges are uniform over paths") {
  const auto g = GroupSpec::regular_tree(3);
  const auto e = identity(g);
  const auto y = parse_elem(g, "1");
  // All length-3 generator sequences from e to y.
  std::map<std::pair<Elem, Elem>, std::size_t> paths;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const auto x1 = step(g, e, a);
        const auto x2 = step(g, x1, b);
        if (step(g, x2, c) == y) paths[{x1, x2}] = 0;
      }
  REQUIRE(paths.size() >= 2);
  const auto tree = testing::path_tree(4);
  const std::size_t n = 300000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = substream(9, i);
    const auto w = run_walk(tree, g, e, r);
    if (w[3] != y) continue;
    ++hits;
    ++paths.at({w[1], w[2]});
  }
  const double q = 1.0 / double(paths.size());
  for (const auto& [key, count] : paths) CHECK(testing::within(count / double(hits), q, testing::binomial_sigma(q, hits)));
}

TEST_CASE("origin visits") {
  const auto g = GroupSpec::regular_tree(4);
  const auto e = identity(g);
  const auto none = origin_visit_experiment(OffspringDistribution::dirac(0), g, e, 5, 20, 1);
  for (const auto& rep : none.replicates)
    for (auto c : rep.counts) CHECK(c == 1);

  const OffspringDistribution mu({0.45, 0.0, 0.55});
  // Survival conditioning inflates early increments, so the verdict needs
  // enough depth for the surviving-run mean to level off.
  const int depth = 30;
  const auto res = origin_visit_experiment(mu, g, e, depth, 2000, 2);
  const auto series = visits_series(g, mu.mean(), depth);
  for (const auto& d : res.per_depth)
    CHECK(testing::within(d.mean_all, double(series.partial_sums[static_cast<std::size_t>(d.depth)]), d.se_all));
  CHECK(res.trend == VisitTrend::Stabilizes);

  const auto again = origin_visit_experiment(mu, g, e, 12, 300, 3, 1);
  const auto parallel = origin_visit_experiment(mu, g, e, 12, 300, 3, 4);
  for (std::size_t i = 0; i < 300; ++i) CHECK(again.replicates[i].counts == parallel.replicates[i].counts);

  const auto fast = origin_visit_experiment(OffspringDistribution({0.25, 0.0, 0.75}), g, e, 16, 400, 4);
  CHECK(fast.trend == VisitTrend::Grows);
}
