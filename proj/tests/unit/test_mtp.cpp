#include <doctest.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <vector>

#include "brw/errors.hpp"
#include "brw/mtp.hpp"
#include "brw/tree_walk.hpp"
#include "oracles.hpp"

using namespace brw;

namespace {

MarkedGraph path_graph(int n) {
  MarkedGraph g{Graph(static_cast<std::size_t>(n)), std::vector<char>(n, 1), std::vector<char>(n, 1)};
  for (int v = 1; v < n; ++v) g.graph.add_edge(v - 1, v);
  return g;
}

MarkedGraph random_graph(Rng& rng, int max_vertices) {
  const int n = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_vertices)));
  MarkedGraph g{Graph(static_cast<std::size_t>(n)), std::vector<char>(n, 0), std::vector<char>(n, 1)};
  for (int v = 1; v < n; ++v) g.graph.add_edge(static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(v))), v);
  const int extra = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
  for (int i = 0; i < extra; ++i) {
    const int u = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
    const int v = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
    if (u != v) g.graph.add_edge(u, v);
  }
  const double density = uniform01(rng);
  for (int v = 0; v < n; ++v) g.marked[static_cast<std::size_t>(v)] = uniform01(rng) < density;
  g.marked[uniform_below(rng, static_cast<std::uint64_t>(n))] = 1;
  return g;
}

TransportFunction table_transport(Rng& rng, std::size_t n) {
  auto table = std::make_shared<std::vector<double>>(n * n);
  for (auto& x : *table) x = uniform01(rng) < 0.3 ? 0.0 : 10.0 * uniform01(rng);
  return {"table", kUnboundedReach, 0,
          [table, n](const MarkedGraph&, int u, int v, int) { return (*table)[static_cast<std::size_t>(u) * n + v]; }};
}

}  // namespace

TEST_CASE("exact transport examples") {
  const auto path3 = path_graph(3);
  const auto leaf = exact_mtp_check(path3, builtin_transport("leaf-target", 5));
  CHECK(leaf.lhs == doctest::Approx(2.0));
  CHECK(leaf.rhs == doctest::Approx(2.0));
  CHECK(leaf.equal);

  const auto adj = exact_mtp_check(path3, builtin_transport("adjacency"));
  CHECK(adj.lhs == doctest::Approx(4.0 / 3.0));
  CHECK(adj.equal);

  const TransportFunction zero{"zero", 1, 0, [](const MarkedGraph&, int, int, int) { return 0.0; }};
  const auto z = exact_mtp_check(path3, zero);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.equal);

  auto empty = path3;
  std::fill(empty.marked.begin(), empty.marked.end(), 0);
  CHECK_THROWS_AS(exact_mtp_check(empty, zero), DomainError);
}

TEST_CASE("exact transport on random graphs") {
  Rng rng(31, 0);
  for (int i = 0; i < 100; ++i) {
    const auto g = random_graph(rng, 50);
    const auto F = table_transport(rng, g.size());
    const auto res = exact_mtp_check(g, F);
    CHECK(res.equal);
    for (const auto& name : builtin_transport_names()) CHECK(exact_mtp_check(g, builtin_transport(name, 2)).equal);
  }
}

TEST_CASE("built-in transports are local") {
  Rng rng(32, 0);
  for (int i = 0; i < 40; ++i) {
    const auto g = random_graph(rng, 30);
    std::vector<int> perm(g.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t j = perm.size(); j > 1; --j) std::swap(perm[j - 1], perm[uniform_below(rng, j)]);
    const auto h = relabel(g, perm);
    for (const auto& name : builtin_transport_names()) {
      const auto F = builtin_transport(name, 2);
      for (int u = 0; u < static_cast<int>(g.size()); ++u) {
        const auto d = g.graph.distances(u);
        for (int v = 0; v < static_cast<int>(g.size()); ++v) {
          if (d[static_cast<std::size_t>(v)] < 0) continue;
          CHECK(F(g, u, v, d[static_cast<std::size_t>(v)]) ==
                F(h, perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)], d[static_cast<std::size_t>(v)]));
        }
      }
    }
  }
  CHECK_THROWS_AS(builtin_transport("nope"), ConfigError);
  CHECK_THROWS_AS(builtin_weight("nope"), ConfigError);
}

TEST_CASE("uniform and fixed roots") {
  MtpOptions opt;
  opt.samples = 2000;
  const auto path = path_graph(6);
  const auto one = builtin_weight("one");
  CHECK(mc_mtp_test(uniform_root_sampler(path), builtin_transport("leaf-target", 10), one, opt).pass);
  CHECK(mc_mtp_test(fixed_root_sampler(path, 0), builtin_transport("distinct"), one, opt).pass);
  const auto bad = mc_mtp_test(fixed_root_sampler(path, 0), builtin_transport("other-leaf"), one, opt);
  CHECK_FALSE(bad.pass);
  CHECK(bad.estimate == doctest::Approx(1.0 - 5.0));

  opt.samples = 500;
  CHECK_THROWS_AS(mc_mtp_test(uniform_root_sampler(path), builtin_transport("adjacency"), one, opt), DomainError);
}

TEST_CASE("rejection rate under the null") {
  Rng rng(33, 0);
  MarkedGraph g = random_graph(rng, 40);
  while (g.marked_vertices().size() < 8) g = random_graph(rng, 40);
  const auto sampler = uniform_root_sampler(g);
  const auto F = builtin_transport("nearest-marked", 2);
  std::size_t rejected = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    MtpOptions opt;
    opt.samples = 1000;
    opt.alpha = 0.05;
    opt.seed = seed;
    rejected += !mc_mtp_test(sampler, F, builtin_weight("one"), opt).pass;
  }
  const double rate = rejected / 200.0;
  CHECK(rate >= 0.01);
  CHECK(rate <= 0.12);
}

TEST_CASE("pull-back samplers") {
  const auto g = GroupSpec::regular_tree(4);
  Rng rng(34, 0);
  const auto path = pullback_sampler(g, TargetSpec{TargetRule::Start, 1, {}}, OffspringDistribution::dirac(1), 6);
  const auto s = path(rng);
  CHECK(s.graph.marked[static_cast<std::size_t>(s.root)]);

  const auto all = pullback_sampler(g, TargetSpec{TargetRule::All, 1, {}}, OffspringDistribution({0.45, 0.0, 0.55}), 6);
  for (int i = 0; i < 20; ++i) {
    const auto a = all(rng);
    CHECK(std::all_of(a.graph.marked.begin(), a.graph.marked.end(), [](char c) { return c != 0; }));
  }

  const OffspringDistribution mu({0.45, 0.0, 0.55});
  MtpOptions opt;
  opt.samples = 4000;
  opt.seed = 5;
  std::vector<TransportFunction> Fs{builtin_transport("leaf-target", 2), builtin_transport("nearest-marked", 2),
                                    builtin_transport("degree-ratio")};
  for (auto rule : {TargetRule::Start, TargetRule::Ball}) {
    const auto reports = mc_mtp_test(pullback_sampler(g, TargetSpec{rule, 1, {}}, mu, 12), Fs, builtin_weight("one"), opt);
    for (const auto& r : reports) {
      CHECK(r.pass);
      CHECK(r.inconclusive <= opt.samples / 10);
    }
  }
  const auto trace = mc_mtp_test(pullback_sampler(g, TargetSpec{TargetRule::BrwTrace, 1, {}}, mu, 12), Fs,
                                 builtin_weight("inverse-preimage"), opt);
  for (const auto& r : trace) CHECK(r.pass);

  // Too shallow to certify a radius-2 evaluation around the root.
  CHECK_THROWS_AS(mc_mtp_test(pullback_sampler(g, TargetSpec{TargetRule::All, 1, {}}, mu, 1),
                              builtin_transport("nearest-marked", 2), builtin_weight("one"), opt),
                  TruncationInsufficient);
}

TEST_CASE("push-forward with the preimage weight") {
  const auto g = GroupSpec::regular_tree(4);
  const OffspringDistribution mu({0.45, 0.0, 0.55});
  MtpOptions opt;
  opt.samples = 10000;
  opt.seed = 6;
  std::vector<TransportFunction> Fs{builtin_transport("nearest-marked", 2), builtin_transport("marked-neighbors", 2)};
  const auto reports = mc_mtp_test(pushforward_sampler(g, mu, 12, 4), Fs, builtin_weight("inverse-preimage"), opt);
  for (const auto& r : reports) CHECK(r.pass);
}

TEST_CASE("a plain Galton-Watson root is detected") {
  // Rooted at its progenitor the plain tree is not unimodular: the root has
  // no parent, so degree ratios towards it are skewed.
  const OffspringDistribution mu({0.0, 0.5, 0.5});
  const Sampler plain = [mu](Rng& rng) {
    auto t = sample_gw(mu, GwLimits{100000, 4}, rng);
    for (std::size_t v = 0; v < t.size(); ++v) t.set_marked(static_cast<Vertex>(v));
    return MtpSample{MarkedGraph::from_tree(t), 0, 1};
  };
  MtpOptions opt;
  opt.samples = 4000;
  CHECK_FALSE(mc_mtp_test(plain, builtin_transport("degree-ratio"), builtin_weight("one"), opt).pass);
}

TEST_CASE("cayley balls") {
  const auto b = cayley_ball(GroupSpec::regular_tree(3), 3);
  CHECK(b.graph.size() == 1 + 3 + 6 + 12);
  CHECK(b.elems[0] == identity(GroupSpec::regular_tree(3)));
  const auto z = cayley_ball(GroupSpec::lattice(2), 2);
  CHECK(z.graph.size() == 13);
  CHECK(z.graph.degree(0) == 4);
}
