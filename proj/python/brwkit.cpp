// Python bindings.  Group elements cross the boundary in their text form
// ("e", "1.2.1", "(1,-2)").

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brw/errors.hpp"
#include "brw/experiment.hpp"
#include "brw/group_graph.hpp"
#include "brw/gw_trees.hpp"
#include "brw/intersections.hpp"
#include "brw/magic.hpp"
#include "brw/mtp.hpp"
#include "brw/tree_walk.hpp"

namespace py = pybind11;
using namespace brw;

namespace {

GroupSpec group(const std::string& kind, int param) {
  GroupSpec g{parse_group_kind(kind), param};
  g.validate();
  return g;
}

std::vector<Elem> parse_all(const GroupSpec& g, const std::vector<std::string>& xs) {
  std::vector<Elem> out;
  for (const auto& x : xs) out.push_back(parse_elem(g, x));
  return out;
}

std::vector<std::string> print_all(const GroupSpec& g, const std::vector<Elem>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(to_string(g, x));
  return out;
}

std::vector<Vertex> parents_of(const MarkedTree& t) {
  std::vector<Vertex> out(t.size());
  for (std::size_t v = 0; v < t.size(); ++v) out[v] = t.parent(static_cast<Vertex>(v));
  return out;
}

MarkedGraph marked_graph(std::size_t n, const std::vector<std::pair<int, int>>& edges, const std::vector<int>& marked) {
  MarkedGraph g{Graph(n), std::vector<char>(n, 0), std::vector<char>(n, 1)};
  for (const auto& [u, v] : edges) g.graph.add_edge(u, v);
  for (int v : marked) g.marked.at(static_cast<std::size_t>(v)) = 1;
  return g;
}

py::dict report_dict(const MtpReport& r) {
  py::dict d;
  d["transport"] = r.transport;
  d["weight"] = r.weight;
  d["estimate"] = r.estimate;
  d["std_error"] = r.std_error;
  d["ci_low"] = r.ci_low;
  d["ci_high"] = r.ci_high;
  d["n"] = r.n;
  d["inconclusive"] = r.inconclusive;
  d["pass"] = r.pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(brwkit, m) {
  m.doc() = "Branching random walks on Cayley graphs: exact walk probabilities, tree samplers, "
            "branching-vertex counting and transport tests.";
  m.attr("__version__") = library_version();

  py::register_exception<Error>(m, "BrwError");
  py::register_exception<DomainError>(m, "DomainError", m.attr("BrwError"));
  py::register_exception<InvalidElement>(m, "InvalidElement", m.attr("BrwError"));
  py::register_exception<ConfigError>(m, "ConfigError", m.attr("BrwError"));
  py::register_exception<TruncationInsufficient>(m, "TruncationInsufficient", m.attr("BrwError"));
  py::register_exception<SamplingFailure>(m, "SamplingFailure", m.attr("BrwError"));

  // Groups and walk probabilities.
  m.def("neighbors", [](const std::string& kind, int param, const std::string& x) {
    const auto g = group(kind, param);
    return print_all(g, neighbors(g, parse_elem(g, x)));
  }, py::arg("kind"), py::arg("param"), py::arg("x"));
  m.def("distance", [](const std::string& kind, int param, const std::string& x, const std::string& y) {
    const auto g = group(kind, param);
    return distance(g, parse_elem(g, x), parse_elem(g, y));
  }, py::arg("kind"), py::arg("param"), py::arg("x"), py::arg("y"));
  m.def("return_probability", [](const std::string& kind, int param, int n, const std::string& x, const std::string& y) {
    const auto g = group(kind, param);
    return static_cast<double>(return_probability(g, n, parse_elem(g, x), parse_elem(g, y)));
  }, py::arg("kind"), py::arg("param"), py::arg("n"), py::arg("x") = "e", py::arg("y") = "e");
  m.def("return_probabilities", [](const std::string& kind, int param, int max_steps) {
    const auto p = return_probabilities(group(kind, param), max_steps);
    return std::vector<double>(p.begin(), p.end());
  }, py::arg("kind"), py::arg("param"), py::arg("max_steps"));
  m.def("spectral_radius", [](const std::string& kind, int param, int n_max) {
    const auto s = spectral_radius(group(kind, param), n_max);
    return py::make_tuple(s.estimate, s.closed_form ? py::cast(*s.closed_form) : py::none());
  }, py::arg("kind"), py::arg("param"), py::arg("n_max"),
     "(p_{2n}(e,e)^{1/2n} at n = n_max, closed-form limit or None)");
  m.def("visits_series", [](const std::string& kind, int param, double mean, int N) {
    const auto s = visits_series(group(kind, param), mean, N);
    return std::vector<double>(s.partial_sums.begin(), s.partial_sums.end());
  }, py::arg("kind"), py::arg("param"), py::arg("mean"), py::arg("N"));

  // Offspring laws and trees.
  m.def("thin", [](const std::vector<double>& pmf, double p) { return thin(OffspringDistribution(pmf), p).pmf(); },
        py::arg("pmf"), py::arg("p"));
  m.def("extinction_probability", [](const std::vector<double>& pmf) {
    return extinction_probability(OffspringDistribution(pmf));
  }, py::arg("pmf"));
  m.def("sample_gw", [](const std::vector<double>& pmf, std::uint64_t seed, std::size_t budget, int max_depth,
                        bool unimodular) {
    Rng rng(seed);
    const GwLimits limits{budget, max_depth < 0 ? std::numeric_limits<int>::max() : max_depth};
    const auto t = unimodular ? sample_unimodular_gw(OffspringDistribution(pmf), limits, rng)
                              : sample_gw(OffspringDistribution(pmf), limits, rng);
    py::dict d;
    d["parents"] = parents_of(t);
    d["truncated"] = t.truncated();
    return d;
  }, py::arg("pmf"), py::arg("seed") = 1, py::arg("budget") = 1000000, py::arg("max_depth") = -1,
     py::arg("unimodular") = false, "Returns {'parents': [...], 'truncated': bool}; parents[0] == -1.");
  m.def("run_walk", [](const std::vector<Vertex>& parents, const std::string& kind, int param, const std::string& start,
                       std::uint64_t seed) {
    const auto g = group(kind, param);
    Rng rng(seed);
    return print_all(g, run_walk(MarkedTree::from_parents(parents), g, parse_elem(g, start), rng).values);
  }, py::arg("parents"), py::arg("kind"), py::arg("param"), py::arg("start") = "e", py::arg("seed") = 1);

  // Branching-vertex combinatorics.
  m.def("branching_vertices", [](const std::vector<Vertex>& parents, const std::vector<Vertex>& A, int k, int r,
                                 Vertex anchor) {
    return branching_vertices(OrientedTree(MarkedTree::from_parents(parents), anchor), A, k, r);
  }, py::arg("parents"), py::arg("A"), py::arg("k"), py::arg("r"), py::arg("anchor") = 0);
  m.def("supported_vertices", [](const std::vector<Vertex>& parents, const std::vector<Vertex>& A, int k, int r,
                                 Vertex anchor) {
    return supported_vertices(OrientedTree(MarkedTree::from_parents(parents), anchor), A, k, r);
  }, py::arg("parents"), py::arg("A"), py::arg("k"), py::arg("r"), py::arg("anchor") = 0);
  m.def("magic_bound", &magic_bound, py::arg("marks"), py::arg("k"), py::arg("r"));
  m.def("ends_profile", [](const std::vector<Vertex>& parents, const std::vector<Vertex>& A, Vertex center, int radius,
                           std::size_t m_threshold) {
    const auto p = ends_profile(MarkedTree::from_parents(parents), A, center, radius, m_threshold);
    std::vector<std::pair<std::size_t, std::size_t>> comps;
    for (const auto& c : p.components) comps.emplace_back(c.size, c.marked);
    return py::make_tuple(p.qualifying, comps);
  }, py::arg("parents"), py::arg("A"), py::arg("center"), py::arg("radius"), py::arg("m_threshold"),
     "(qualifying count, [(size, marked), ...])");

  // Transport tests.
  m.def("transport_names", &builtin_transport_names);
  m.def("exact_mtp_check", [](std::size_t n, const std::vector<std::pair<int, int>>& edges,
                              const std::vector<int>& marked, const std::string& transport, int R) {
    const auto r = exact_mtp_check(marked_graph(n, edges, marked), builtin_transport(transport, R));
    return py::make_tuple(r.lhs, r.rhs, r.equal);
  }, py::arg("n"), py::arg("edges"), py::arg("marked"), py::arg("transport"), py::arg("R") = 2);
  m.def("pullback_mtp_test", [](const std::string& kind, int param, const std::vector<double>& pmf,
                                const std::string& target, int depth, const std::vector<std::string>& transports,
                                const std::string& weight, std::size_t samples, double alpha, std::uint64_t seed,
                                unsigned workers) {
    const auto g = group(kind, param);
    const auto sampler = pullback_sampler(g, TargetSpec{parse_target_rule(target), 1, {}}, OffspringDistribution(pmf), depth);
    std::vector<TransportFunction> Fs;
    for (const auto& name : transports) Fs.push_back(builtin_transport(name, 2));
    const auto W = builtin_weight(weight);
    std::vector<MtpReport> reports;
    {
      py::gil_scoped_release release;
      reports = mc_mtp_test(sampler, Fs, W, MtpOptions{samples, alpha, seed, workers});
    }
    py::list out;
    for (const auto& r : reports) out.append(report_dict(r));
    return out;
  }, py::arg("kind"), py::arg("param"), py::arg("pmf"), py::arg("target") = "start", py::arg("depth") = 12,
     py::arg("transports") = std::vector<std::string>{"leaf-target", "nearest-marked", "degree-ratio"},
     py::arg("weight") = "one", py::arg("samples") = 10000, py::arg("alpha") = 0.01, py::arg("seed") = 1,
     py::arg("workers") = 1);

  // Intersections.
  m.def("expected_pairs", [](double mean1, double mean2, const std::string& kind, int param, int N,
                             const std::string& x, const std::string& y) {
    const auto g = group(kind, param);
    return static_cast<double>(expected_pairs_truncated(mean1, mean2, g, parse_elem(g, x), parse_elem(g, y), N));
  }, py::arg("mean1"), py::arg("mean2"), py::arg("kind"), py::arg("param"), py::arg("N"), py::arg("x") = "e",
     py::arg("y") = "e");
  m.def("sample_intersections", [](const std::vector<double>& pmf1, const std::vector<double>& pmf2,
                                   const std::string& kind, int param, int N, std::uint64_t seed) {
    const auto g = group(kind, param);
    Rng rng(seed);
    const auto rec = sample_intersections(OffspringDistribution(pmf1), OffspringDistribution(pmf2), g, identity(g),
                                          identity(g), N, N, rng);
    py::dict d;
    d["I"] = print_all(g, rec.I);
    d["pulled"] = rec.pulled;
    d["pair_count"] = rec.pair_count;
    d["truncated"] = rec.truncated;
    return d;
  }, py::arg("pmf1"), py::arg("pmf2"), py::arg("kind"), py::arg("param"), py::arg("N"), py::arg("seed") = 1);

  // Runner.
  m.def("run_experiment", [](const std::string& config_json, const std::string& out_dir) {
    const auto config = parse_config(nlohmann::json::parse(config_json));
    const auto result = run_experiment(config, out_dir);
    return py::make_tuple(result.exit_code, result.files, result.summary.dump());
  }, py::arg("config_json"), py::arg("out_dir"), "(exit code, files written, summary as JSON text)");
}
