#include "brw/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "brw/csv.hpp"
#include "brw/errors.hpp"
#include "brw/intersections.hpp"
#include "brw/magic.hpp"
#include "brw/mtp.hpp"
#include "brw/parallel.hpp"
#include "brw/rng.hpp"
#include "brw/stats.hpp"
#include "brw/tree_walk.hpp"

#ifndef BRW_VERSION
#define BRW_VERSION "0.0.0"
#endif

namespace brw {

using nlohmann::json;

std::string library_version() { return BRW_VERSION; }

std::vector<std::string> experiment_names() {
  return {"spectra", "visits", "magic-fuzz", "mtp-test", "intersect", "thin-sweep", "ends"};
}

// ---------------------------------------------------------------------------
// Config

namespace {

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::uint64_t get_seed(const json& value) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return value.get<std::uint64_t>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    std::size_t pos = 0;
    try {
      const unsigned long long v = std::stoull(s, &pos, 0);
      if (pos == s.size() && s.find('-') == std::string::npos) return v;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("seed must be a 64-bit unsigned integer");
}

template <typename T>
void require_range(const std::string& key, T value, T lo, T hi) {
  if (value < lo || value > hi) {
    std::ostringstream msg;
    msg << "config key '" << key << "' must lie in [" << lo << ", " << hi << "]";
    throw ConfigError(msg.str());
  }
}

template <typename T>
void require_nonempty(const std::string& key, const std::vector<T>& grid) {
  if (grid.empty()) throw ConfigError("config grid '" + key + "' must be nonempty");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "experiment") c.experiment = get_as<std::string>(value, key);
    else if (key == "group") {
      if (!value.is_object() || !value.contains("kind") || !value.contains("param"))
        throw ConfigError("group must be {\"kind\": ..., \"param\": ...}");
      try {
        c.group.kind = parse_group_kind(get_as<std::string>(value.at("kind"), "group.kind"));
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
      c.group.param = get_as<int>(value.at("param"), "group.param");
    }
    else if (key == "offspring") c.offspring = get_as<std::vector<double>>(value, key);
    else if (key == "offspring2") c.offspring2 = get_as<std::vector<double>>(value, key);
    else if (key == "depth") c.depth = get_as<int>(value, key);
    else if (key == "budget") c.budget = get_as<std::size_t>(value, key);
    else if (key == "replicates") c.replicates = get_as<std::size_t>(value, key);
    else if (key == "n_max") c.n_max = get_as<int>(value, key);
    else if (key == "mean") c.means = {get_as<double>(value, key)};
    else if (key == "means") c.means = get_as<std::vector<double>>(value, key);
    else if (key == "k_grid") c.k_grid = get_as<std::vector<int>>(value, key);
    else if (key == "r_grid") c.r_grid = get_as<std::vector<int>>(value, key);
    else if (key == "p_grid") c.p_grid = get_as<std::vector<double>>(value, key);
    else if (key == "radius_grid") c.radius_grid = get_as<std::vector<int>>(value, key);
    else if (key == "m_threshold") c.m_threshold = get_as<std::size_t>(value, key);
    else if (key == "alpha") c.alpha = get_as<double>(value, key);
    else if (key == "seed") c.seed = get_seed(value);
    else if (key == "output_dir") c.output_dir = get_as<std::string>(value, key);
    else if (key == "workers") c.workers = get_as<unsigned>(value, key);
    else if (key == "sampler") c.sampler = get_as<std::string>(value, key);
    else if (key == "target") c.target = get_as<std::string>(value, key);
    else if (key == "ball_radius") c.ball_radius = get_as<int>(value, key);
    else if (key == "transports") c.transports = get_as<std::vector<std::string>>(value, key);
    else if (key == "transport_radius") c.transport_radius = get_as<int>(value, key);
    else if (key == "weight") c.weight = get_as<std::string>(value, key);
    else if (key == "samples") c.samples = get_as<std::size_t>(value, key);
    else if (key == "path_length") c.path_length = get_as<std::size_t>(value, key);
    else if (key == "trees") c.trees = get_as<std::size_t>(value, key);
    else if (key == "max_vertices") c.max_vertices = get_as<std::size_t>(value, key);
    else if (key == "comment") continue;
    else throw ConfigError("unknown config key '" + key + "'");
  }
  c.echo = doc;
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  const auto names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  try {
    c.group.validate();
    OffspringDistribution check(c.offspring);
    if (!c.offspring2.empty()) OffspringDistribution check2(c.offspring2);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  require_range<int>("depth", c.depth, 0, 200);
  require_range<std::size_t>("budget", c.budget, 2, 50'000'000);
  require_range<std::size_t>("replicates", c.replicates, 1, 10'000'000);
  require_range<int>("n_max", c.n_max, 1, 20'000);
  require_range<std::size_t>("m_threshold", c.m_threshold, 1, 1'000'000);
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  require_range<unsigned>("workers", c.workers, 1, 256);
  require_range<int>("ball_radius", c.ball_radius, 0, 8);
  require_range<int>("transport_radius", c.transport_radius, 1, 8);
  require_range<std::size_t>("samples", c.samples, 1000, 10'000'000);
  require_range<std::size_t>("path_length", c.path_length, 2, 100'000);
  require_range<std::size_t>("trees", c.trees, 1, 1'000'000);
  require_range<std::size_t>("max_vertices", c.max_vertices, 1, 5000);
  require_nonempty("means", c.means);
  require_nonempty("k_grid", c.k_grid);
  require_nonempty("r_grid", c.r_grid);
  require_nonempty("p_grid", c.p_grid);
  require_nonempty("radius_grid", c.radius_grid);
  require_nonempty("transports", c.transports);
  for (double m : c.means)
    if (!(m >= 0.0)) throw ConfigError("means must be non-negative");
  for (int k : c.k_grid) require_range<int>("k_grid", k, 1, 64);
  for (int r : c.r_grid) require_range<int>("r_grid", r, 1, 16);
  for (double p : c.p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_grid entries must lie in [0,1]");
  for (int radius : c.radius_grid) require_range<int>("radius_grid", radius, 0, 200);
  if (c.experiment == "mtp-test") {
    try {
      for (const auto& name : c.transports) builtin_transport(name, c.transport_radius);
      builtin_weight(c.weight);
      parse_target_rule(c.target);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    static const std::set<std::string> samplers{"pullback", "pushforward", "uniform-root", "fixed-root"};
    if (!samplers.count(c.sampler)) throw ConfigError("unknown sampler '" + c.sampler + "'");
  }
  if (c.experiment == "spectra" && !c.group.is_tree() && c.n_max > 2000)
    throw ConfigError("lattice spectra are capped at n_max = 2000");
}

// ---------------------------------------------------------------------------
// Fuzz inputs

FuzzCase fuzz_case(std::uint64_t seed, std::size_t index, std::size_t max_vertices) {
  if (max_vertices < 1) throw DomainError("max_vertices must be at least 1");
  Rng rng = substream(seed, index);
  const std::size_t n = 1 + static_cast<std::size_t>(uniform_below(rng, max_vertices));
  std::vector<Vertex> parents{kNoVertex};
  for (std::size_t i = 1; i < n; ++i) {
    std::uint64_t lo = 0;
    std::uint64_t hi = i;  // parent in [lo, hi)
    switch (index % 3) {
      case 0: break;                                   // uniform attachment
      case 1: lo = i > 4 ? i - 4 : 0; break;           // long, thin trees
      default: hi = std::min<std::uint64_t>(i, 1 + uniform_below(rng, 4)); break;  // a few hubs
    }
    parents.push_back(static_cast<Vertex>(lo + uniform_below(rng, hi - lo)));
  }
  FuzzCase out{MarkedTree::from_parents(parents), {}, 0};
  const double density = uniform01(rng);
  for (std::size_t v = 0; v < n; ++v)
    if (uniform01(rng) < density) out.marks.push_back(static_cast<Vertex>(v));
  if (out.marks.empty()) out.marks.push_back(static_cast<Vertex>(uniform_below(rng, n)));
  out.anchor = uniform01(rng) < 0.5 ? 0 : static_cast<Vertex>(uniform_below(rng, n));
  return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct Output {
  std::filesystem::path dir;
  RunResult result;

  std::ofstream open(const std::string& name) {
    std::ofstream file(dir / name, std::ios::binary);
    if (!file) throw Error("cannot write " + (dir / name).string());
    result.files.push_back(name);
    return file;
  }
  void fail() { result.exit_code = 2; }
};

OffspringDistribution first_law(const ExperimentConfig& c) { return OffspringDistribution(c.offspring); }
OffspringDistribution second_law(const ExperimentConfig& c) {
  return OffspringDistribution(c.offspring2.empty() ? c.offspring : c.offspring2);
}

void run_spectra(const ExperimentConfig& c, Output& out) {
  const auto est = spectral_radius(c.group, c.n_max);
  auto file = out.open("spectra.csv");
  CsvWriter csv(file);
  csv.row("n", "estimate");
  for (std::size_t i = 0; i < est.sequence.size(); ++i) csv.row(2 * (i + 1), est.sequence[i]);
  out.result.summary["estimate"] = est.estimate;
  if (est.closed_form) {
    out.result.summary["closed_form"] = *est.closed_form;
    const bool ok = std::fabs(est.estimate - *est.closed_form) < 0.01;
    out.result.summary["within_0.01"] = ok;
    if (!ok) out.fail();
  }
}

void run_visits(const ExperimentConfig& c, Output& out) {
  {
    auto file = out.open("visits.csv");
    CsvWriter csv(file);
    csv.row("mean", "n", "partial_sum");
    json series = json::array();
    for (double mean : c.means) {
      const auto vs = visits_series(c.group, mean, c.n_max);
      for (std::size_t n = 0; n < vs.partial_sums.size(); ++n)
        csv.row(mean, n, static_cast<double>(vs.partial_sums[n]));
      json entry{{"mean", mean}, {"last", static_cast<double>(vs.partial_sums.back())}};
      if (vs.divergence_index) entry["divergence_index"] = *vs.divergence_index;
      series.push_back(entry);
    }
    out.result.summary["series"] = series;
  }
  // Monte Carlo visits to the start, compared with the series at the same
  // generation cutoff.
  const auto mu = first_law(c);
  const Elem e = identity(c.group);
  const auto res = origin_visit_experiment(mu, c.group, e, c.depth, c.replicates, c.seed, c.workers, c.budget);
  auto file = out.open("origin_visits.csv");
  CsvWriter csv(file);
  csv.row("depth", "replicate", "visit_count", "survived");
  bool truncated = false;
  for (std::size_t r = 0; r < res.replicates.size(); ++r) {
    const auto& rep = res.replicates[r];
    truncated = truncated || rep.truncated;
    for (std::size_t n = 0; n < rep.counts.size(); ++n) csv.row(n, r, rep.counts[n], rep.survived[n] != 0);
  }
  const auto series = visits_series(c.group, mu.mean(), c.depth);
  const auto& last = res.per_depth.back();
  const double expected = static_cast<double>(series.partial_sums.back());
  const bool ok = truncated || std::fabs(last.mean_all - expected) <= 4.0 * last.se_all + 1e-12;
  out.result.summary["mc_mean_visits"] = last.mean_all;
  out.result.summary["mc_std_error"] = last.se_all;
  out.result.summary["series_at_depth"] = expected;
  out.result.summary["mean_survived"] = last.mean_survived;
  out.result.summary["trend"] = res.trend == VisitTrend::Grows ? "grows" : "stabilizes";
  out.result.summary["truncated"] = truncated;
  if (!ok) out.fail();
}

void run_magic_fuzz(const ExperimentConfig& c, Output& out) {
  struct Row {
    std::size_t vertices, marks;
    int k, r;
    std::size_t branching, supported;
    std::int64_t bound;
    bool pass, implication;
  };
  std::vector<std::vector<Row>> rows(c.trees);
  parallel_for(c.trees, c.workers, [&](std::size_t t) {
    const FuzzCase fc = fuzz_case(c.seed, t, c.max_vertices);
    const OrientedTree tree(fc.tree, fc.anchor);
    for (int r : c.r_grid) {
      const auto bm = branching_margins(tree, fc.marks, r);
      const auto sm = supported_margins(tree, fc.marks, r);
      for (int k : c.k_grid) {
        std::size_t nb = 0, ns = 0;
        bool implication = true;
        for (std::size_t v = 0; v < bm.size(); ++v) {
          const bool b = bm[v] >= k;
          const bool s = sm[v] != kNoDescendant && sm[v] >= k;
          nb += b;
          ns += s;
          if (b && sm[v] != kNoDescendant && !s) implication = false;
        }
        std::vector<char> seen(fc.tree.size(), 0);
        std::size_t marks = 0;
        for (Vertex a : fc.marks) marks += !seen[static_cast<std::size_t>(a)]++;
        const auto bound = magic_bound(marks, k, r);
        rows[t].push_back({fc.tree.size(), marks, k, r, nb, ns, bound,
                           static_cast<std::int64_t>(nb) <= std::max<std::int64_t>(bound, 0), implication});
      }
    }
  });
  auto file = out.open("magic.csv");
  CsvWriter csv(file);
  csv.row("tree_id", "vertices", "marks", "k", "r", "branching_count", "supported_count", "bound", "pass");
  std::size_t violations = 0, implication_failures = 0;
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (const Row& row : rows[t]) {
      csv.row(t, row.vertices, row.marks, row.k, row.r, row.branching, row.supported, row.bound, row.pass);
      violations += !row.pass;
      implication_failures += !row.implication;
    }
  out.result.summary["trees"] = c.trees;
  out.result.summary["bound_violations"] = violations;
  out.result.summary["implication_failures"] = implication_failures;
  if (violations || implication_failures) out.fail();
}

MarkedGraph path_graph(std::size_t n) {
  MarkedGraph g{Graph(n), std::vector<char>(n, 1), std::vector<char>(n, 1)};
  for (std::size_t v = 1; v < n; ++v) g.graph.add_edge(static_cast<int>(v - 1), static_cast<int>(v));
  return g;
}

void run_mtp(const ExperimentConfig& c, Output& out) {
  const auto mu = first_law(c);
  Sampler sampler;
  if (c.sampler == "pullback") {
    TargetSpec target{parse_target_rule(c.target), c.ball_radius, c.offspring2};
    sampler = pullback_sampler(c.group, target, mu, c.depth, c.budget);
  } else if (c.sampler == "pushforward") {
    int reach = 0;
    for (const auto& name : c.transports) {
      const auto F = builtin_transport(name, c.transport_radius);
      reach = std::max(reach, F.reach + F.radius);
    }
    sampler = pushforward_sampler(c.group, mu, c.depth, reach, c.budget);
  } else if (c.sampler == "uniform-root") {
    sampler = uniform_root_sampler(path_graph(c.path_length));
  } else {
    sampler = fixed_root_sampler(path_graph(c.path_length), 0);
  }
  std::vector<TransportFunction> Fs;
  for (const auto& name : c.transports) Fs.push_back(builtin_transport(name, c.transport_radius));
  const auto reports = mc_mtp_test(sampler, Fs, builtin_weight(c.weight), MtpOptions{c.samples, c.alpha, c.seed, c.workers});
  json doc;
  doc["sampler"] = c.sampler;
  if (c.sampler == "pullback") doc["target"] = c.target;
  doc["weight"] = c.weight;
  doc["alpha"] = c.alpha;
  doc["reports"] = json::array();
  bool all = true;
  for (const auto& r : reports) {
    doc["reports"].push_back({{"transport", r.transport},
                              {"estimate", r.estimate},
                              {"std_error", r.std_error},
                              {"ci_low", r.ci_low},
                              {"ci_high", r.ci_high},
                              {"n", r.n},
                              {"inconclusive", r.inconclusive},
                              {"mean_weight", r.mean_weight},
                              {"pass", r.pass}});
    all = all && r.pass;
  }
  doc["pass"] = all;
  auto file = out.open("mtp_report.json");
  file << doc.dump(2) << '\n';
  out.result.summary = doc;
  if (!all) out.fail();
}

void run_intersect(const ExperimentConfig& c, Output& out) {
  const auto mu1 = first_law(c);
  const auto mu2 = second_law(c);
  const Elem e = identity(c.group);
  struct Row {
    std::uint64_t pairs;
    std::size_t shared, pulled;
    bool truncated;
    std::vector<double> fractions;  // per k in k_grid, r = r_grid.front()
  };
  std::vector<Row> rows(c.replicates);
  parallel_for(c.replicates, c.workers, [&](std::size_t i) {
    Rng rng = substream(c.seed, i);
    const auto rec = sample_intersections(mu1, mu2, c.group, e, e, c.depth, c.depth, rng, c.budget);
    Row row{rec.pair_count, rec.I.size(), rec.pulled.size(), rec.truncated, {}};
    const auto diag = intersection_ends_diagnostic(rec, c.k_grid, {c.r_grid.front()});
    for (const auto& entry : diag.census) row.fractions.push_back(entry.root_fraction);
    rows[i] = std::move(row);
  });
  auto file = out.open("intersections.csv");
  CsvWriter csv(file);
  csv.row("replicate", "pair_count", "shared_vertices", "pulled_back", "truncated");
  RunningStats pairs;
  bool truncated = false;
  std::vector<RunningStats> fractions(c.k_grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv.row(i, rows[i].pairs, rows[i].shared, rows[i].pulled, rows[i].truncated);
    pairs.add(static_cast<double>(rows[i].pairs));
    truncated = truncated || rows[i].truncated;
    for (std::size_t k = 0; k < rows[i].fractions.size(); ++k) fractions[k].add(rows[i].fractions[k]);
  }
  const double expected = static_cast<double>(expected_pairs_truncated(mu1.mean(), mu2.mean(), c.group, e, e, c.depth));
  const bool ok = truncated || std::fabs(pairs.mean() - expected) <= 4.0 * pairs.std_error() + 1e-12;
  out.result.summary["mean_pair_count"] = pairs.mean();
  out.result.summary["std_error"] = pairs.std_error();
  out.result.summary["expected_pair_count"] = expected;
  out.result.summary["truncated"] = truncated;
  out.result.summary["within_4_sigma"] = ok;
  json census = json::array();
  for (std::size_t k = 0; k < c.k_grid.size(); ++k)
    census.push_back({{"k", c.k_grid[k]},
                      {"r", c.r_grid.front()},
                      {"mean_root_fraction", fractions[k].mean()},
                      {"bound", 2.0 * c.r_grid.front() / c.k_grid[k]}});
  out.result.summary["branching_census"] = census;
  if (!ok) out.fail();
}

void run_thin_sweep(const ExperimentConfig& c, Output& out) {
  const auto sweep = thinned_intersection_sweep(first_law(c), second_law(c), c.group, c.p_grid, c.depth,
                                                c.replicates, c.seed, c.workers, c.budget);
  auto file = out.open("thin_sweep.csv");
  CsvWriter csv(file);
  csv.row("p", "replicate", "intersection_size", "pair_count", "truncated");
  for (std::size_t k = 0; k < c.p_grid.size(); ++k)
    for (std::size_t r = 0; r < sweep.replicates.size(); ++r) {
      const auto& point = sweep.replicates[r].points[k];
      csv.row(point.p, r, point.pulled.size(), point.pair_count, sweep.replicates[r].truncated);
    }
  out.result.summary["inclusion_violations"] = sweep.inclusion_violations;
  if (sweep.inclusion_violations) out.fail();
}

void run_ends(const ExperimentConfig& c, Output& out) {
  const auto res = trace_ends_experiment(first_law(c), c.group, c.depth, c.radius_grid, c.m_threshold,
                                         c.replicates, c.seed, c.workers, c.budget);
  auto file = out.open("ends.csv");
  CsvWriter csv(file);
  csv.row("radius", "replicate", "qualifying_components", "survived", "M_n");
  for (std::size_t k = 0; k < c.radius_grid.size(); ++k)
    for (std::size_t r = 0; r < res.replicates.size(); ++r)
      csv.row(c.radius_grid[k], r, res.replicates[r].qualifying[k], res.replicates[r].survived,
              res.replicates[r].M[k]);
  json medians = json::array();
  for (double m : res.median_surviving) medians.push_back(std::isnan(m) ? json(nullptr) : json(m));
  out.result.summary["median_qualifying_surviving"] = medians;
  out.result.summary["non_decreasing"] = res.non_decreasing;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config);
  std::filesystem::create_directories(out_dir);
  Output out{out_dir, {}};
  const std::string started_utc = utc_timestamp();
  const auto started = std::chrono::steady_clock::now();
  const std::string& name = config.experiment;
  if (name == "spectra") run_spectra(config, out);
  else if (name == "visits") run_visits(config, out);
  else if (name == "magic-fuzz") run_magic_fuzz(config, out);
  else if (name == "mtp-test") run_mtp(config, out);
  else if (name == "intersect") run_intersect(config, out);
  else if (name == "thin-sweep") run_thin_sweep(config, out);
  else run_ends(config, out);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json manifest;
  manifest["experiment"] = name;
  manifest["config"] = config.echo;
  manifest["seed"] = config.seed;
  manifest["workers"] = config.workers;
  manifest["library_version"] = library_version();
  manifest["rng"] = std::string(kRngDescription);
  manifest["started_utc"] = started_utc;
  manifest["wall_time_seconds"] = seconds;
  manifest["files"] = out.result.files;
  manifest["summary"] = out.result.summary;
  manifest["exit_code"] = out.result.exit_code;
  std::ofstream file(out_dir / "manifest.json", std::ios::binary);
  file << manifest.dump(2) << '\n';
  out.result.files.push_back("manifest.json");
  return out.result;
}

}  // namespace brw
