#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "brw/group_graph.hpp"
#include "brw/gw_trees.hpp"

namespace brw {

/// Runner configuration; see docs/config.md for the JSON schema.
struct ExperimentConfig {
  std::string experiment;
  GroupSpec group = GroupSpec::regular_tree(4);
  std::vector<double> offspring{0.45, 0.0, 0.55};
  std::vector<double> offspring2;  ///< defaults to `offspring`
  int depth = 12;
  std::size_t budget = 2'000'000;
  std::size_t replicates = 1000;
  int n_max = 2000;
  std::vector<double> means{1.0};
  std::vector<int> k_grid{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> r_grid{1, 2, 3};
  std::vector<double> p_grid{0.5, 0.9, 1.0};
  std::vector<int> radius_grid{1, 2, 3, 4};
  std::size_t m_threshold = 4;
  double alpha = 0.01;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  unsigned workers = 1;
  // mtp-test
  std::string sampler = "pullback";
  std::string target = "start";
  int ball_radius = 1;
  std::vector<std::string> transports{"leaf-target", "nearest-marked", "degree-ratio"};
  int transport_radius = 2;
  std::string weight = "one";
  std::size_t samples = 10'000;
  std::size_t path_length = 5;
  // magic-fuzz
  std::size_t trees = 10'000;
  std::size_t max_vertices = 500;

  nlohmann::json echo;  ///< the document as parsed, after overrides
};

std::vector<std::string> experiment_names();

/// Throws ConfigError on unknown keys, unknown experiment names, wrong
/// types, empty grids or values outside the documented caps.
ExperimentConfig parse_config(const nlohmann::json& doc);
void validate_config(const ExperimentConfig& config);

struct RunResult {
  int exit_code = 0;  ///< 0 pass, 2 a checked assertion failed
  std::vector<std::string> files;
  nlohmann::json summary;
};

/// Runs the experiment and writes its fixed-name outputs plus manifest.json
/// into `out_dir` (created if needed).  Outputs other than the manifest are
/// a function of (config, seed) only.
RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

std::string library_version();

/// Random input for the counting-bound fuzzer: a tree with 1..max_vertices
/// vertices (shape cycles through uniform-attachment, short-range
/// attachment and hub-heavy attachment with `index`), a nonempty random mark
/// set and a random anchor.  Drawn from substream(seed, index).
struct FuzzCase {
  MarkedTree tree;
  std::vector<Vertex> marks;
  Vertex anchor = 0;
};
FuzzCase fuzz_case(std::uint64_t seed, std::size_t index, std::size_t max_vertices);

}  // namespace brw
