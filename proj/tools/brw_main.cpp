// Command line runner: brw --config run.json [--seed N] [--workers N] [--out DIR]

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "brw/errors.hpp"
#include "brw/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Branching random walk experiment runner"};
  std::string config_path;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON experiment config")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (overrides the config)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.set_version_flag("--version", brw::library_version());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  brw::ExperimentConfig config;
  try {
    std::ifstream in(config_path);
    if (!in) throw brw::ConfigError("cannot read config file " + config_path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw brw::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (doc.is_object()) {
      if (*seed_opt) doc["seed"] = seed;
      if (*workers_opt) doc["workers"] = workers;
      if (*out_opt) doc["output_dir"] = out_dir;
    }
    config = brw::parse_config(doc);
  } catch (const brw::Error& e) {
    std::cerr << "brw: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto result = brw::run_experiment(config, config.output_dir);
    std::cout << result.summary.dump(2) << '\n';
    for (const auto& file : result.files) std::cout << "wrote " << config.output_dir << '/' << file << '\n';
    if (result.exit_code != 0) std::cerr << "brw: a checked assertion failed\n";
    return result.exit_code;
  } catch (const brw::Error& e) {
    std::cerr << "brw: " << e.what() << '\n';
    return 1;
  }
}
