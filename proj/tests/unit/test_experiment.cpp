#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "brw/errors.hpp"
#include "brw/experiment.hpp"

using namespace brw;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("brw_test_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(json::parse(R"({"experiment":"spectra","group":{"kind":"tree","param":3},"n_max":50})"));
  CHECK(c.experiment == "spectra");
  CHECK(c.group == GroupSpec::regular_tree(3));
  CHECK(c.n_max == 50);
  CHECK(parse_config(json::parse(R"({"experiment":"visits","mean":1.05})")).means == std::vector<double>{1.05});
  CHECK(parse_config(json::parse(R"({"experiment":"visits","seed":"12"})")).seed == 12);

  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment":"spectra","bogus":1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment":"nope"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment":"spectra","n_max":"many"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment":"magic-fuzz","k_grid":[]})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment":"mtp-test","samples":10})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment":"mtp-test","transports":["nope"]})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment":"spectra","group":{"kind":"RegularTree","param":1}})")),
                  Error);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment":"visits","offspring":[0.5,0.2]})")), Error);
}

TEST_CASE("outputs do not depend on the worker count") {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"magic-fuzz", R"({"experiment":"magic-fuzz","trees":60,"max_vertices":80,"seed":3})"},
      {"thin-sweep", R"({"experiment":"thin-sweep","replicates":60,"depth":8,"offspring":[0.42265,0,0.57735],"seed":4})"},
      {"ends", R"({"experiment":"ends","replicates":20,"depth":14,"seed":5})"},
      {"intersect", R"({"experiment":"intersect","replicates":200,"depth":5,"seed":6})"},
      {"mtp-test", R"({"experiment":"mtp-test","samples":1000,"depth":8,"seed":7})"},
  };
  for (const auto& [name, text] : cases) {
    auto c = parse_config(json::parse(text));
    const auto a = scratch(name + "_1");
    const auto b = scratch(name + "_8");
    c.workers = 1;
    const auto ra = run_experiment(c, a);
    c.workers = 8;
    const auto rb = run_experiment(c, b);
    CHECK(ra.exit_code == rb.exit_code);
    REQUIRE(ra.files == rb.files);
    for (const auto& f : ra.files) {
      if (f == "manifest.json") continue;
      INFO(name << "/" << f);
      CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto manifest = json::parse(slurp(a / "manifest.json"));
    CHECK(manifest.at("seed") == c.seed);
    CHECK(manifest.contains("rng"));
    CHECK(manifest.contains("files"));
  }
}

TEST_CASE("failing checks set exit code 2") {
  auto c = parse_config(json::parse(
      R"({"experiment":"mtp-test","sampler":"fixed-root","transports":["other-leaf"],"samples":1000})"));
  const auto dir = scratch("fixed");
  CHECK(run_experiment(c, dir).exit_code == 2);
  const auto report = json::parse(slurp(dir / "mtp_report.json"));
  CHECK(report.dump().find("\"pass\":false") != std::string::npos);
}

TEST_CASE("fuzz cases") {
  for (std::size_t i = 0; i < 30; ++i) {
    const auto fc = fuzz_case(1, i, 50);
    CHECK(fc.tree.size() >= 1);
    CHECK(fc.tree.size() <= 50);
    CHECK_FALSE(fc.marks.empty());
    CHECK(fc.anchor < static_cast<Vertex>(fc.tree.size()));
    const auto again = fuzz_case(1, i, 50);
    CHECK(again.marks == fc.marks);
    CHECK(again.tree.to_text() == fc.tree.to_text());
  }
}
