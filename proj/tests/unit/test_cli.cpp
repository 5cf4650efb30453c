#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "crf/cli/artifacts.hpp"
#include "crf/cli/config.hpp"
#include "crf/geometry/catalog.hpp"

using namespace crf;
using nlohmann::json;

TEST_CASE("catalog builds every entry with its defaults") {
  for (const auto& e : geom::metric_catalog()) {
    const auto m = geom::make_metric(e.key);
    CHECK(m);
  }
  CHECK_THROWS_AS(geom::make_metric("klein-bottle"), ConfigError);
  CHECK_THROWS_AS(geom::make_metric("poincare-disk", {{"radius", 2.0}}), ConfigError);
  const auto s = geom::make_metric("poincare-disk", {{"scale", 3.0}});
  Point z(1);
  z(0) = 0.5;
  CHECK(s->eval(z)(0, 0).real() == doctest::Approx(3.0 / (0.75 * 0.75)));
}

TEST_CASE("config defaults and echo") {
  const auto c = cli::parse_config(json::parse(R"({"scenario": "x", "metric": {"key": "flat-torus"},
                                                  "checks": ["scalar_lower_bound"]})"));
  CHECK(c.flow.safety == 0.2);
  CHECK(c.checks.size() == 1);
  CHECK(c.checks[0].params["tolerance"].get<double>() == 1e-2);
  const auto e = c.echo();
  CHECK(e["metric"]["params"]["n"].get<double>() == 1.0);
  CHECK(c.output_dir == "x");
}

TEST_CASE("config validation lists every problem") {
  const json doc = json::parse(R"({
    "scenario": "bad",
    "metric": {"key": "nowhere"},
    "grid": {"kind": "hex", "nodes": 4},
    "flow": {"horizon": -1, "exec": "gpu"},
    "checks": ["ke_convergence", {"name": "trace_barrier", "tolerance": "tiny"}],
    "extra": 1})");
  try {
    cli::parse_config(doc);
    FAIL("expected a validation error");
  } catch (const cli::ConfigValidationError& e) {
    const auto has = [&](const std::string& s) {
      return std::any_of(e.problems.begin(), e.problems.end(),
                         [&](const std::string& p) { return p.find(s) != std::string::npos; });
    };
    CHECK(has("nowhere"));
    CHECK(has("hex"));
    CHECK(has("nodes"));
    CHECK(has("horizon"));
    CHECK(has("gpu"));
    CHECK(has("extra"));
    CHECK(has("tolerance"));
    CHECK(has("normalized"));  // ke_convergence without a normalized phase
    CHECK(e.problems.size() >= 8);
  }
}

TEST_CASE("flow-free scenarios need no metric") {
  const auto c = cli::parse_config(json::parse(R"({"scenario": "c", "flow": {"enabled": false},
                                                  "checks": ["chen_oracle"]})"));
  CHECK(c.metric.key.empty());
  CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"scenario": "c", "checks": ["chen_oracle"]})")),
                  cli::ConfigValidationError);
}

TEST_CASE("yaml loader keeps numbers, booleans and strings apart") {
  const auto p = std::filesystem::temp_directory_path() / "crf_unit_yaml.yaml";
  std::ofstream(p) << "a: 1.5e-3\nb: true\nc: cfl\nd: [1, two]\ne: '3'\n";
  const auto j = cli::load_yaml(p.string());
  CHECK(j["a"].get<double>() == 1.5e-3);
  CHECK(j["b"].get<bool>());
  CHECK(j["c"].get<std::string>() == "cfl");
  CHECK(j["d"][0].is_number());
  CHECK(j["e"].is_string());
  std::filesystem::remove(p);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(cli::fmt_num(v)) == v);
  CHECK(cli::fmt_num(std::nan("")) == "nan");
  CHECK(cli::fmt_num(-HUGE_VAL) == "-inf");
}
