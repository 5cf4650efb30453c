#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crf/estimates/barrier.hpp"
#include "crf/geometry/catalog.hpp"

namespace crf::cli {

struct MetricRef {
  std::string key;
  geom::MetricParams params;
  geom::MetricPtr build() const { return geom::make_metric(key, params); }
};

struct GridConfig {
  std::string kind = "chart";  ///< chart | radial | box
  double r_max = 0.95;         ///< radial
  double lo = 0.0, hi = 1.0;   ///< box (Dirichlet faces)
  int nodes = 0;               ///< 0: chart resolution
};

struct BoundaryConfig {
  std::string kind = "auto";  ///< auto | periodic | dirichlet | extrapolate
  std::optional<MetricRef> model;  ///< Einstein model supplying Dirichlet data
  double einstein_constant = 0.0;  ///< Ric(model) = c model
};

struct NormalizedConfig {
  bool enabled = false;
  /// after_flow: g~(0) = g(1) from the unnormalized phase; initial: g~(0) = g0.
  std::string start = "after_flow";
  double horizon = 0.0;
  double frame_interval = 0.5;
};

struct FlowConfig {
  bool enabled = true;
  double horizon = 1.0;
  double frame_interval = 0.1;
  double dt = 0.0;  ///< 0: CFL-limited substeps
  double safety = 0.2;
  std::string exec = "parallel";
  std::string form = "metric";
  long max_steps = 5'000'000;
  bool expect_breakdown = false;
  BoundaryConfig boundary;
  NormalizedConfig normalized;
};

struct CheckConfig {
  std::string name;
  bool expect_pass = true;
  nlohmann::json params;  ///< resolved: defaults merged with the file
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 0;
  MetricRef metric;
  std::optional<MetricRef> reference;  ///< h; defaults to the initial metric
  std::optional<MetricRef> exact_ke;
  GridConfig grid;
  FlowConfig flow;
  est::BarrierConfig barrier;
  bool measure_alpha = true;  ///< barrier.alpha: measure
  std::vector<CheckConfig> checks;
  std::string output_dir;
  std::string source;  ///< file the config came from

  /// Every field with defaults filled in.
  nlohmann::json echo() const;
};

/// Collects every problem in a config before failing.
class ConfigValidationError : public ConfigError {
 public:
  explicit ConfigValidationError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

/// Check names the runner understands, with default parameters.
const nlohmann::json& check_defaults();

ScenarioConfig parse_config(const nlohmann::json& doc, const std::string& source = "<memory>");
ScenarioConfig load_config(const std::string& path);
/// YAML document to JSON (numbers, booleans and null recognised in plain scalars).
nlohmann::json load_yaml(const std::string& path);

}  // namespace crf::cli
