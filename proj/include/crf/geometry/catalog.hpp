#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "crf/geometry/metric.hpp"

namespace crf::geom {

using MetricParams = std::map<std::string, double>;

struct CatalogEntry {
  std::string key;
  std::string description;
  MetricParams defaults;  ///< accepted parameters with their default values
  std::function<MetricPtr(const MetricParams&)> make;
};

/// Named metrics available to scenario configs. Every entry also accepts "scale" (c g).
const std::vector<CatalogEntry>& metric_catalog();
const CatalogEntry* find_metric(const std::string& key);
/// Throws ConfigError on an unknown key or parameter.
MetricPtr make_metric(const std::string& key, const MetricParams& params = {});

}  // namespace crf::geom
