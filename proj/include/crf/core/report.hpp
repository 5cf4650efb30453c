#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace crf {

/// Outcome of one estimate check; satisfied iff worst_slack >= -tolerance_used.
struct EstimateReport {
  std::string name;
  bool satisfied = true;
  bool applicable = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> worst_point;  ///< real coordinates of the worst sample
  double worst_time = std::numeric_limits<double>::quiet_NaN();
  double tolerance_used = 0.0;
  long samples = 0;
  nlohmann::json details = nlohmann::json::object();

  EstimateReport() = default;
  EstimateReport(std::string n, double tol) : name(std::move(n)), tolerance_used(tol) {}

  /// Record one slack sample; keeps the worst.
  void offer(double slack, const std::vector<double>& point = {},
             double time = std::numeric_limits<double>::quiet_NaN()) {
    ++samples;
    if (std::isnan(slack) || slack < worst_slack) {
      worst_slack = slack;
      worst_point = point;
      worst_time = time;
    }
  }
  /// Sets `satisfied` from the worst slack.
  EstimateReport& finish() {
    satisfied = applicable && !std::isnan(worst_slack) && worst_slack >= -tolerance_used;
    return *this;
  }
};

inline void to_json(nlohmann::json& j, const EstimateReport& r) {
  const auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
  };
  j = {{"name", r.name},
       {"satisfied", r.satisfied},
       {"applicable", r.applicable},
       {"worst_slack", num(r.worst_slack)},
       {"worst_location", {{"point", r.worst_point}, {"time", num(r.worst_time)}}},
       {"tolerance_used", r.tolerance_used},
       {"samples", r.samples},
       {"details", r.details}};
}

}  // namespace crf
