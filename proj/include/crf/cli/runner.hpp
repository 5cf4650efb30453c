#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "crf/cli/config.hpp"
#include "crf/core/report.hpp"
#include "crf/flow/flow.hpp"

namespace crf::cli {

enum ExitCode { kPass = 0, kCheckFailure = 1, kConfigError = 2, kBreakdown = 3 };

struct CheckOutcome {
  EstimateReport report;
  bool expect_pass = true;
  bool ok = false;  ///< outcome matches the expectation
  std::string error;  ///< precondition failure, if any
};

struct PhaseSummary {
  std::string phase;  ///< unnormalized | normalized
  long frames = 0;
  long steps = 0;
  double dt_min = 0.0, dt_max = 0.0;
  bool breakdown = false;
  std::string breakdown_message;
  std::vector<double> breakdown_point;
  double breakdown_time = 0.0;
  std::string boundary;
  std::vector<flow::FrameDiag> diags;
};

struct RunReport {
  ScenarioConfig config;
  std::vector<PhaseSummary> phases;
  std::vector<CheckOutcome> checks;
  nlohmann::json notes = nlohmann::json::object();
  double wall_seconds = 0.0;
  /// Frame archives of the two phases (null when the phase did not run).
  std::shared_ptr<const flow::FlowRun> run, normalized_run;

  bool breakdown() const;
  bool passed() const;  ///< every check matched its expectation and breakdowns were expected
  int exit_code() const;
  long frames_written() const;
  /// Deterministic part of the report (no wall time).
  nlohmann::json to_json() const;
  std::string frames_csv() const;
  std::string checks_csv() const;
};

/// Runs the flow phases and checks; writes artifacts under output_root / config.output_dir
/// unless output_root is empty.
RunReport run_scenario(const ScenarioConfig& config, const std::string& output_root);

struct SuiteRow {
  std::string scenario;
  std::string check;
  std::string expect;
  bool satisfied = false;
  bool applicable = true;
  double worst_slack = 0.0;
  double tolerance = 0.0;
  bool ok = false;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  std::vector<std::string> warnings;
  int exit_code = kPass;
  std::string table_csv() const;
};

/// Manifest: YAML with a `scenarios` list of config paths relative to the manifest.
SuiteResult verify_all(const std::string& manifest, const std::string& output_root);

/// $CRF_OUTPUT_ROOT, else ./crf-output.
std::string default_output_root();

}  // namespace crf::cli
