// crf: run scenarios, verify suites, list catalog metrics, plot run directories.
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "crf/cli/artifacts.hpp"
#include "crf/cli/runner.hpp"

namespace cli = crf::cli;

namespace {

void print_checks(const cli::RunReport& r) {
  for (const auto& c : r.checks) {
    std::cout << (c.ok ? "  ok    " : "  FAIL  ") << std::left << std::setw(24) << c.report.name
              << " expect=" << (c.expect_pass ? "pass" : "fail") << " satisfied=" << c.report.satisfied
              << " worst_slack=" << cli::fmt_num(c.report.worst_slack);
    if (!c.error.empty()) std::cout << "  (" << c.error << ")";
    std::cout << '\n';
  }
  for (const auto& p : r.phases)
    if (p.breakdown) std::cout << "  breakdown in " << p.phase << " phase: " << p.breakdown_message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chern-Ricci flow scenarios and estimate checks"};
  app.require_subcommand(1);
  std::string output_root = cli::default_output_root();
  app.add_option("-o,--output-root", output_root, "artifact root (default: $CRF_OUTPUT_ROOT or ./crf-output)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run one scenario config");
  run->add_option("config", config_path, "scenario YAML")->required();
  bool plot_after = false;
  run->add_flag("--plot", plot_after, "also write SVG plots");

  std::string manifest;
  auto* verify = app.add_subcommand("verify", "run every scenario of a suite manifest");
  verify->add_option("manifest", manifest, "suite YAML")->required();

  auto* list = app.add_subcommand("list-metrics", "print the metric catalog");

  std::string run_dir;
  auto* plot = app.add_subcommand("plot", "write SVG plots from a run directory");
  plot->add_option("run_dir", run_dir, "directory holding frames.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  try {
    if (*run) {
      const cli::ScenarioConfig cfg = cli::load_config(config_path);
      const cli::RunReport r = cli::run_scenario(cfg, output_root);
      std::cout << cfg.name << ": " << (r.passed() ? "pass" : "FAIL") << " (" << r.frames_written()
                << " frames, " << std::setprecision(3) << r.wall_seconds << " s)\n";
      print_checks(r);
      if (plot_after) cli::plot_run_dir((std::filesystem::path(output_root) / cfg.output_dir).string());
      return r.exit_code();
    }
    if (*verify) {
      const cli::SuiteResult s = cli::verify_all(manifest, output_root);
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << std::left << std::setw(28) << "scenario" << std::setw(26) << "check" << std::setw(8)
                << "expect" << std::setw(24) << "worst_slack" << "result\n";
      for (const auto& row : s.rows)
        std::cout << std::setw(28) << row.scenario << std::setw(26) << row.check << std::setw(8) << row.expect
                  << std::setw(24) << cli::fmt_num(row.worst_slack) << (row.ok ? "ok" : "FAIL") << '\n';
      return s.exit_code;
    }
    if (*list) {
      for (const auto& e : crf::geom::metric_catalog()) {
        std::cout << e.key;
        for (const auto& [k, v] : e.defaults) std::cout << ' ' << k << '=' << v;
        std::cout << "\n    " << e.description << '\n';
      }
      std::cout << "every metric also accepts scale=<c> (c g)\n";
      return 0;
    }
    if (*plot) {
      for (const auto& f : cli::plot_run_dir(run_dir)) std::cout << f << '\n';
      return 0;
    }
  } catch (const crf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const crf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kConfigError;
  }
  return 0;
}
