#include "crf/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "crf/cli/artifacts.hpp"
#include "crf/estimates/barrier.hpp"
#include "crf/estimates/checks.hpp"
#include "crf/estimates/chen.hpp"
#include "crf/estimates/uniqueness.hpp"
#include "crf/exhaustion/cutoff.hpp"

namespace crf::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<double> coords(const Point& z) {
  std::vector<double> v;
  for (int a = 0; a < z.size(); ++a) {
    v.push_back(z(a).real());
    v.push_back(z(a).imag());
  }
  return v;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

std::shared_ptr<const flow::Grid> make_grid(const ScenarioConfig& c, const geom::MetricProvider& g0) {
  const auto& gc = c.grid;
  if (gc.kind == "radial") return std::make_shared<const flow::Grid>(flow::Grid::radial(gc.r_max, gc.nodes));
  if (gc.kind == "box")
    return std::make_shared<const flow::Grid>(flow::Grid::box(g0.dim(), gc.lo, gc.hi, gc.nodes, false));
  geom::ChartDomain chart = g0.chart();
  if (gc.nodes > 0) chart.grid_resolution = gc.nodes;
  return std::make_shared<const flow::Grid>(flow::Grid::from_chart(chart));
}

PhaseSummary summarize(const std::string& phase, const flow::FlowRun& run) {
  PhaseSummary p;
  p.phase = phase;
  p.frames = static_cast<long>(run.frames.size());
  p.steps = run.steps;
  p.dt_min = run.dt_min;
  p.dt_max = run.dt_max;
  p.breakdown = run.breakdown;
  p.breakdown_message = run.breakdown_message;
  if (run.breakdown) p.breakdown_point = coords(run.breakdown_point);
  p.breakdown_time = run.breakdown_time;
  p.boundary = run.boundary_description;
  p.diags = run.diags;
  return p;
}

// Appends a continuation run (whose first frame repeats the last stored one).
void append(flow::FlowRun& base, flow::FlowRun&& more) {
  for (std::size_t k = 1; k < more.frames.size(); ++k) base.frames.push_back(std::move(more.frames[k]));
  for (std::size_t k = 1; k < more.diags.size(); ++k) base.diags.push_back(more.diags[k]);
  if (more.steps > 0) {
    base.dt_min = base.steps == 0 ? more.dt_min : std::min(base.dt_min, more.dt_min);
    base.dt_max = std::max(base.dt_max, more.dt_max);
  }
  base.steps += more.steps;
  if (more.breakdown) {
    base.breakdown = true;
    base.breakdown_message = more.breakdown_message;
    base.breakdown_point = more.breakdown_point;
    base.breakdown_time = more.breakdown_time;
  }
}

double param(const json& p, const char* key, double off) {
  return p[key].is_number() ? p[key].get<double>() : off;
}

struct Context {
  explicit Context(const ScenarioConfig& c) : cfg(c) {}
  const ScenarioConfig& cfg;
  geom::MetricPtr g0, h, model;
  double c = 0.0;
  const flow::FlowRun* run = nullptr;
  const flow::FlowRun* nrun = nullptr;
  flow::MatrixField hfield;
  flow::Exec exec = flow::Exec::Parallel;
};

MetricRef ref_of(const json& j) {
  MetricRef m;
  m.key = j["key"].get<std::string>();
  if (j.contains("params"))
    for (const auto& [k, v] : j["params"].items()) m.params[k] = v.get<double>();
  return m;
}

EstimateReport run_check(const CheckConfig& ck, Context& ctx, json& notes) {
  const json& p = ck.params;
  const std::string& name = ck.name;
  if (name == "exact_tracking") {
    const double c = p["einstein_constant"].is_number() ? p["einstein_constant"].get<double>() : ctx.c;
    return est::exact_solution_check(*ctx.run, *ctx.model, c, p["tolerance"].get<double>());
  }
  if (name == "trace_barrier") {
    est::BarrierConfig b = ctx.cfg.barrier;
    if (ctx.cfg.measure_alpha) b.alpha = est::measure_alpha(ctx.run->n, ctx.run->frames.front().metric, ctx.hfield);
    notes["barrier_alpha"] = b.alpha;
    return est::trace_barrier_check(*ctx.run, ctx.hfield, b, p["tolerance"].get<double>());
  }
  if (name == "scalar_lower_bound")
    return est::scalar_lower_bound_check(*ctx.run, p["tolerance"].get<double>(), ctx.exec);
  if (name == "scalar_evolution")
    return est::scalar_evolution_residual(*ctx.run, p["tolerance"].get<double>(), ctx.exec,
                                          param(p, "identity_tolerance", -1.0));
  if (name == "potential_monotonicity")
    return est::potential_monotonicity_check(*ctx.nrun, p["tolerance"].get<double>(), param(p, "dt_slack", -1.0));
  if (name == "ke_convergence") {
    est::KeConvergenceOptions o;
    o.threshold = p["threshold"].get<double>();
    o.r_limit = p["r_limit"].get<double>();
    o.tail_noise = p["tail_noise"].get<double>();
    geom::MetricPtr exact = ctx.cfg.exact_ke ? ctx.cfg.exact_ke->build() : nullptr;
    return est::ke_convergence_check(*ctx.nrun, exact.get(), o, ctx.exec);
  }
  if (name == "trace_heat_residual")
    return est::trace_heat_residual(*ctx.run, *ctx.h, p["tolerance"].get<double>(), param(p, "r_limit", 1e300));
  if (name == "chen_oracle") return est::chen_sweep_check(est::default_chen_sweep(), p["tolerance"].get<double>());
  if (name == "uniqueness_F") {
    const auto w1 = ref_of(p["omega1"]).build(), w2 = ref_of(p["omega2"]).build();
    const auto pts = est::disk_samples(p["samples"].get<int>(), p["r_max"].get<double>(), ctx.cfg.seed);
    return est::uniqueness_F_check(*w1, *w2, pts, p["tolerance"].get<double>(), p["ke_tolerance"].get<double>());
  }
  if (name == "cutoff_properties") {
    exh::CutoffSpec spec;
    spec.tau = p["tau"].get<double>();
    auto res = exh::frakF_properties_check(spec, p["derivative_order"].get<int>(), p["points"].get<int>());
    res.report.tolerance_used = p["tolerance"].get<double>();
    return res.report.finish();
  }
  throw ConfigError("unknown check '" + name + "'");
}

}  // namespace

bool RunReport::breakdown() const {
  for (const auto& p : phases)
    if (p.breakdown) return true;
  return false;
}

bool RunReport::passed() const {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return breakdown() == config.flow.expect_breakdown || !config.flow.enabled;
}

int RunReport::exit_code() const {
  if (breakdown() && !config.flow.expect_breakdown) return kBreakdown;
  return passed() ? kPass : kCheckFailure;
}

long RunReport::frames_written() const {
  long n = 0;
  for (const auto& p : phases) n += static_cast<long>(p.diags.size());
  return n;
}

json RunReport::to_json() const {
  json ph = json::array();
  for (const auto& p : phases)
    ph.push_back({{"phase", p.phase},
                  {"frames", p.frames},
                  {"steps", p.steps},
                  {"dt_min", p.dt_min},
                  {"dt_max", p.dt_max},
                  {"boundary", p.boundary},
                  {"breakdown",
                   {{"flag", p.breakdown},
                    {"message", p.breakdown_message},
                    {"point", p.breakdown_point},
                    {"time", num(p.breakdown ? p.breakdown_time : std::nan(""))}}}});
  json ch = json::array();
  for (const auto& c : checks) {
    json j = c.report;
    j["expect"] = c.expect_pass ? "pass" : "fail";
    j["ok"] = c.ok;
    j["error"] = c.error;
    ch.push_back(j);
  }
  json bd = {{"flag", breakdown()}, {"expected", config.flow.expect_breakdown}};
  for (const auto& p : phases)
    if (p.breakdown) {
      bd["phase"] = p.phase;
      bd["message"] = p.breakdown_message;
      bd["point"] = p.breakdown_point;
      bd["time"] = p.breakdown_time;
    }
  return {{"schema", "crf-run-report/1"},
          {"scenario", config.name},
          {"config", config.echo()},
          {"frames_written", frames_written()},
          {"phases", ph},
          {"breakdown", bd},
          {"checks", ch},
          {"notes", notes},
          {"passed", passed()},
          {"exit_code", exit_code()}};
}

std::string RunReport::frames_csv() const {
  std::ostringstream os;
  os << "phase,time,step,sup_lambda,inf_tR,ke_residual,min_eig,phi_prime_min,phi_prime_max\n";
  for (const auto& p : phases)
    for (const auto& d : p.diags)
      os << p.phase << ',' << fmt_num(d.time) << ',' << d.step << ',' << fmt_num(d.sup_lambda) << ','
         << fmt_num(d.inf_tR) << ',' << fmt_num(d.ke_residual) << ',' << fmt_num(d.min_eig) << ','
         << fmt_num(d.phi_prime_min) << ',' << fmt_num(d.phi_prime_max) << '\n';
  return os.str();
}

std::string RunReport::checks_csv() const {
  std::ostringstream os;
  os << "check,expect,satisfied,applicable,worst_slack,tolerance,ok\n";
  for (const auto& c : checks)
    os << c.report.name << ',' << (c.expect_pass ? "pass" : "fail") << ',' << c.report.satisfied << ','
       << c.report.applicable << ',' << fmt_num(c.report.worst_slack) << ','
       << fmt_num(c.report.tolerance_used) << ',' << c.ok << '\n';
  return os.str();
}

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& output_root) {
  const auto t_start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.config = cfg;
  Context ctx(cfg);
  if (!cfg.metric.key.empty()) ctx.g0 = cfg.metric.build();
  ctx.h = cfg.reference ? cfg.reference->build() : ctx.g0;
  ctx.model = cfg.flow.boundary.model ? cfg.flow.boundary.model->build() : ctx.g0;
  ctx.c = cfg.flow.boundary.einstein_constant;
  ctx.exec = flow::exec_from_string(cfg.flow.exec);

  flow::FlowRun run, nrun;
  if (cfg.flow.enabled) {
    auto grid = make_grid(cfg, *ctx.g0);
    flow::BoundaryKind kind;
    const auto& bk = cfg.flow.boundary.kind;
    if (bk == "auto")
      kind = grid->periodic() ? flow::BoundaryKind::Periodic : flow::BoundaryKind::Dirichlet;
    else
      kind = flow::boundary_kind_from_string(bk);
    flow::BoundaryData bd;
    if (kind == flow::BoundaryKind::Dirichlet) bd = flow::homothety_boundary(ctx.model, ctx.c);
    flow::FlowState st = flow::make_flow_state(grid, *ctx.g0, kind, bd);
    ctx.hfield = flow::sample_metric(*grid, *ctx.h);
    flow::RunConfig rc;
    rc.horizon = cfg.flow.horizon;
    rc.frame_interval = cfg.flow.frame_interval;
    rc.dt = cfg.flow.dt;
    rc.safety = cfg.flow.safety;
    rc.exec = ctx.exec;
    rc.form = flow::flow_form_from_string(cfg.flow.form);
    rc.max_steps = cfg.flow.max_steps;
    const bool from_initial = cfg.flow.normalized.start == "initial";
    // taken before the unnormalized phase moves the state
    flow::NormalizedFlowState ns0;
    if (cfg.flow.normalized.enabled && from_initial) {
      flow::BoundaryData nbd;
      if (kind == flow::BoundaryKind::Dirichlet) nbd = flow::normalized_homothety_boundary(ctx.model, ctx.c, 1.0);
      ns0 = flow::start_normalized(st, nbd);
    }
    run = flow::run_flow(st, rc, &ctx.hfield);
    if (cfg.flow.normalized.enabled && !from_initial && !run.breakdown && st.t < 1.0) {
      flow::RunConfig to_one = rc;
      to_one.horizon = 1.0;
      append(run, flow::run_flow(st, to_one, &ctx.hfield));
    }
    rep.phases.push_back(summarize("unnormalized", run));
    ctx.run = &run;
    if (cfg.flow.normalized.enabled && (from_initial || !run.breakdown)) {
      flow::NormalizedFlowState ns;
      if (from_initial) {
        ns = std::move(ns0);
      } else {
        flow::BoundaryData nbd;
        if (kind == flow::BoundaryKind::Dirichlet)
          nbd = flow::normalized_homothety_boundary(ctx.model, ctx.c, 1.0 - ctx.c * st.t);
        ns = flow::start_normalized(st, nbd);
      }
      flow::RunConfig nc = rc;
      nc.horizon = cfg.flow.normalized.horizon;
      nc.frame_interval = cfg.flow.normalized.frame_interval;
      nrun = flow::run_normalized(ns, nc, &ctx.hfield);
      rep.phases.push_back(summarize("normalized", nrun));
      ctx.nrun = &nrun;
      rep.notes["normalized_identity_defect"] = flow::normalized_identity_defect(ns);
    }
  }

  for (const auto& ck : cfg.checks) {
    CheckOutcome out;
    out.expect_pass = ck.expect_pass;
    try {
      if ((ck.name == "potential_monotonicity" || ck.name == "ke_convergence") && !ctx.nrun)
        throw PreconditionError("normalized phase did not run (breakdown in the unnormalized phase)");
      out.report = run_check(ck, ctx, rep.notes);
    } catch (const PreconditionError& e) {
      out.report = EstimateReport(ck.name, 0.0);
      out.report.applicable = false;
      out.report.details = {{"error", e.what()}};
      out.report.finish();
      out.error = e.what();
    }
    out.report.details["params"] = ck.params;
    out.ok = out.report.satisfied == out.expect_pass;
    rep.checks.push_back(std::move(out));
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (ctx.run) rep.run = std::make_shared<const flow::FlowRun>(std::move(run));
  if (ctx.nrun) rep.normalized_run = std::make_shared<const flow::FlowRun>(std::move(nrun));

  if (!output_root.empty()) {
    const fs::path dir = fs::path(output_root) / cfg.output_dir;
    fs::create_directories(dir);
    write_atomic((dir / "config.json").string(), cfg.echo().dump(2) + "\n");
    write_atomic((dir / "frames.csv").string(), rep.frames_csv());
    write_atomic((dir / "checks.csv").string(), rep.checks_csv());
    write_atomic((dir / "report.json").string(), rep.to_json().dump(2) + "\n");
    write_atomic((dir / "timing.json").string(),
                 json{{"scenario", cfg.name}, {"wall_seconds", rep.wall_seconds}}.dump(2) + "\n");
  }
  return rep;
}

std::string SuiteResult::table_csv() const {
  std::ostringstream os;
  os << "scenario,check,expect,satisfied,applicable,worst_slack,tolerance,ok\n";
  for (const auto& r : rows)
    os << r.scenario << ',' << r.check << ',' << r.expect << ',' << r.satisfied << ',' << r.applicable << ','
       << fmt_num(r.worst_slack) << ',' << fmt_num(r.tolerance) << ',' << r.ok << '\n';
  return os.str();
}

SuiteResult verify_all(const std::string& manifest, const std::string& output_root) {
  const json doc = load_yaml(manifest);
  SuiteResult res;
  if (!doc.is_object()) throw ConfigError("manifest '" + manifest + "': expected a mapping with 'scenarios'");
  const json list = doc.contains("scenarios") && !doc["scenarios"].is_null() ? doc["scenarios"] : json::array();
  if (!list.is_array()) throw ConfigError("manifest '" + manifest + "': 'scenarios' must be a list");
  if (list.empty()) res.warnings.push_back("manifest lists no scenarios");
  const fs::path base = fs::path(manifest).parent_path();
  std::vector<std::string> paths;
  for (const auto& e : list) {
    if (!e.is_string()) throw ConfigError("manifest '" + manifest + "': entries must be paths");
    const fs::path p = base / e.get<std::string>();
    if (!fs::exists(p)) throw ConfigError("manifest '" + manifest + "': missing config " + p.string());
    paths.push_back(p.string());
  }
  bool config_error = false, breakdown = false, failure = false;
  for (const auto& p : paths) {
    ScenarioConfig cfg;
    try {
      cfg = load_config(p);
    } catch (const ConfigError& e) {
      config_error = true;
      res.warnings.push_back(p + ": " + e.what());
      res.rows.push_back({p, "<config>", "pass", false, false, -INFINITY, 0.0, false});
      continue;
    }
    const RunReport r = run_scenario(cfg, output_root);
    if (r.exit_code() == kBreakdown) breakdown = true;
    if (!r.passed()) failure = true;
    for (const auto& c : r.checks)
      res.rows.push_back({cfg.name, c.report.name, c.expect_pass ? "pass" : "fail", c.report.satisfied,
                          c.report.applicable, c.report.worst_slack, c.report.tolerance_used, c.ok});
    if (r.breakdown() != cfg.flow.expect_breakdown && cfg.flow.enabled)
      res.rows.push_back({cfg.name, "<breakdown>", cfg.flow.expect_breakdown ? "fail" : "pass", !r.breakdown(),
                          true, 0.0, 0.0, false});
  }
  res.exit_code = config_error ? kConfigError : breakdown ? kBreakdown : failure ? kCheckFailure : kPass;
  if (!output_root.empty()) {
    fs::create_directories(output_root);
    write_atomic((fs::path(output_root) / "verification.csv").string(), res.table_csv());
  }
  return res;
}

std::string default_output_root() {
  const char* env = std::getenv("CRF_OUTPUT_ROOT");
  return env && *env ? env : "crf-output";
}

}  // namespace crf::cli
