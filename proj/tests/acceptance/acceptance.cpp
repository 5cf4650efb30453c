// Acceptance suite: one PASS/FAIL line per criterion. Expected values are computed here from
// closed forms, independently of the library code paths they check.
//
//   acceptance            run everything
//   acceptance 4 9        run selected criteria
//   --expect-fail 1       criterion 1 is reported as FAIL but does not fail the exit status;
//                         an unexpected pass does
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "crf/cli/runner.hpp"
#include "crf/estimates/checks.hpp"
#include "crf/estimates/chen.hpp"
#include "crf/estimates/uniqueness.hpp"
#include "crf/exhaustion/completion.hpp"
#include "crf/flow/flow.hpp"
#include "crf/geometry/curvature.hpp"
#include "crf/geometry/hsc.hpp"
#include "crf/geometry/models.hpp"
#include "crf/geometry/royden.hpp"

using namespace crf;

namespace {

const std::string kScenarios = CRF_SCENARIO_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double poincare_lambda(double r) { return 1.0 / ((1.0 - r * r) * (1.0 - r * r)); }

// Scenario runs are shared between criteria.
const cli::RunReport& scenario(const std::string& file) {
  static std::map<std::string, cli::RunReport> cache;
  auto it = cache.find(file);
  if (it == cache.end()) it = cache.emplace(file, cli::run_scenario(cli::load_config(kScenarios + "/" + file), "")).first;
  return it->second;
}

// ---------------------------------------------------------------------------------------------

Outcome curvature_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto analytic = geom::poincare_disk();
  const auto fd = geom::finite_difference_of(analytic, 4, 1e-3);
  // error of HSC, scalar, Ric + 2g (relative to g) and g itself
  const auto error = [](const geom::MetricProvider& g, const Point& z, double lam) {
    const auto pkg = geom::chern_curvature(g, z);
    return std::max({std::abs(geom::hsc_max(pkg).kappa + 2.0), std::abs(pkg.scalar + 2.0),
                     std::abs(pkg.ricci(0, 0) + 2.0 * lam) / lam, std::abs(pkg.g(0, 0).real() - lam) / lam});
  };
  double err_a = 0.0, err_fd = 0.0, r_ok = 0.0;
  bool crossed = false;
  for (int k = 1; k <= 50; ++k) {
    const double r = 0.95 * k / 50.0;
    Point z(1);
    z(0) = std::polar(r, 0.7 * k);
    const double lam = poincare_lambda(r);
    err_a = std::max(err_a, error(*analytic, z, lam));
    const double e = error(*fd, z, lam);
    err_fd = std::max(err_fd, e);
    if (e > 1e-6) crossed = true;
    if (!crossed) r_ok = r;
  }
  const double secs = seconds_since(t0);
  return {err_a <= 1e-10 && err_fd <= 1e-6 && secs < 5.0,
          fmt("analytic err %.2e (<= 1e-10); FD order 4 step 1e-3 err %.2e (<= 1e-6), within bound up to r = %.3f; "
              "%.2f s",
              err_a, err_fd, r_ok, secs)};
}

Outcome kahler_identity() {
  const auto g = geom::torsion_example_1();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0, torsion = 0.0;
  for (int k = 0; k < 100; ++k) {
    Point z(2);
    z(0) = cd(u(rng), u(rng));
    z(1) = cd(u(rng), u(rng));
    worst = std::max(worst, geom::kahler_identity_residual(*g, z));
    const auto T = geom::torsion(*g, z).torsion_lower;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) torsion = std::max(torsion, std::abs(T(i, j, l)));
  }
  return {worst <= 1e-10 && torsion > 0.1,
          fmt("max residual %.2e over 100 points (<= 1e-10); max |T| %.3f (metric is not Kahler)", worst, torsion)};
}

Outcome royden() {
  const auto h = geom::bergman_ball(2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> gauss;
  double worst = 1e300;
  int samples = 0, skipped = 0;
  for (int p = 0; p < 100; ++p) {
    Point z(2);
    do {
      z(0) = 0.85 * cd(u(rng), u(rng));
      z(1) = 0.85 * cd(u(rng), u(rng));
    } while (z.norm() >= 0.85);
    const auto pkg = geom::chern_curvature(*h, z);
    const auto rep = geom::hsc_max(pkg);
    for (int q = 0; q < 10; ++q) {
      // random positive Hermitian g = A A^* + 0.05 I
      CMat A(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) A(i, j) = cd(gauss(rng), gauss(rng));
      const CMat g = A * A.adjoint() + 0.05 * CMat::Identity(2, 2);
      const auto r = geom::royden_from(g, pkg, rep, rep.kappa);
      ++samples;
      if (r.skipped) ++skipped;
      else worst = std::min(worst, r.slack);
    }
  }
  return {samples == 1000 && skipped == 0 && worst >= -1e-8,
          fmt("min slack %.3e over %d samples (>= -1e-8), %d skipped", worst, samples, skipped)};
}

Outcome trace_identity() {
  const auto gp = geom::poincare_disk();
  std::vector<double> res;
  std::string levels;
  for (int lvl = 0; lvl < 3; ++lvl) {
    // halving h on [0, r_max] keeps every old node: N -> 2N - 1
    const int N = 255 * (1 << lvl) + 1;
    const double dt = 1e-4 / (1 << lvl);
    auto grid = std::make_shared<const flow::Grid>(flow::Grid::radial(0.95, N));
    auto st = flow::make_flow_state(grid, *gp, flow::BoundaryKind::Dirichlet, flow::homothety_boundary(gp, -2.0));
    flow::RunConfig rc;
    rc.horizon = 4 * dt;
    rc.frame_interval = dt;
    rc.safety = 1.0;
    const auto run = flow::run_flow(st, rc);
    res.push_back(est::trace_heat_residual(run, *gp, 1e-4).details["sup_residual"].get<double>());
    levels += fmt("%s%d/%.1e: %.2e", lvl ? ", " : "", N, dt, res.back());
  }
  const bool pass = res[0] <= 1e-4 && res[0] / res[1] >= 3.0 && res[1] / res[2] >= 3.0;
  return {pass, fmt("residual by (nodes/dt) %s; ratios %.1f, %.1f (>= 3)", levels.c_str(), res[0] / res[1], res[1] / res[2])};
}

Outcome exact_tracking() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gp = geom::poincare_disk();
  auto grid = std::make_shared<const flow::Grid>(flow::Grid::radial(0.95, 512));
  auto st = flow::make_flow_state(grid, *gp, flow::BoundaryKind::Dirichlet, flow::homothety_boundary(gp, -2.0));
  flow::RunConfig rc;
  rc.horizon = 0.5;
  rc.frame_interval = 0.05;
  rc.safety = 2.0;
  const auto run = flow::run_flow(st, rc);
  double worst = 0.0;
  for (const auto& f : run.frames)
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double exact = (1.0 + 2.0 * f.time) * poincare_lambda(grid->radius(i));
      worst = std::max(worst, std::abs(f.metric[i].real() - exact) / exact);
    }
  const double secs = seconds_since(t0);
  const bool reached = !run.frames.empty() && std::abs(run.frames.back().time - 0.5) < 1e-12;
  return {reached && !run.breakdown && worst <= 1e-8 && secs < 30.0,
          fmt("sup relative error %.2e over %zu frames, %ld RK4 steps (<= 1e-8), %.2f s", worst, run.frames.size(),
              run.steps, secs)};
}

// Radial scalar curvature from the profile alone: R = -((log lambda)'' + (log lambda)'/r) / (4 lambda).
std::vector<double> radial_scalar(const flow::Grid& grid, const flow::MatrixField& g) {
  const std::size_t N = grid.size();
  const double h = grid.step();
  std::vector<double> L(N), R(N, std::nan(""));
  for (std::size_t i = 0; i < N; ++i) L[i] = std::log(g[i].real());
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double lm = i ? L[i - 1] : L[1];  // even in r
    const double l2 = (L[i + 1] - 2.0 * L[i] + lm) / (h * h);
    const double lap = i ? l2 + (L[i + 1] - lm) / (2.0 * h * grid.radius(i)) : 2.0 * l2;
    R[i] = -lap / (4.0 * g[i].real());
  }
  return R;
}

Outcome scalar_bound() {
  const auto& rep = scenario("perturbed-disk.yaml");
  const auto& run = *rep.run;
  double worst = 1e300, at = 0.0;
  for (const auto& f : run.frames) {
    const auto R = radial_scalar(*run.grid, f.metric);
    for (double v : R)
      if (!std::isnan(v) && f.time * v + 1.0 < worst) worst = f.time * v + 1.0, at = f.time;
  }
  const bool reached = std::abs(run.frames.back().time - 1.0) < 1e-12;
  return {reached && worst >= -1e-2,
          fmt("min tR + n = %.6f at t = %.2f over %zu frames on t in [0, 1] (>= -1e-2)", worst, at, run.frames.size())};
}

Outcome scalar_evolution() {
  // the inequality on every run that has both phases of interest
  double ineq = 1e300;
  for (const char* f : {"bumpy-torus.yaml", "hermitian-torus.yaml", "perturbed-disk.yaml", "flat-torus-stationary.yaml"}) {
    const auto& r = scenario(f);
    for (const auto& c : r.checks)
      if (c.report.name == "scalar_evolution") ineq = std::min(ineq, c.report.worst_slack);
  }
  // identity residual under refinement of the torus grid, frames spaced with h
  const auto g0 = geom::bumpy_torus(0.3);
  std::vector<double> res;
  for (int N : {32, 64, 128}) {
    auto chart = g0->chart();
    chart.grid_resolution = N;
    auto grid = std::make_shared<const flow::Grid>(flow::Grid::from_chart(chart));
    auto st = flow::make_flow_state(grid, *g0, flow::BoundaryKind::Periodic);
    flow::RunConfig rc;
    rc.horizon = 0.2;
    rc.frame_interval = grid->step() * 0.05;
    rc.safety = 1.0;
    const auto run = flow::run_flow(st, rc);
    res.push_back(est::scalar_evolution_residual(run).details["identity_residual"].get<double>());
  }
  const double p1 = std::log2(res[0] / res[1]), p2 = std::log2(res[1] / res[2]);
  return {ineq >= -1e-10 && p2 >= 1.8 && p1 >= 1.5,
          fmt("min normalized |Ric|^2 - R^2/n = %.2e (>= -1e-10); identity residual %.2e, %.2e, %.2e at N = 32, 64, "
              "128, observed order %.2f, %.2f",
              ineq, res[0], res[1], res[2], p1, p2)};
}

Outcome chen() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = est::chen_sweep_check(est::default_chen_sweep(), 1e-6);
  // beta = 0 has the closed form sup_{t<=T} t q = q0 T / (1 + alpha q0 T)
  double closed = 0.0;
  for (double a : {0.1, 1.0, 10.0})
    for (double q0 : {0.1, 1.0, 1000.0}) {
      const auto r = est::chen_ode_oracle(a, 0.0, 2.0, q0);
      closed = std::max(closed, std::abs(r.sup_tq - q0 * 2.0 / (1.0 + a * q0 * 2.0)));
    }
  const double secs = seconds_since(t0);
  return {rep.satisfied && rep.samples >= 625 && closed <= 1e-9 && secs < 10.0,
          fmt("%ld sweep points, worst bound slack %.2e (>= -1e-6), max sup/bound %.5f; beta = 0 closed-form "
              "error %.1e; %.2f s",
              rep.samples, rep.worst_slack, rep.details["max_ratio_sup_over_bound"].get<double>(), closed, secs)};
}

Outcome normalized_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& rep = scenario("perturbed-disk-normalized.yaml");
  const double secs = seconds_since(t0);
  if (!rep.normalized_run) return {false, "normalized phase did not run"};
  const auto& nr = *rep.normalized_run;
  const auto& last = nr.frames.back();
  double err = 0.0;
  for (std::size_t i = 0; i < nr.grid->size(); ++i) {
    const double r = nr.grid->radius(i);
    if (r > 0.9 + 1e-12) continue;
    const double ke = 2.0 * poincare_lambda(r);
    const double d = std::abs(last.metric[i].real() - ke);
    err = std::max({err, d, d / ke});  // absolute and relative
  }
  const double ke_res = nr.diags.back().ke_residual;
  bool monotone = true;
  for (std::size_t k = 1; k < nr.diags.size(); ++k)
    if (nr.diags[k].time >= last.time / 2 && nr.diags[k].ke_residual > nr.diags[k - 1].ke_residual + 1e-10)
      monotone = false;
  const double ke0 = nr.diags.front().ke_residual;
  return {std::abs(last.time - 20.0) < 1e-12 && ke_res <= 1e-3 && err <= 1e-3 && monotone && secs < 60.0,
          fmt("s = %.0f: ke_residual %.2e (from %.2e), sup error (abs and rel) vs 2(1-r^2)^-2 on r <= 0.9 %.2e, "
              "final-half monotone %s, %.1f s",
              last.time, ke_res, ke0, err, monotone ? "yes" : "no", secs)};
}

Outcome potential_monotonicity() {
  const YAML::Node suite = YAML::LoadFile(kScenarios + "/suite.yaml");
  int runs = 0;
  double max_rate = -1e300, max_increase = -1e300;
  std::string names;
  for (const auto& s : suite["scenarios"]) {
    const auto file = s.as<std::string>();
    const auto cfg = cli::load_config(kScenarios + "/" + file);
    if (!cfg.flow.enabled || !cfg.flow.normalized.enabled) continue;
    const auto& rep = scenario(file);
    if (!rep.normalized_run) return {false, cfg.name + ": normalized phase did not run"};
    const auto& nr = *rep.normalized_run;
    ++runs;
    names += (names.empty() ? "" : ", ") + cfg.name;
    double inc = -1e300;
    for (std::size_t k = 0; k < nr.frames.size(); ++k)
      for (std::size_t i = 0; i < nr.grid->size(); ++i) {
        if (nr.grid->boundary(i)) continue;
        const auto& f = nr.frames[k];
        max_rate = std::max(max_rate, f.potential_rate[i]);
        if (k) {
          const auto& p = nr.frames[k - 1];
          inc = std::max(inc, (f.potential_rate[i] + f.potential[i]) - (p.potential_rate[i] + p.potential[i]));
        }
      }
    // non-increasing up to one step of slack
    max_increase = std::max(max_increase, inc - nr.dt_max);
  }
  return {runs >= 3 && max_rate <= 1e-8 && max_increase <= 0.0,
          fmt("%d normalized runs (%s): max phi' %.2e (<= 1e-8), max frame-to-frame increase of phi' + phi "
              "beyond dt slack %.2e (<= 0)",
              runs, names.c_str(), max_rate, max_increase)};
}

Outcome cutoff() {
  bool pass = true;
  std::string out;
  for (double tau : {0.02, 0.05, 0.1}) {
    exh::CutoffSpec c;
    c.tau = tau;
    const auto a = exh::frakF_properties_check(c, 4, 10000);
    const auto b = exh::frakF_properties_check(c, 4, 20000);
    // zero region checked here by direct evaluation
    bool zero = true;
    const double z_end = 1.0 - tau + tau * tau;
    for (int k = 0; k <= 10000; ++k) zero = zero && exh::frak_F(z_end * k / 10000.0, c).value == 0.0;
    double sup = 0.0;
    bool finite = true;
    for (int k = 0; k <= 4; ++k) {
      for (int j = 1; j < 10000; ++j) {
        const double s = j / 10000.0;
        const double v = std::exp(-k * exh::frak_F(s, c).value) * std::abs(exh::frak_F_derivative(s, c, k));
        finite = finite && std::isfinite(v);
        if (k == 4) sup = std::max(sup, v);
      }
    }
    const double d2 = std::abs(a.c2 - b.c2) / std::abs(b.c2), d3 = std::abs(a.c3 - b.c3) / std::abs(b.c3);
    // the ratio constant is reached as s -> 1, where exp(F(s + r) - F(s - r)) -> (1 + tau/2) / (1 - tau/2)
    const double c2_limit = 1.0 / (1.0 - tau / 2.0);
    const double c2_gap = std::abs(a.c2 - c2_limit) / c2_limit;
    const bool ok = zero && finite && a.zero_region_exact && a.report.satisfied && d2 < 0.1 && d3 < 0.1 && c2_gap < 1e-4;
    pass = pass && ok;
    out += fmt("%stau %.2f: zero %s, sup e^{-4F}|F''''| %.3g, c2 %.6f (limit %.6f), c3 %.4f, drift %.0e/%.0e",
               out.empty() ? "" : "; ", tau, zero ? "exact" : "NO", sup, a.c2, c2_limit, a.c3, d2, d3);
  }
  return {pass, out};
}

Outcome conformal() {
  exh::CompletionSpec cs;
  cs.cutoff.tau = 0.1;
  cs.rho_i = 50.0;
  cs.directions = 6;
  std::vector<exh::CompletionResult> r;
  for (int ref : {1, 2, 4}) {
    cs.radial_samples = 32 * ref;
    r.push_back(exh::conformal_completion(geom::hermitian_plane(0.3, 0.2), geom::euclidean(2), cs));
  }
  double law = 0.0, drift = 0.0;
  bool sat = true;
  for (const auto& x : r) {
    law = std::max({law, x.law_torsion_error, x.law_curvature_error, x.law_hsc_error});
    sat = sat && x.report.satisfied;
  }
  for (std::size_t k = 1; k < r.size(); ++k)
    for (auto m : {&exh::CompletionResult::c_i, &exh::CompletionResult::c_ii, &exh::CompletionResult::c_iii,
                   &exh::CompletionResult::c_iv})
      drift = std::max(drift, std::abs(r[k].*m - r[k - 1].*m) / std::max(std::abs(r[k].*m), 1e-300));
  const auto& f = r.back();
  return {law <= 1e-9 && sat && drift < 0.1,
          fmt("law vs direct %.2e (<= 1e-9); c = (%.4g, %.4g, %.4g, %.4g), max drift under refinement %.1e (< 0.1)",
              law, f.c_i, f.c_ii, f.c_iii, f.c_iv, drift)};
}

Outcome uniqueness() {
  const auto w1 = geom::poincare_ke();
  const auto w2 = geom::pullback_n1(w1, geom::mobius(cd(0.3, 0.0)), "mobius");
  const auto pts = est::disk_samples(200, 0.9, 7);
  // the pullback is KE with its own volume form; F = log(w2/w1) vanishes because Mobius is an isometry
  const auto rep = est::uniqueness_F_check(*w1, *w2, pts, 1e-10);
  const double supF = std::max(std::abs(rep.details["sup_F"].get<double>()), std::abs(rep.details["inf_F"].get<double>()));
  bool rejected = false;
  std::string why;
  try {
    est::uniqueness_F_check(*w1, geom::ScaledMetric(w1, 2.0), pts);
  } catch (const NotKahlerEinsteinError& e) {
    rejected = true;
    why = e.what();
  }
  return {rep.satisfied && supF <= 1e-10 && rejected,
          fmt("Mobius pair sup|F| %.2e (<= 1e-10); 2 omega %s", supF, rejected ? "rejected at the KE precondition" : "NOT rejected")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"curvature oracle on the Poincare disk", curvature_oracle},
      {"Kahler identity residual on a non-Kahler metric", kahler_identity},
      {"Royden inequality against the Bergman ball", royden},
      {"trace-evolution identity and its convergence", trace_identity},
      {"exact homothety tracking", exact_tracking},
      {"scalar curvature lower bound tR + n", scalar_bound},
      {"scalar curvature evolution", scalar_evolution},
      {"Chen ODE sweep", chen},
      {"normalized flow converges to the KE metric", normalized_convergence},
      {"normalized potential monotonicity", potential_monotonicity},
      {"cutoff construction", cutoff},
      {"conformal-change laws and bounds", conformal},
      {"uniqueness of the KE metric", uniqueness},
  };
  std::set<int> pick, expected_fail;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--expect-fail" && a + 1 < argc)
      expected_fail.insert(std::stoi(argv[++a]));
    else
      pick.insert(std::stoi(arg));
  }
  int failed = 0, surprises = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = expected_fail.count(id) > 0;
    std::printf("%s  %2d  %s: %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str(),
                known ? (o.pass ? "  [listed as expected failure]" : "  [expected failure]") : "");
    std::fflush(stdout);
    failed += !o.pass;
    surprises += o.pass == known;
  }
  std::printf("%d failed, %d not as expected\n", failed, surprises);
  return surprises ? 1 : 0;
}
