#include "crf/estimates/checks.hpp"

#include <cmath>
#include <limits>

#include "crf/geometry/curvature.hpp"
#include "crf/geometry/trace.hpp"

namespace crf::est {

using flow::FlowRun;
using flow::MatrixField;
using flow::ScalarField;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> coords(const Point& z) {
  std::vector<double> v;
  for (int a = 0; a < z.size(); ++a) {
    v.push_back(z(a).real());
    v.push_back(z(a).imag());
  }
  return v;
}

MatrixField frame_ricci(const FlowRun& run, const MatrixField& g, flow::Exec exec) {
  MatrixField ric;
  const auto bad = flow::ricci_field(*run.grid, g, run.ric_ref, run.det_ref, ric, exec);
  if (bad >= 0) throw PreconditionError("stored frame has a degenerate metric");
  return ric;
}

// |A|_g^2 = tr((G^{-1} A)^2) for Hermitian A.
double norm2(int n, const cd* g, const cd* a) {
  if (n == 1) {
    const double x = a[0].real() / g[0].real();
    return x * x;
  }
  const CMat G = flow::matrix_at(MatrixField(g, g + n * n), n, 0);
  const CMat A = flow::matrix_at(MatrixField(a, a + n * n), n, 0);
  const CMat M = G.inverse() * A;
  return (M * M).trace().real();
}

// Node and all its axis neighbours are interior, so an order-2 Laplacian sees no boundary data.
bool deep_interior(const flow::Grid& grid, std::size_t i) {
  if (grid.boundary(i)) return false;
  const int axes = grid.kind() == flow::Grid::Kind::Radial ? 1 : 2 * grid.dim();
  for (int a = 0; a < axes; ++a)
    for (int side = 0; side < 2; ++side) {
      const auto j = grid.nbr(i, a, side);
      if (j < 0 || grid.boundary(static_cast<std::size_t>(j))) return false;
    }
  return true;
}

// Three-point derivative at the middle of possibly uneven times.
double central(double t0, double t1, double t2, double u0, double u1, double u2) {
  const double h1 = t1 - t0, h2 = t2 - t1;
  return -h2 / (h1 * (h1 + h2)) * u0 + (h2 - h1) / (h1 * h2) * u1 + h1 / (h2 * (h1 + h2)) * u2;
}

}  // namespace

EstimateReport scalar_lower_bound_check(const FlowRun& run, double tolerance, flow::Exec exec) {
  EstimateReport rep("scalar_lower_bound", tolerance);
  const auto& grid = *run.grid;
  const int n = run.n;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  double min_tR = kInf;
  for (const auto& f : run.frames) {
    if (!run.normalized && f.time == 0.0) continue;
    const MatrixField ric = frame_ricci(run, f.metric, exec);
    const double scale = run.normalized ? 1.0 : f.time;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid.boundary(i)) continue;
      const double tR = scale * flow::trace_inv_product(n, &f.metric[i * nn], &ric[i * nn]);
      min_tR = std::min(min_tR, tR);
      rep.offer(tR + n, coords(grid.point(i)), f.time);
    }
  }
  rep.details = {{"min_tR", std::isfinite(min_tR) ? nlohmann::json(min_tR) : nlohmann::json(nullptr)},
                 {"n", n},
                 {"normalized", run.normalized}};
  if (rep.samples == 0) rep.applicable = false;
  return rep.finish();
}

EstimateReport scalar_evolution_residual(const FlowRun& run, double tolerance, flow::Exec exec,
                                         double identity_tolerance) {
  EstimateReport rep("scalar_evolution", tolerance);
  const auto& grid = *run.grid;
  const int n = run.n;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const std::size_t N = grid.size();
  const std::size_t K = run.frames.size();
  std::vector<ScalarField> R(K, ScalarField(N, 0.0)), ric2(K, ScalarField(N, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    const auto& g = run.frames[k].metric;
    const MatrixField ric = frame_ricci(run, g, exec);
    for (std::size_t i = 0; i < N; ++i) {
      if (grid.boundary(i)) continue;
      R[k][i] = flow::trace_inv_product(n, &g[i * nn], &ric[i * nn]);
      ric2[k][i] = norm2(n, &g[i * nn], &ric[i * nn]);
      const double gap = ric2[k][i] - R[k][i] * R[k][i] / n;
      rep.offer(gap / (1.0 + ric2[k][i]), coords(grid.point(i)), run.frames[k].time);
    }
  }
  double resid = 0.0, scale = 0.0;
  std::vector<double> at;
  double at_t = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const auto& f0 = run.frames[k - 1];
    const auto& f1 = run.frames[k];
    const auto& f2 = run.frames[k + 1];
    const auto u = [&](std::size_t j) { return cd(R[k][j], 0.0); };
    for (std::size_t i = 0; i < N; ++i) {
      if (!deep_interior(grid, i)) continue;
      const double dt = central(f0.time, f1.time, f2.time, R[k - 1][i], R[k][i], R[k + 1][i]);
      const CMat gi = geom::inverse_metric(flow::matrix_at(f1.metric, n, i));
      const double lap = grid.laplacian(u, i, gi, 2);
      const double r = std::abs(dt - lap - ric2[k][i]);
      scale = std::max(scale, ric2[k][i]);
      if (r > resid) {
        resid = r;
        at = coords(grid.point(i));
        at_t = f1.time;
      }
    }
  }
  if (identity_tolerance >= 0.0) rep.offer(identity_tolerance - resid, at, at_t);
  rep.details = {{"identity_residual", resid},
                 {"identity_tolerance", identity_tolerance >= 0.0 ? nlohmann::json(identity_tolerance) : nlohmann::json("off")},
                 {"identity_residual_point", at},
                 {"identity_residual_time", std::isnan(at_t) ? nlohmann::json(nullptr) : nlohmann::json(at_t)},
                 {"sup_ric_norm2", scale},
                 {"grid_step", grid.step()},
                 {"slack_normalization", "(|Ric|^2 - R^2/n) / (1 + |Ric|^2)"}};
  if (rep.samples == 0) rep.applicable = false;
  return rep.finish();
}

EstimateReport potential_monotonicity_check(const FlowRun& run, double tolerance, double dt_slack) {
  if (!run.normalized) throw PreconditionError("potential monotonicity needs a normalized run");
  EstimateReport rep("potential_monotonicity", tolerance);
  const auto& grid = *run.grid;
  if (dt_slack < 0.0) dt_slack = run.dt_max;
  double max_rate = -kInf, max_sum = -kInf, max_incr = -kInf;
  for (std::size_t k = 0; k < run.frames.size(); ++k) {
    const auto& f = run.frames[k];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid.boundary(i)) continue;
      const auto z = coords(grid.point(i));
      const double sum = f.potential_rate[i] + f.potential[i];
      max_rate = std::max(max_rate, f.potential_rate[i]);
      max_sum = std::max(max_sum, sum);
      rep.offer(-f.potential_rate[i], z, f.time);
      rep.offer(-sum, z, f.time);
      if (k > 0) {
        const auto& p = run.frames[k - 1];
        const double incr = sum - (p.potential_rate[i] + p.potential[i]);
        max_incr = std::max(max_incr, incr);
        rep.offer(dt_slack - incr, z, f.time);
      }
    }
  }
  rep.details = {{"max_phi_prime", max_rate},
                 {"max_phi_prime_plus_phi", max_sum},
                 {"max_frame_increase", std::isfinite(max_incr) ? nlohmann::json(max_incr) : nlohmann::json(nullptr)},
                 {"dt_slack", dt_slack}};
  if (rep.samples == 0) rep.applicable = false;
  return rep.finish();
}

EstimateReport ke_convergence_check(const FlowRun& run, const geom::MetricProvider* exact,
                                    const KeConvergenceOptions& opt, flow::Exec) {
  if (!run.normalized) throw PreconditionError("KE convergence needs a normalized run");
  EstimateReport rep("ke_convergence", 0.0);
  if (run.breakdown || run.diags.empty() || run.frames.empty()) {
    rep.applicable = false;
    rep.details = {{"reason", run.breakdown ? "flow breakdown: " + run.breakdown_message
                                            : std::string("no frames")}};
    return rep.finish();
  }
  const auto& grid = *run.grid;
  const int n = run.n;
  const double s_end = run.diags.back().time;
  double max_incr = -kInf;
  for (std::size_t k = 1; k < run.diags.size(); ++k)
    if (run.diags[k - 1].time >= 0.5 * s_end)
      max_incr = std::max(max_incr, run.diags[k].ke_residual - run.diags[k - 1].ke_residual);
  const double ke = run.diags.back().ke_residual;
  rep.offer(opt.threshold - ke, {}, s_end);
  if (std::isfinite(max_incr)) rep.offer(opt.tail_noise - max_incr, {}, s_end);

  double abs_err = 0.0, rel_err = 0.0;
  if (exact) {
    const auto& g = run.frames.back().metric;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid.boundary(i) || grid.radius(i) > opt.r_limit) continue;
      const Point z = grid.point(i);
      const CMat E = exact->eval(z);
      const CMat G = flow::matrix_at(g, n, i);
      const CMat D = G - E;
      const double a = D.cwiseAbs().maxCoeff();
      const CMat M = E.inverse() * D;
      const double r = std::sqrt(std::max(0.0, (M * M).trace().real()));
      abs_err = std::max(abs_err, a);
      rel_err = std::max(rel_err, r);
      rep.offer(opt.threshold - std::max(a, r), coords(z), s_end);
    }
  }
  const double scale = run.diags.back().min_eig / run.diags.front().min_eig;
  rep.details = {{"final_ke_residual", ke},
                 {"tail_max_increase", std::isfinite(max_incr) ? nlohmann::json(max_incr) : nlohmann::json(nullptr)},
                 {"tail_monotone", !(max_incr > opt.tail_noise)},
                 {"threshold", opt.threshold},
                 {"tail_noise", opt.tail_noise},
                 {"r_limit", opt.r_limit},
                 {"exact_reference", exact ? exact->label() : std::string("none")},
                 {"sup_abs_error", abs_err},
                 {"sup_rel_error", rel_err},
                 {"min_eig_ratio_final_over_initial", scale},
                 {"diverging", scale < 1e-3}};
  return rep.finish();
}

EstimateReport exact_solution_check(const FlowRun& run, const geom::MetricProvider& model, double c,
                                    double tolerance) {
  if (run.normalized) throw PreconditionError("exact tracking applies to unnormalized runs");
  EstimateReport rep("exact_tracking", 0.0);
  const auto& grid = *run.grid;
  const int n = run.n;
  std::vector<CMat> base(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) base[i] = model.eval(grid.point(i));
  double sup = 0.0;
  for (const auto& f : run.frames) {
    const double a = 1.0 - c * f.time;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const CMat E = a * base[i];
      const double err =
          (flow::matrix_at(f.metric, n, i) - E).cwiseAbs().maxCoeff() / E.cwiseAbs().maxCoeff();
      sup = std::max(sup, err);
      rep.offer(tolerance - err, coords(grid.point(i)), f.time);
    }
  }
  rep.details = {{"sup_rel_error", sup}, {"error_tolerance", tolerance}, {"einstein_constant", c},
                 {"model", model.label()}, {"frames", run.frames.size()}};
  if (rep.samples == 0) rep.applicable = false;
  return rep.finish();
}

EstimateReport trace_heat_residual(const FlowRun& run, const geom::MetricProvider& h,
                                   double tolerance, double r_limit) {
  if (run.normalized) throw PreconditionError("trace heat residual applies to unnormalized runs");
  EstimateReport rep("trace_heat_residual", tolerance);
  const auto& grid = *run.grid;
  const int n = run.n;
  const std::size_t N = grid.size();
  const std::size_t K = run.frames.size();
  if (K < 3) {
    rep.applicable = false;
    rep.details = {{"reason", "needs at least three frames"}};
    return rep.finish();
  }
  std::vector<geom::MetricJet> hj(N);
  for (std::size_t i = 0; i < N; ++i) hj[i] = h.jet(grid.point(i), 2);
  std::vector<ScalarField> lam(K, ScalarField(N));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < N; ++i)
      lam[k][i] = geom::trace_of(flow::matrix_at(run.frames[k].metric, n, i), hj[i].g);
  double sup = 0.0, sup_dt = 0.0;
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const auto& f = run.frames[k];
    const auto u = [&](std::size_t j) { return cd(lam[k][j], 0.0); };
    for (std::size_t i = 0; i < N; ++i) {
      if (grid.boundary(i) || grid.radius(i) > r_limit) continue;
      const geom::MetricJet gj = flow::grid_metric_jet(grid, f.metric, i, 4);
      const geom::TraceDiagnostics td = geom::trace_terms_from_jets(gj, hj[i]);
      const double dt = central(run.frames[k - 1].time, f.time, run.frames[k + 1].time,
                                lam[k - 1][i], lam[k][i], lam[k + 1][i]);
      const double lap = grid.laplacian(u, i, geom::inverse_metric(gj.g), 2);
      const double r = std::abs(dt - lap - (td.term_I + td.term_II + td.term_III));
      sup = std::max(sup, r);
      sup_dt = std::max(sup_dt, std::abs(dt));
      rep.offer(tolerance - r, coords(grid.point(i)), f.time);
    }
  }
  // slack is tolerance - residual, so the check passes iff the residual is within tolerance
  rep.tolerance_used = 0.0;
  rep.details = {{"sup_residual", sup},
                 {"residual_tolerance", tolerance},
                 {"sup_abs_dt_lambda", sup_dt},
                 {"grid_step", grid.step()},
                 {"frame_spacing", run.frames[1].time - run.frames[0].time},
                 {"r_limit", r_limit}};
  return rep.finish();
}

}  // namespace crf::est
