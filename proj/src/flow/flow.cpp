#include "crf/flow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crf/geometry/curvature.hpp"

namespace crf::flow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
void for_nodes(Exec exec, std::size_t count, F&& body) {
  const auto N = static_cast<std::ptrdiff_t>(count);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < N; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < N; ++i) body(static_cast<std::size_t>(i));
  }
}

std::vector<Point> grid_points(const Grid& g) {
  std::vector<Point> p(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) p[i] = g.point(i);
  return p;
}

[[noreturn]] void breakdown(const std::string& what, std::size_t node, const Point& z, double time) {
  std::ostringstream os;
  os << what << " at node " << node << ", time " << time;
  throw FlowBreakdown(os.str(), node, z, time);
}

void check_positive(int n, const MatrixField& g, const std::vector<Point>& pts, double time,
                    Exec exec) {
  std::size_t at = 0;
  const double m = min_eigenvalue_field(n, g, exec, &at);
  if (!(m > geom::kDegenerateEigenvalue)) breakdown("metric lost positivity", at, pts[at], time);
}

// Radial outer node: quadratic extrapolation from the three interior neighbours.
void extrapolate_outer(int n, MatrixField& f) {
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const std::size_t N = f.size() / nn;
  for (std::size_t k = 0; k < nn; ++k)
    f[(N - 1) * nn + k] =
        3.0 * f[(N - 2) * nn + k] - 3.0 * f[(N - 3) * nn + k] + f[(N - 4) * nn + k];
}

void fill_boundary(const Grid& grid, int n, BoundaryKind kind, const BoundaryData& bd,
                   const std::vector<Point>& pts, double time, bool rate, MatrixField& f) {
  if (kind == BoundaryKind::Periodic) return;
  if (kind == BoundaryKind::Extrapolate) {
    extrapolate_outer(n, f);
    return;
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.boundary(i)) store_matrix(f, n, i, rate ? bd.rate(pts[i], time) : bd.value(pts[i], time));
}

// Right-hand side of the metric-form system shared by the plain, normalized and radial flows.
//   plain:      dg = -(ric_ref - D L),        dp = L
//   normalized: dg = -(ric_ref - D L) - g,    dp = L - log_det0 - p
struct MetricSystem {
  const Grid& grid;
  int n;
  const MatrixField& ric_ref;
  const ScalarField& det_ref;
  const ScalarField* log_det0;  // non-null for the normalized flow
  BoundaryKind kind;
  const BoundaryData& bd;
  const std::vector<Point>& pts;
  Exec exec;

  void rhs(const MatrixField& g, const ScalarField& p, double time, MatrixField& dg,
           ScalarField& dp) const {
    ScalarField L;
    const auto bad = log_det_ratio(n, g, det_ref, L, exec);
    if (bad >= 0) breakdown("non-positive determinant", static_cast<std::size_t>(bad), pts[bad], time);
    MatrixField D;
    ddbar_field(grid, L, D, exec);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    dg.resize(g.size());
    dp.resize(p.size());
    const bool norm = log_det0 != nullptr;
    for_nodes(exec, grid.size(), [&](std::size_t i) {
      for (std::size_t k = 0; k < nn; ++k) {
        cd v = D[i * nn + k] - ric_ref[i * nn + k];
        if (norm) v -= g[i * nn + k];
        dg[i * nn + k] = v;
      }
      dp[i] = norm ? L[i] - (*log_det0)[i] - p[i] : L[i];
    });
    fill_boundary(grid, n, kind, bd, pts, time, true, dg);
  }

  void rk4(MatrixField& g, ScalarField& p, double time, double dt) const {
    MatrixField k1, k2, k3, k4, gt(g.size());
    ScalarField q1, q2, q3, q4, pt(p.size());
    auto stage = [&](const MatrixField& kg, const ScalarField& kp, double a) {
      for_nodes(exec, g.size(), [&](std::size_t i) { gt[i] = g[i] + a * kg[i]; });
      for_nodes(exec, p.size(), [&](std::size_t i) { pt[i] = p[i] + a * kp[i]; });
    };
    rhs(g, p, time, k1, q1);
    stage(k1, q1, 0.5 * dt);
    rhs(gt, pt, time + 0.5 * dt, k2, q2);
    stage(k2, q2, 0.5 * dt);
    rhs(gt, pt, time + 0.5 * dt, k3, q3);
    stage(k3, q3, dt);
    rhs(gt, pt, time + dt, k4, q4);
    const double w = dt / 6.0;
    for_nodes(exec, g.size(),
              [&](std::size_t i) { g[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]); });
    for_nodes(exec, p.size(),
              [&](std::size_t i) { p[i] += w * (q1[i] + 2.0 * q2[i] + 2.0 * q3[i] + q4[i]); });
    symmetrize(n, g, exec);
    if (kind == BoundaryKind::Dirichlet) fill_boundary(grid, n, kind, bd, pts, time + dt, false, g);
    check_positive(n, g, pts, time + dt, exec);
  }
};

MetricSystem unnormalized_system(const FlowState& s, Exec exec) {
  return MetricSystem{*s.grid, s.n, s.ric0, s.det0, nullptr, s.boundary_kind, s.boundary, s.points, exec};
}

MetricSystem normalized_system(const NormalizedFlowState& s, Exec exec) {
  return MetricSystem{*s.grid,        s.n,        s.ric_ref, s.det_ref, &s.log_det0,
                      s.boundary_kind, s.boundary, s.points,  exec};
}

// omega = omega0 - t ric0 + i ddbar psi on interior nodes; boundary from data or extrapolation.
void reconstruct(const FlowState& s, const ScalarField& psi, double time, MatrixField& omega,
                 Exec exec) {
  MatrixField D;
  ddbar_field(*s.grid, psi, D, exec);
  omega.resize(s.omega0.size());
  for_nodes(exec, omega.size(), [&](std::size_t k) { omega[k] = s.omega0[k] - time * s.ric0[k] + D[k]; });
  fill_boundary(*s.grid, s.n, s.boundary_kind, s.boundary, s.points, time, false, omega);
  symmetrize(s.n, omega, exec);
}

void potential_rhs(const FlowState& s, const ScalarField& psi, double time, ScalarField& dpsi,
                   Exec exec) {
  MatrixField omega;
  reconstruct(s, psi, time, omega, exec);
  check_positive(s.n, omega, s.points, time, exec);
  const auto bad = log_det_ratio(s.n, omega, s.det0, dpsi, exec);
  if (bad >= 0) breakdown("non-positive determinant", static_cast<std::size_t>(bad), s.points[bad], time);
}

void potential_rk4(FlowState& s, double dt, Exec exec) {
  const double t = s.t;
  ScalarField k1, k2, k3, k4, pt(s.psi.size());
  auto stage = [&](const ScalarField& k, double a) {
    for_nodes(exec, pt.size(), [&](std::size_t i) { pt[i] = s.psi[i] + a * k[i]; });
  };
  potential_rhs(s, s.psi, t, k1, exec);
  stage(k1, 0.5 * dt);
  potential_rhs(s, pt, t + 0.5 * dt, k2, exec);
  stage(k2, 0.5 * dt);
  potential_rhs(s, pt, t + 0.5 * dt, k3, exec);
  stage(k3, dt);
  potential_rhs(s, pt, t + dt, k4, exec);
  for_nodes(exec, pt.size(),
            [&](std::size_t i) { s.psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]); });
  reconstruct(s, s.psi, t + dt, s.omega, exec);
  check_positive(s.n, s.omega, s.points, t + dt, exec);
}

void metric_step_unchecked(FlowState& s, double dt, Exec exec) {
  unnormalized_system(s, exec).rk4(s.omega, s.psi, s.t, dt);
  s.t += dt;
  ++s.step_count;
}

void potential_step_unchecked(FlowState& s, double dt, Exec exec) {
  potential_rk4(s, dt, exec);
  s.t += dt;
  ++s.step_count;
}

void normalized_step_unchecked(NormalizedFlowState& s, double dt, Exec exec) {
  normalized_system(s, exec).rk4(s.g_tilde, s.phi, s.s, dt);
  s.s += dt;
  ++s.step_count;
}

void require_step(double dt, double bound) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the stability bound " << bound;
    throw PreconditionError(os.str());
  }
}

void validate_boundary(const Grid& grid, BoundaryKind kind, const BoundaryData& bd) {
  if (grid.periodic() != (kind == BoundaryKind::Periodic))
    throw ConfigError("periodic boundary handling must match a periodic grid");
  if (kind == BoundaryKind::Dirichlet && !bd)
    throw ConfigError("Dirichlet boundary requires boundary data");
  if (kind == BoundaryKind::Extrapolate && grid.kind() != Grid::Kind::Radial)
    throw ConfigError("extrapolated boundaries are implemented for radial grids only");
}

double metric_norm(int n, const cd* g, const cd* e) {
  if (n == 1) return std::abs(e[0].real() / g[0].real());
  const CMat G = matrix_at(MatrixField(g, g + n * n), n, 0);
  const CMat E = matrix_at(MatrixField(e, e + n * n), n, 0);
  const CMat A = G.inverse() * E;
  return std::sqrt(std::max(0.0, (A * A).trace().real()));
}

// max |eig(g^{-1} Ric)|. For n = 2 the pencil det(R - l G) = det G l^2 - b l + det R has real roots.
double ricci_scale(int n, const cd* g, const cd* ric) {
  if (n == 1) return std::abs(ric[0].real() / g[0].real());
  const double a = hermitian_det(2, g), c = hermitian_det(2, ric);
  const double b = g[3].real() * ric[0].real() + g[0].real() * ric[3].real() - 2.0 * (ric[1] * std::conj(g[1])).real();
  const double disc = std::max(b * b - 4.0 * a * c, 0.0);
  const double q = 0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return 0.0;
  return std::max(std::abs(q / a), std::abs(c / q));
}

FrameDiag record(std::deque<FrameDiag>& ring, std::size_t cap, const FrameDiag& d) {
  ring.push_back(d);
  while (ring.size() > cap) ring.pop_front();
  return d;
}

}  // namespace

std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Periodic: return "periodic";
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Extrapolate: return "extrapolate";
  }
  return "unknown";
}

BoundaryKind boundary_kind_from_string(const std::string& s) {
  if (s == "periodic") return BoundaryKind::Periodic;
  if (s == "dirichlet") return BoundaryKind::Dirichlet;
  if (s == "extrapolate") return BoundaryKind::Extrapolate;
  throw ConfigError("unknown boundary kind '" + s + "' (periodic | dirichlet | extrapolate)");
}

std::string to_string(FlowForm f) { return f == FlowForm::Metric ? "metric" : "potential"; }

FlowForm flow_form_from_string(const std::string& s) {
  if (s == "metric") return FlowForm::Metric;
  if (s == "potential") return FlowForm::Potential;
  throw ConfigError("unknown flow form '" + s + "' (metric | potential)");
}

BoundaryData homothety_boundary(geom::MetricPtr g0, double c) {
  BoundaryData b;
  b.value = [g0, c](const Point& z, double t) -> CMat { return (1.0 - c * t) * g0->eval(z); };
  b.rate = [g0, c](const Point& z, double) -> CMat { return -c * g0->eval(z); };
  std::ostringstream os;
  os << "dirichlet: exact homothety (1 - (" << c << ") t) g0 of " << g0->label();
  b.description = os.str();
  return b;
}

BoundaryData normalized_homothety_boundary(geom::MetricPtr g0, double c, double a0) {
  BoundaryData b;
  b.value = [g0, c, a0](const Point& z, double s) -> CMat {
    return (-c + (a0 + c) * std::exp(-s)) * g0->eval(z);
  };
  b.rate = [g0, c, a0](const Point& z, double s) -> CMat {
    return (-(a0 + c) * std::exp(-s)) * g0->eval(z);
  };
  std::ostringstream os;
  os << "dirichlet: exact normalized homothety (" << -c << " + " << a0 + c << " e^{-s}) g0 of "
     << g0->label();
  b.description = os.str();
  return b;
}

MatrixField sample_metric(const Grid& grid, const geom::MetricProvider& g) {
  const int n = grid.dim();
  if (g.dim() != n) throw ConfigError("metric dimension does not match the grid");
  MatrixField f(grid.size() * n * n);
  for (std::size_t i = 0; i < grid.size(); ++i) store_matrix(f, n, i, g.eval(grid.point(i)));
  symmetrize(n, f, Exec::Serial);
  return f;
}

FlowState make_flow_state(std::shared_ptr<const Grid> grid, const geom::MetricProvider& g0,
                          BoundaryKind kind, BoundaryData boundary) {
  const int n = grid->dim();
  MatrixField omega0 = sample_metric(*grid, g0);
  MatrixField ric0(omega0.size());
  for (std::size_t i = 0; i < grid->size(); ++i)
    store_matrix(ric0, n, i, geom::chern_curvature(g0, grid->point(i)).ricci);
  symmetrize(n, ric0, Exec::Serial);
  return make_flow_state(std::move(grid), std::move(omega0), std::move(ric0), kind, std::move(boundary));
}

FlowState make_flow_state(std::shared_ptr<const Grid> grid, MatrixField omega0, MatrixField ric0,
                          BoundaryKind kind, BoundaryData boundary) {
  validate_boundary(*grid, kind, boundary);
  FlowState s;
  s.n = grid->dim();
  s.points = grid_points(*grid);
  s.omega0 = std::move(omega0);
  s.ric0 = std::move(ric0);
  s.det0.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    s.det0[i] = hermitian_det(s.n, &s.omega0[i * s.n * s.n]);
    if (!(s.det0[i] > 0.0)) breakdown("initial metric is degenerate", i, s.points[i], 0.0);
  }
  s.omega = s.omega0;
  s.psi.assign(grid->size(), 0.0);
  s.boundary_kind = kind;
  s.boundary = std::move(boundary);
  s.grid = std::move(grid);
  return s;
}

double cfl_bound(const Grid& grid, const MatrixField& g, const MatrixField& ric, double safety) {
  const int n = grid.dim();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  double emin = std::numeric_limits<double>::infinity(), rmax = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    emin = std::min(emin, hermitian_min_eig(n, &g[i * nn]));
    if (!grid.boundary(i)) rmax = std::max(rmax, ricci_scale(n, &g[i * nn], &ric[i * nn]));
  }
  return safety * grid.step() * grid.step() * std::max(emin, 0.0) / rmax;
}

double cfl_bound(const FlowState& s, double safety) {
  MatrixField ric;
  const auto bad = ricci_field(*s.grid, s.omega, s.ric0, s.det0, ric, Exec::Serial);
  if (bad >= 0) return 0.0;
  return cfl_bound(*s.grid, s.omega, ric, safety);
}

double cfl_bound(const NormalizedFlowState& s, double safety) {
  MatrixField ric;
  const auto bad = ricci_field(*s.grid, s.g_tilde, s.ric_ref, s.det_ref, ric, Exec::Serial);
  if (bad >= 0) return 0.0;
  return cfl_bound(*s.grid, s.g_tilde, ric, safety);
}

void flow_step_metric(FlowState& state, double dt, Exec exec, double safety) {
  require_step(dt, cfl_bound(state, safety));
  metric_step_unchecked(state, dt, exec);
}

void flow_step_potential(FlowState& state, double dt, Exec exec, double safety) {
  require_step(dt, cfl_bound(state, safety));
  potential_step_unchecked(state, dt, exec);
}

void normalized_step(NormalizedFlowState& state, double dt, Exec exec, double safety) {
  require_step(dt, cfl_bound(state, safety));
  normalized_step_unchecked(state, dt, exec);
}

double reconstruction_defect(const FlowState& s) {
  MatrixField D;
  ddbar_field(*s.grid, s.psi, D, Exec::Serial);
  const std::size_t nn = static_cast<std::size_t>(s.n) * s.n;
  double m = 0.0;
  for (std::size_t i = 0; i < s.grid->size(); ++i) {
    if (s.grid->boundary(i)) continue;
    for (std::size_t k = 0; k < nn; ++k) {
      const std::size_t j = i * nn + k;
      m = std::max(m, std::abs(s.omega[j] - (s.omega0[j] - s.t * s.ric0[j] + D[j])));
    }
  }
  return m;
}

NormalizedFlowState start_normalized(const FlowState& st, BoundaryData boundary) {
  NormalizedFlowState s;
  s.grid = st.grid;
  s.n = st.n;
  s.ref = st.omega0;
  s.ric_ref = st.ric0;
  s.det_ref = st.det0;
  s.g_tilde0 = st.omega;
  s.g_tilde = st.omega;
  s.points = st.points;
  s.boundary_kind = st.boundary_kind;
  s.boundary = boundary ? std::move(boundary) : st.boundary;
  validate_boundary(*s.grid, s.boundary_kind, s.boundary);
  const auto bad = ricci_field(*s.grid, s.g_tilde0, s.ric_ref, s.det_ref, s.ric_tilde0, Exec::Serial);
  if (bad >= 0) breakdown("normalized start is degenerate", static_cast<std::size_t>(bad), s.points[bad], 0.0);
  log_det_ratio(s.n, s.g_tilde0, s.det_ref, s.log_det0, Exec::Serial);
  s.phi.assign(s.grid->size(), 0.0);
  s.phi_prime.assign(s.grid->size(), 0.0);
  return s;
}

double normalized_identity_defect(const NormalizedFlowState& s) {
  MatrixField D;
  ddbar_field(*s.grid, s.phi, D, Exec::Serial);
  const std::size_t nn = static_cast<std::size_t>(s.n) * s.n;
  const double e = std::exp(-s.s);
  double m = 0.0;
  for (std::size_t i = 0; i < s.grid->size(); ++i) {
    if (s.grid->boundary(i)) continue;
    for (std::size_t k = 0; k < nn; ++k) {
      const std::size_t j = i * nn + k;
      const cd model = e * s.g_tilde0[j] - (1.0 - e) * s.ric_tilde0[j] + D[j];
      m = std::max(m, std::abs(s.g_tilde[j] - model));
    }
  }
  return m;
}

FrameDiag diagnose(const Grid& grid, const MatrixField& g, const MatrixField& ric, double time,
                   bool normalized, const MatrixField* h, Exec exec) {
  const int n = grid.dim();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const std::size_t N = grid.size();
  std::vector<double> R(N, kNaN), ke(N, kNaN), lam(N, kNaN);
  for_nodes(exec, N, [&](std::size_t i) {
    if (h) lam[i] = trace_inv_product(n, &g[i * nn], &(*h)[i * nn]);
    if (grid.boundary(i)) return;
    R[i] = trace_inv_product(n, &g[i * nn], &ric[i * nn]);
    if (normalized) {
      cd e[kMaxDim * kMaxDim];
      for (std::size_t k = 0; k < nn; ++k) e[k] = ric[i * nn + k] + g[i * nn + k];
      ke[i] = metric_norm(n, &g[i * nn], e);
    }
  });
  FrameDiag d;
  d.time = time;
  d.min_eig = min_eigenvalue_field(n, g, exec);
  double rmin = std::numeric_limits<double>::infinity(), kmax = 0.0, lmax = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (h) lmax = std::max(lmax, lam[i]);
    if (grid.boundary(i)) continue;
    rmin = std::min(rmin, R[i]);
    if (normalized) kmax = std::max(kmax, ke[i]);
  }
  d.sup_lambda = h ? lmax : kNaN;
  d.inf_tR = normalized ? rmin : time * rmin;
  d.ke_residual = normalized ? kmax : kNaN;
  d.phi_prime_min = kNaN;
  d.phi_prime_max = kNaN;
  return d;
}

namespace {

struct Substeps {
  int count;
  double dt;
};

Substeps plan(double span, double bound, const RunConfig& cfg) {
  if (cfg.dt > 0.0) require_step(cfg.dt, bound);
  const double target = cfg.dt > 0.0 ? cfg.dt : bound;
  if (!(target > 0.0) || !std::isfinite(target))
    throw FlowBreakdown("stability bound is not positive: metric degenerate", 0, Point(), 0.0);
  const int count = std::max(1, static_cast<int>(std::ceil(span / target - 1e-9)));
  return {count, span / count};
}

void note_dt(FlowRun& run, double dt) {
  run.dt_min = run.steps == 0 ? dt : std::min(run.dt_min, dt);
  run.dt_max = std::max(run.dt_max, dt);
}

}  // namespace

FlowRun run_flow(FlowState& s, const RunConfig& cfg, const MatrixField* h) {
  FlowRun run;
  run.grid = s.grid;
  run.n = s.n;
  run.ref = s.omega0;
  run.ric_ref = s.ric0;
  run.det_ref = s.det0;
  run.boundary_description = s.boundary ? s.boundary.description : to_string(s.boundary_kind);
  auto snapshot = [&]() {
    MatrixField ric;
    ricci_field(*s.grid, s.omega, s.ric0, s.det0, ric, cfg.exec);
    FrameDiag d = diagnose(*s.grid, s.omega, ric, s.t, false, h, cfg.exec);
    d.step = s.step_count;
    run.diags.push_back(record(s.ring, s.ring_capacity, d));
    if (cfg.store_frames) {
      Frame f;
      f.time = s.t;
      f.metric = s.omega;
      f.potential = s.psi;
      log_det_ratio(s.n, s.omega, s.det0, f.potential_rate, cfg.exec);
      run.frames.push_back(std::move(f));
    }
    return ric;
  };
  MatrixField ric = snapshot();
  const double eps = 1e-12 * std::max(1.0, cfg.horizon);
  while (s.t < cfg.horizon - eps) {
    const double t_next = std::min(cfg.horizon, s.t + cfg.frame_interval);
    try {
      const Substeps sub = plan(t_next - s.t, cfl_bound(*s.grid, s.omega, ric, cfg.safety), cfg);
      if (run.steps + sub.count > cfg.max_steps)
        throw FlowBreakdown("step budget exhausted: stability bound collapsed", 0, s.points[0], s.t);
      for (int k = 0; k < sub.count; ++k) {
        if (cfg.form == FlowForm::Metric)
          metric_step_unchecked(s, sub.dt, cfg.exec);
        else
          potential_step_unchecked(s, sub.dt, cfg.exec);
        note_dt(run, sub.dt);
        ++run.steps;
      }
    } catch (const FlowBreakdown& e) {
      run.breakdown = true;
      run.breakdown_message = e.what();
      run.breakdown_point = e.point;
      run.breakdown_time = e.time;
      return run;
    }
    s.t = t_next;
    ric = snapshot();
  }
  return run;
}

FlowRun run_normalized(NormalizedFlowState& s, const RunConfig& cfg, const MatrixField* h) {
  FlowRun run;
  run.normalized = true;
  run.grid = s.grid;
  run.n = s.n;
  run.ref = s.ref;
  run.ric_ref = s.ric_ref;
  run.det_ref = s.det_ref;
  run.boundary_description = s.boundary ? s.boundary.description : to_string(s.boundary_kind);
  auto snapshot = [&]() {
    MatrixField ric;
    ricci_field(*s.grid, s.g_tilde, s.ric_ref, s.det_ref, ric, cfg.exec);
    ScalarField L;
    log_det_ratio(s.n, s.g_tilde, s.det_ref, L, cfg.exec);
    s.phi_prime.resize(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) s.phi_prime[i] = L[i] - s.log_det0[i] - s.phi[i];
    FrameDiag d = diagnose(*s.grid, s.g_tilde, ric, s.s, true, h, cfg.exec);
    d.step = s.step_count;
    d.phi_prime_min = *std::min_element(s.phi_prime.begin(), s.phi_prime.end());
    d.phi_prime_max = *std::max_element(s.phi_prime.begin(), s.phi_prime.end());
    s.ke_residual = d.ke_residual;
    run.diags.push_back(record(s.ring, s.ring_capacity, d));
    if (cfg.store_frames) {
      Frame f;
      f.time = s.s;
      f.metric = s.g_tilde;
      f.potential = s.phi;
      f.potential_rate = s.phi_prime;
      run.frames.push_back(std::move(f));
    }
    return ric;
  };
  MatrixField ric = snapshot();
  const double eps = 1e-12 * std::max(1.0, cfg.horizon);
  while (s.s < cfg.horizon - eps) {
    const double s_next = std::min(cfg.horizon, s.s + cfg.frame_interval);
    try {
      const Substeps sub = plan(s_next - s.s, cfl_bound(*s.grid, s.g_tilde, ric, cfg.safety), cfg);
      if (run.steps + sub.count > cfg.max_steps)
        throw FlowBreakdown("step budget exhausted: stability bound collapsed", 0, s.points[0], s.s);
      for (int k = 0; k < sub.count; ++k) {
        normalized_step_unchecked(s, sub.dt, cfg.exec);
        note_dt(run, sub.dt);
        ++run.steps;
      }
    } catch (const FlowBreakdown& e) {
      run.breakdown = true;
      run.breakdown_message = e.what();
      run.breakdown_point = e.point;
      run.breakdown_time = e.time;
      return run;
    }
    s.s = s_next;
    ric = snapshot();
  }
  return run;
}

NormalizedSample normalize(const FlowRun& run, double s) {
  if (run.normalized) throw PreconditionError("normalize expects an unnormalized run");
  if (s < 0.0) throw DomainError("normalized time must be non-negative");
  const double t_end = std::exp(s);
  auto find = [&](double t) -> std::ptrdiff_t {
    for (std::size_t k = 0; k < run.frames.size(); ++k)
      if (std::abs(run.frames[k].time - t) <= 1e-9 * std::max(1.0, t)) return static_cast<std::ptrdiff_t>(k);
    return -1;
  };
  const auto k0 = find(1.0), k1 = find(t_end);
  if (k0 < 0) throw DomainError("run has no frame at t = 1");
  if (k1 < 0) throw DomainError("requested s is beyond the computed horizon or off the frame grid");
  const int n = run.n;
  NormalizedSample out;
  out.s = s;
  out.g_tilde = run.frames[k1].metric;
  for (auto& v : out.g_tilde) v *= std::exp(-s);
  const std::size_t N = run.grid->size();
  out.phi.assign(N, 0.0);
  if (k1 == k0) return out;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  // integrand e^u log(det g~(u) / det g~(0)) with det g~(u) = e^{-n u} det g(e^u)
  auto integrand = [&](std::size_t k, std::size_t i) {
    const double u = std::log(run.frames[k].time);
    const double ratio = std::log(hermitian_det(n, &run.frames[k].metric[i * nn]) /
                                  hermitian_det(n, &run.frames[k0].metric[i * nn]));
    return std::exp(u) * (ratio - n * u);
  };
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (auto k = k0; k < k1; ++k) {
      const double du = std::log(run.frames[k + 1].time) - std::log(run.frames[k].time);
      acc += 0.5 * du * (integrand(k, i) + integrand(k + 1, i));
    }
    out.phi[i] = std::exp(-s) * acc;
  }
  return out;
}

geom::MetricJet grid_metric_jet(const Grid& grid, const MatrixField& g, std::size_t node,
                                int order) {
  if (grid.boundary(node)) throw DomainError("metric jets are not defined on boundary nodes");
  const int n = grid.dim();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  geom::MetricJet jet = geom::MetricJet::zero(n, 2);
  jet.g = matrix_at(g, n, node);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto u = [&](std::size_t k) { return g[k * nn + i * n + j]; };
      for (int a = 0; a < n; ++a) {
        jet.d[a](i, j) = grid.d(u, node, a, order);
        for (int b = 0; b < n; ++b) jet.ddbar[a][b](i, j) = grid.ddbar(u, node, a, b, order);
      }
    }
  return jet;
}

RadialProfile radial_profile(const geom::MetricProvider& g0, int nodes, double r_max) {
  if (g0.dim() != 1) throw ConfigError("radial profiles are implemented for n = 1");
  const Grid grid = Grid::radial(r_max, nodes);
  RadialProfile p;
  p.r.resize(grid.size());
  p.lambda.resize(grid.size());
  p.ric_ref.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    p.r[j] = grid.radius(j);
    p.lambda[j] = g0.eval(grid.point(j))(0, 0).real();
    p.ric_ref[j] = geom::chern_curvature(g0, grid.point(j)).ricci(0, 0).real();
  }
  p.lambda_ref = p.lambda;
  return p;
}

void radial_flow_step(RadialProfile& p, double dt, Exec exec) {
  if (p.n != 1) throw ConfigError("radial flow is implemented for n = 1");
  const std::size_t N = p.r.size();
  if (N < 8 || p.lambda.size() != N) throw ConfigError("radial profile needs >= 8 matching nodes");
  const double h = p.r.back() / static_cast<double>(N - 1);
  for (std::size_t j = 0; j < N; ++j)
    if (std::abs(p.r[j] - h * j) > 1e-12 * std::max(1.0, p.r.back()))
      throw ConfigError("radial profile nodes must be uniform and start at r = 0");
  const Grid grid = Grid::radial(p.r.back(), static_cast<int>(N));
  const std::vector<Point> pts = grid_points(grid);
  MatrixField ric_ref(N, cd{}), g(N);
  ScalarField det_ref(N, 1.0), psi(N, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    g[j] = p.lambda[j];
    if (!p.lambda_ref.empty()) det_ref[j] = p.lambda_ref[j];
    if (!p.ric_ref.empty()) ric_ref[j] = p.ric_ref[j];
  }
  BoundaryData bd;
  if (p.boundary == BoundaryKind::Dirichlet) {
    if (!p.outer_value || !p.outer_rate) throw ConfigError("Dirichlet radial profile needs outer data");
    bd.value = [&p](const Point& z, double t) { return CMat::Constant(1, 1, cd(p.outer_value(z(0).real(), t), 0)); };
    bd.rate = [&p](const Point& z, double t) { return CMat::Constant(1, 1, cd(p.outer_rate(z(0).real(), t), 0)); };
  } else if (p.boundary != BoundaryKind::Extrapolate) {
    throw ConfigError("radial profiles use dirichlet or extrapolate boundaries");
  }
  const MetricSystem sys{grid, 1, ric_ref, det_ref, nullptr, p.boundary, bd, pts, exec};
  sys.rk4(g, psi, p.t, dt);
  for (std::size_t j = 0; j < N; ++j) p.lambda[j] = g[j].real();
  p.t += dt;
}

}  // namespace crf::flow
