#include <doctest.h>

#include <cmath>
#include <random>

#include "crf/flow/flow.hpp"
#include "crf/geometry/models.hpp"

using namespace crf;
using namespace crf::flow;

namespace {

ScalarField sample(const Grid& g, const std::function<double(const Point&)>& f) {
  ScalarField u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = f(g.point(i));
  return u;
}

// u = sin(x1) cos(y2) => d1 dbar1 u = -sin(x1) cos(y2) / 4, d2 dbar2 u = -sin(x1) cos(y2) / 4,
// d1 dbar2 u = (1/4)(d_x1 - i d_y1)(d_x2 + i d_y2) u = (i/4) cos(x1) (-sin(y2)).
CMat torus_hessian(const Point& z) {
  const double x1 = z(0).real(), y2 = z(1).imag();
  CMat H(2, 2);
  H(0, 0) = -std::sin(x1) * std::cos(y2) / 4.0;
  H(1, 1) = H(0, 0);
  H(0, 1) = cd(0, -0.25) * std::cos(x1) * std::sin(y2);
  H(1, 0) = std::conj(H(0, 1));
  return H;
}

}  // namespace

TEST_CASE("periodic n = 2 ddbar stencil against the analytic Hessian") {
  double prev = 0.0;
  for (int N : {12, 24}) {
    const Grid g = Grid::box(2, 0.0, 2 * M_PI, N, true);
    const auto u = sample(g, [](const Point& z) { return std::sin(z(0).real()) * std::cos(z(1).imag()); });
    MatrixField out;
    ddbar_field(g, u, out, Exec::Serial);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      err = std::max(err, (matrix_at(out, 2, i) - torus_hessian(g.point(i))).norm());
    if (prev > 0.0) CHECK(prev / err > 3.5);  // second order
    prev = err;
  }
  CHECK(prev < 1e-2);  // h^2 / 12 at N = 24
}

TEST_CASE("parallel, serial and reference kernels agree bit for bit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int kind = 0; kind < 2; ++kind) {
    const Grid g = kind ? Grid::box(2, 0.0, 2 * M_PI, 8, true) : Grid::radial(0.9, 64);
    const auto metric = kind ? geom::hermitian_torus(0.3, 0.2) : geom::perturbed_poincare(0.1, 0.5);
    ScalarField u(g.size());
    for (auto& x : u) x = U(rng);
    MatrixField a, b, c;
    ddbar_field(g, u, a, Exec::Serial);
    ddbar_field(g, u, b, Exec::Parallel);
    ddbar_field_reference(g, u, c);
    CHECK(a == b);
    double diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a[k] - c[k]));
    CHECK(diff < 1e-9);

    auto st = make_flow_state(std::make_shared<const Grid>(g), *metric,
                              kind ? BoundaryKind::Periodic : BoundaryKind::Extrapolate);
    MatrixField r1, r2, r3;
    CHECK(ricci_field(g, st.omega, st.ric0, st.det0, r1, Exec::Serial) == -1);
    CHECK(ricci_field(g, st.omega, st.ric0, st.det0, r2, Exec::Parallel) == -1);
    CHECK(ricci_field_reference(g, st.omega, st.ric0, st.det0, r3) == -1);
    CHECK(r1 == r2);
    diff = 0.0;
    for (std::size_t k = 0; k < r1.size(); ++k) diff = std::max(diff, std::abs(r1[k] - r3[k]));
    CHECK(diff < 1e-9);
  }
}

TEST_CASE("flow steps are identical under serial and parallel execution") {
  const auto m = geom::bumpy_torus(0.3);
  auto chart = m->chart();
  chart.grid_resolution = 16;
  auto g = std::make_shared<const Grid>(Grid::from_chart(chart));
  auto a = make_flow_state(g, *m, BoundaryKind::Periodic);
  auto b = a;
  const double dt = cfl_bound(a, 0.5);
  for (int k = 0; k < 5; ++k) {
    flow_step_metric(a, dt, Exec::Serial, 0.5);
    flow_step_metric(b, dt, Exec::Parallel, 0.5);
  }
  CHECK(a.omega == b.omega);
}

TEST_CASE("off-centre fourth-order windows keep fourth order next to an edge") {
  // f(r) = exp(r) sampled on [0, 1]; derivative at the node next to the Dirichlet edge
  const Grid g = Grid::radial(1.0, 41);
  const Grid f = Grid::radial(1.0, 81);
  const auto err_at = [](const Grid& grid) {
    ScalarField u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) u[i] = std::exp(grid.radius(i));
    const std::size_t i = grid.size() - 2;
    CHECK(grid.window(i, 0) < -2);
    // radial Wirtinger forms: d u = u_r / 2, d dbar u = (u_rr + u_r / r) / 4
    const double r = grid.radius(i), e = std::exp(r);
    const auto U = [&](std::size_t j) { return u[j]; };
    const double d1 = grid.d(U, i, 0, 4).real();
    const double d2 = grid.ddbar(U, i, 0, 0, 4).real();
    return std::max(std::abs(d1 - e / 2), std::abs(d2 - (e + e / r) / 4));
  };
  const double e1 = err_at(g), e2 = err_at(f);
  CHECK(e1 < 1e-5);
  CHECK(e1 / e2 > 7.0);  // at least third order; fourth in d1, third in the one-sided d2
}

TEST_CASE("grid metric jet reproduces the analytic jet") {
  const auto m = geom::hermitian_torus(0.3, 0.2);
  auto g = std::make_shared<const Grid>(Grid::box(2, 0.0, 2 * M_PI, 24, true));
  const auto field = sample_metric(*g, *m);
  const std::size_t node = 24 * 24 * 24 * 5 + 24 * 24 * 7 + 24 * 11 + 3;
  const auto J = grid_metric_jet(*g, field, node, 4);
  const auto A = m->jet(g->point(node), 2);
  for (int a = 0; a < 2; ++a) {
    CHECK((J.d[a] - A.d[a]).norm() < 2e-4);
    for (int b = 0; b < 2; ++b) CHECK((J.ddbar[a][b] - A.ddbar[a][b]).norm() < 2e-3);
  }
  const Grid r = Grid::radial(0.9, 32);
  CHECK_THROWS_AS(grid_metric_jet(r, sample_metric(r, *geom::poincare_disk()), r.size() - 1), Error);
}

TEST_CASE("metric and potential forms agree") {
  const auto m = geom::perturbed_poincare(0.1, 0.5);
  const auto gp = geom::poincare_disk();
  auto g = std::make_shared<const Grid>(Grid::radial(0.9, 64));
  auto a = make_flow_state(g, *m, BoundaryKind::Dirichlet, homothety_boundary(gp, -2.0));
  auto b = a;
  const double dt = 0.5 * cfl_bound(a, 1.0);
  for (int k = 0; k < 20; ++k) {
    flow_step_metric(a, dt, Exec::Serial, 1.0);
    flow_step_potential(b, dt, Exec::Serial, 1.0);
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) diff = std::max(diff, std::abs(a.omega[i] - b.omega[i]));
  CHECK(diff < 1e-10);
  CHECK(reconstruction_defect(a) < 1e-10);
}

TEST_CASE("steps above the CFL bound are refused") {
  const auto m = geom::poincare_disk();
  auto g = std::make_shared<const Grid>(Grid::radial(0.9, 32));
  auto st = make_flow_state(g, *m, BoundaryKind::Dirichlet, homothety_boundary(m, -2.0));
  CHECK_THROWS_AS(flow_step_metric(st, 10.0 * cfl_bound(st, 0.2), Exec::Serial, 0.2), PreconditionError);
}

TEST_CASE("Fubini-Study collapse is reported as a breakdown, not thrown") {
  const auto m = geom::fubini_study_cap();
  auto g = std::make_shared<const Grid>(Grid::radial(0.95, 24));
  auto st = make_flow_state(g, *m, BoundaryKind::Dirichlet, homothety_boundary(m, 2.0));
  RunConfig rc;
  rc.horizon = 0.6;
  rc.frame_interval = 0.1;
  rc.safety = 1.0;
  const auto run = run_flow(st, rc);
  CHECK(run.breakdown);
  CHECK(run.breakdown_time < 0.5);
  CHECK(run.breakdown_time > 0.45);
  CHECK(run.frames.size() == 5);
}

TEST_CASE("normalized homothety data") {
  // Ric = -2 g_P, a0 = 3: a(s) = 2 + e^{-s}
  const auto bd = normalized_homothety_boundary(geom::poincare_disk(), -2.0, 3.0);
  Point z(1);
  z(0) = 0.5;
  const double lam = 1.0 / (0.75 * 0.75);
  CHECK(std::abs(bd.value(z, 1.0)(0, 0).real() - (2.0 + std::exp(-1.0)) * lam) < 1e-12);
  CHECK(std::abs(bd.rate(z, 1.0)(0, 0).real() + std::exp(-1.0) * lam) < 1e-12);
}

TEST_CASE("radial profile flow matches the 1-D homothety") {
  const auto m = geom::poincare_disk();
  auto p = radial_profile(*m, 129, 0.9);
  p.boundary = BoundaryKind::Dirichlet;
  p.outer_value = [](double r, double t) { return (1 + 2 * t) / ((1 - r * r) * (1 - r * r)); };
  p.outer_rate = [](double r, double) { return 2.0 / ((1 - r * r) * (1 - r * r)); };
  const double dt = 1e-6;
  for (int k = 0; k < 100; ++k) radial_flow_step(p, dt, Exec::Serial);
  double err = 0.0;
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    const double ex = (1 + 2 * p.t) / std::pow(1 - p.r[i] * p.r[i], 2);
    err = std::max(err, std::abs(p.lambda[i] - ex) / ex);
  }
  CHECK(err < 1e-6);
}

TEST_CASE("CFL bound for n = 2 matches a generalized eigensolver") {
  const Grid g = Grid::box(2, 0.0, 1.0, 8, true);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  MatrixField G(g.size() * 4), R(g.size() * 4);
  double emin = 1e300, rmax = 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    CMat A(2, 2), B(2, 2);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) A(p, q) = cd(N(rng), N(rng)), B(p, q) = cd(N(rng), N(rng));
    const CMat gi = A * A.adjoint() + 0.1 * CMat::Identity(2, 2);
    const CMat ri = 3.0 * (B + B.adjoint());
    store_matrix(G, 2, i, gi);
    store_matrix(R, 2, i, ri);
    Eigen::SelfAdjointEigenSolver<CMat> e(gi);
    emin = std::min(emin, e.eigenvalues().minCoeff());
    Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ge(ri, gi, Eigen::EigenvaluesOnly);
    rmax = std::max(rmax, ge.eigenvalues().cwiseAbs().maxCoeff());
  }
  const double expect = 0.3 * g.step() * g.step() * emin / rmax;
  CHECK(cfl_bound(g, G, R, 0.3) == doctest::Approx(expect).epsilon(1e-10));
}
