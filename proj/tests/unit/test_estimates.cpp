#include <doctest.h>

#include <cmath>
#include <random>

#include "crf/estimates/barrier.hpp"
#include "crf/estimates/checks.hpp"
#include "crf/estimates/chen.hpp"
#include "crf/estimates/uniqueness.hpp"
#include "crf/flow/flow.hpp"
#include "crf/geometry/models.hpp"

using namespace crf;

TEST_CASE("Chen bound at alpha = beta = T = 1 is the golden ratio") {
  CHECK(est::chen_bound(1.0, 1.0, 1.0) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(est::chen_bound(2.0, 0.0, 5.0) == doctest::Approx(0.5));
}

TEST_CASE("Riccati closed form solves q' = -alpha q^2 + beta") {
  for (double beta : {0.0, 0.7}) {
    const double a = 1.3, q0 = 4.0, h = 1e-5;
    for (double t : {0.01, 0.3, 1.7}) {
      const double q = est::chen_exact(a, beta, q0, t);
      const double dq = (est::chen_exact(a, beta, q0, t + h) - est::chen_exact(a, beta, q0, t - h)) / (2 * h);
      CHECK(std::abs(dq - (-a * q * q + beta)) < 1e-6);
    }
    CHECK(est::chen_exact(a, beta, q0, 0.0) == doctest::Approx(q0));
  }
  // q0 below and above the equilibrium sqrt(beta / alpha) both approach it
  CHECK(est::chen_exact(1.0, 4.0, 0.1, 20.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(est::chen_exact(1.0, 4.0, 50.0, 20.0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("ODE oracle matches the closed form maximum") {
  const auto r = est::chen_ode_oracle(1.0, 1.0, 1.0, 10.0);
  double best = 0.0;
  for (int k = 1; k <= 200000; ++k) {
    const double t = k / 200000.0;
    best = std::max(best, t * est::chen_exact(1.0, 1.0, 10.0, t));
  }
  CHECK(std::abs(r.sup_tq - best) < 1e-9);
  CHECK(r.slack >= 0.0);
}

TEST_CASE("barrier constants") {
  est::BarrierConfig b;
  b.n = 1;
  b.alpha = 1.0;
  b.kappa0 = 2.0;
  b.c1 = 1.0;
  CHECK(b.v(0.0) == doctest::Approx(2.0));
  CHECK(b.rate() == doctest::Approx(2.0));
  // 2^{-3} - 6 t = 0
  CHECK(b.blowup_time() == doctest::Approx(1.0 / 48.0));
  CHECK(std::isinf(b.v(b.blowup_time())));
  CHECK(b.existence_time() == doctest::Approx(1.0 / 32.0));
  b.kappa0 = 0.0;
  CHECK(b.v(100.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(b.existence_time(), PreconditionError);
  b.beta = -1.0;
  CHECK_THROWS(b.validate());
}

TEST_CASE("measured alpha is the sharp two-sided constant") {
  const auto g = flow::Grid::radial(0.9, 16);
  const auto a = flow::sample_metric(g, *geom::poincare_ke());
  const auto b = flow::sample_metric(g, *geom::poincare_disk());
  CHECK(est::measure_alpha(1, a, b) == doctest::Approx(2.0));
  CHECK(est::measure_alpha(1, b, b) == doctest::Approx(1.0));
}

TEST_CASE("trace barrier c1_min on the Fubini-Study collapse") {
  // Lambda = tr_g h with h = g0 and g = (1 - 2t) g0 gives Lambda = 1 / (1 - 2t); alpha = 1, s = kappa0.
  // Smallest c1 with Lambda + 1 <= v(t) over frames: max_t [2^{-3} - (Lambda + 1)^{-3}] / (3 s t).
  const auto m = geom::fubini_study_cap();
  auto g = std::make_shared<const flow::Grid>(flow::Grid::radial(0.9, 32));
  auto st = flow::make_flow_state(g, *m, flow::BoundaryKind::Dirichlet, flow::homothety_boundary(m, 2.0));
  flow::RunConfig rc;
  rc.horizon = 0.3;
  rc.frame_interval = 0.05;
  rc.safety = 1.0;
  const auto h = flow::sample_metric(*g, *m);
  const auto run = flow::run_flow(st, rc, &h);
  est::BarrierConfig b;
  b.kappa0 = 1.0;
  const auto rep = est::trace_barrier_check(run, h, b);
  double expect = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const double t = 0.05 * k, lam = 1.0 / (1.0 - 2.0 * t);
    expect = std::max(expect, (0.125 - std::pow(lam + 1.0, -3.0)) / (3.0 * t));
  }
  CHECK(rep.details["c1_min"].get<double>() == doctest::Approx(expect).epsilon(1e-7));
  CHECK(rep.satisfied == (expect <= 1.0));
}

TEST_CASE("uniqueness F is antisymmetric and vanishes for isometric KE pairs") {
  const auto w1 = geom::poincare_ke();
  const auto w2 = geom::pullback_n1(w1, geom::mobius(cd(0.2, -0.4)), "m");
  const auto pts = est::disk_samples(50, 0.8, 11);
  const auto a = est::uniqueness_F(*w1, *w2, pts), b = est::uniqueness_F(*w2, *w1, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(a.F[k] == -b.F[k]);
  CHECK(std::max(std::abs(a.sup_F), std::abs(a.inf_F)) < 1e-10);
  CHECK_THROWS_AS(est::uniqueness_F(*w1, *geom::poincare_disk(), pts), NotKahlerEinsteinError);
}

TEST_CASE("disk samples are deterministic and inside the disk") {
  const auto a = est::disk_samples(500, 0.7, 3), b = est::disk_samples(500, 0.7, 3);
  double rmax = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k] == b[k]);
    rmax = std::max(rmax, std::abs(a[k](0)));
  }
  CHECK(rmax <= 0.7);
  CHECK(rmax > 0.65);
  CHECK(est::disk_samples(5, 0.7, 4)[0] != a[0]);
}

TEST_CASE("exact tracking and scalar bound on a short Poincare run") {
  const auto m = geom::poincare_disk();
  auto g = std::make_shared<const flow::Grid>(flow::Grid::radial(0.9, 64));
  auto st = flow::make_flow_state(g, *m, flow::BoundaryKind::Dirichlet, flow::homothety_boundary(m, -2.0));
  flow::RunConfig rc;
  rc.horizon = 0.2;
  rc.frame_interval = 0.05;
  rc.safety = 1.0;
  const auto run = flow::run_flow(st, rc);
  CHECK(est::exact_solution_check(run, *m, -2.0, 1e-10).satisfied);
  const auto s = est::scalar_lower_bound_check(run);
  CHECK(s.satisfied);
  // R = -2 / (1 + 2t) exactly, so min tR + 1 = 1 - 2t / (1 + 2t) at t = 0.2
  CHECK(s.details["min_tR"].get<double>() == doctest::Approx(-0.4 / 1.4).epsilon(1e-6));
}
