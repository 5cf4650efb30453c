#include <doctest.h>

#include <cmath>

#include "crf/exhaustion/completion.hpp"
#include "crf/exhaustion/cutoff.hpp"
#include "crf/geometry/models.hpp"

using namespace crf;
using namespace crf::exh;

TEST_CASE("profile f and the smooth step") {
  const double tau = 0.1;
  CHECK(f_eval(0.85, tau) == 0.0);
  // x = 0.5: -log(3/4)
  CHECK(f_eval(0.95, tau) == doctest::Approx(-std::log(0.75)));
  const double h = 1e-6, s = 0.97;
  CHECK(f_d1(s, tau) == doctest::Approx((f_eval(s + h, tau) - f_eval(s - h, tau)) / (2 * h)).epsilon(1e-7));
  CHECK(f_d2(s, tau) == doctest::Approx((f_d1(s + h, tau) - f_d1(s - h, tau)) / (2 * h)).epsilon(1e-7));
  CHECK_THROWS_AS(f_eval(1.0, tau), DomainError);
  CHECK_THROWS_AS(f_eval(-0.1, tau), DomainError);

  CHECK(sigma(0.0) == 0.0);
  CHECK(sigma(1.0) == 1.0);
  CHECK(sigma(0.5) == doctest::Approx(0.5));
  double slope = 0.0;
  for (int k = 0; k <= 1000; ++k) slope = std::max(slope, sigma_d1(k / 1000.0));
  CHECK(slope <= 2.0);
}

TEST_CASE("cutoff phi and frakF") {
  CutoffSpec c;
  c.tau = 0.05;
  CHECK(phi(c.support_start(), c) == 0.0);
  CHECK(phi(c.plateau_start(), c) == 1.0);
  CHECK(frak_F(c.support_start(), c).value == 0.0);
  for (double s : {c.support_start() + 0.3 * c.tau * c.tau, c.plateau_start() + 0.02, 0.99}) {
    const auto a = frak_F(s, c), b = frak_F_quadrature(s, c);
    CHECK(a.converged);
    CHECK(std::abs(a.value - b.value) <= 1e-9 * std::max(1.0, std::abs(b.value)));
  }
  // beyond the plateau frakF' = f'
  CHECK(frak_F_derivative(0.99, c, 1) == doctest::Approx(f_d1(0.99, c.tau)).epsilon(1e-12));
  CutoffSpec bad;
  bad.tau = 0.2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("cutoff properties report") {
  CutoffSpec c;
  c.tau = 0.1;
  const auto r = frakF_properties_check(c, 4, 2000);
  CHECK(r.report.satisfied);
  CHECK(r.zero_region_exact);
  CHECK(r.sup_scaled_derivative.size() == 5);
  CHECK(r.max_phi_slope <= 1.0);
  CHECK(r.report.name == "cutoff_properties");
}

TEST_CASE("conformal laws agree with direct curvature of e^{2F} g") {
  CompletionSpec cs;
  cs.cutoff.tau = 0.1;
  cs.radial_samples = 16;
  cs.directions = 2;
  const auto r = conformal_completion(geom::hermitian_plane(0.3, 0.2), geom::euclidean(2), cs);
  CHECK(r.law_torsion_error < 1e-9);
  CHECK(r.law_curvature_error < 1e-9);
  CHECK(r.law_hsc_error < 1e-9);
  CHECK(r.unchanged_region_error == 0.0);
  CHECK(r.beta > 0.0);
  CHECK(r.c == doctest::Approx(std::max({r.c_i, r.c_ii, r.c_iii, r.c_iv})));
}
