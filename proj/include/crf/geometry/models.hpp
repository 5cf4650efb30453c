#pragma once

#include <functional>

#include "crf/geometry/metric.hpp"

namespace crf::geom {

/// Profile of a U(1)-invariant metric g = lambda(rho)|dz|^2 with rho = |z|^2.
struct RadialProfileValue {
  double value = 0.0;
  double d1 = 0.0;  ///< d lambda / d rho
  double d2 = 0.0;  ///< d^2 lambda / d rho^2
};
using RadialProfileFn = std::function<RadialProfileValue(double rho)>;

/// n = 1 metric lambda(|z|^2) with closed-form jet.
MetricPtr radial_metric(ChartDomain chart, std::string label, RadialProfileFn profile);

MetricPtr euclidean(int n);
/// lambda = (1 - |z|^2)^{-2}: Ric = -2g, HSC = -2.
MetricPtr poincare_disk();
/// 2 (1 - |z|^2)^{-2}: the Kahler-Einstein metric with Ric = -g.
MetricPtr poincare_ke();
/// d dbar(-log(1 - |z|^2)) on the unit ball of C^n: Ric = -(n+1) g.
MetricPtr bergman_ball(int n = 2);
/// g_{1 1bar} = 1, g_{2 2bar} = 1 + |z_1|^2, g_{1 2bar} = 0 on C^2 (non-Kahler).
MetricPtr torsion_example_1();
/// lambda = (1 + |z|^2)^{-2} restricted to a disk: Ric = +2g.
MetricPtr fubini_study_cap();
/// (1 + eps * b(|z|^2)) (1 - |z|^2)^{-2} with b(rho) = cos^4(pi rho / (2 rho_b)) on rho < rho_b.
MetricPtr perturbed_poincare(double eps, double rho_b);

/// Flat metric on the torus [0, 2pi)^{2n}.
MetricPtr flat_torus(int n);
/// 1 + a sin(x) sin(y) on the 2-torus (n = 1, Kahler).
MetricPtr bumpy_torus(double amplitude);
/// Non-Kahler Hermitian metric on the 4-torus:
/// g11 = 1 + a cos(y2), g22 = 1 + a sin(x1), g12 = b exp(i x1).
MetricPtr hermitian_torus(double a, double b);
/// The same coefficients on all of C^2 (bounded, non-Kahler).
MetricPtr hermitian_plane(double a, double b);

/// Pullback of an n = 1 metric under a holomorphic self-map w = phi(z).
struct HolomorphicMap {
  std::function<cd(cd)> value;
  std::function<cd(cd)> d1;
  std::function<cd(cd)> d2;
};
MetricPtr pullback_n1(MetricPtr base, HolomorphicMap map, std::string label);
/// Disk automorphism z -> (z - a) / (1 - conj(a) z).
HolomorphicMap mobius(cd a);

}  // namespace crf::geom
