#pragma once

#include <functional>

#include "crf/geometry/curvature.hpp"

namespace crf::geom {

/// Real scalar field value with Wirtinger derivatives at a point.
struct ScalarJet {
  double value = 0.0;
  CVec d;      ///< d_a F
  CMat ddbar;  ///< (a, b) -> d_a d_bbar F
};
using ScalarFieldFn = std::function<ScalarJet(const Point&)>;

ScalarFieldFn constant_field(int n, double c);

/// F = f(u) with u = rho / scale and rho = 1 + |z|^2; f supplied with two derivatives.
struct ProfileValue {
  double f = 0.0, f1 = 0.0, f2 = 0.0;
};
ScalarFieldFn radial_exhaustion_field(int n, double scale, std::function<ProfileValue(double)> f);

/// e^{2F} g with derivatives assembled by the product and chain rule.
MetricPtr conformal_metric(MetricPtr base, ScalarFieldFn F, std::string label = {});

/// Torsion of e^{2F} g from the base torsion: 2 e^{2F} (F_p g_{k qbar} - F_k g_{p qbar}) + e^{2F} T.
Tensor3 conformal_torsion_law(const CurvaturePackage& base, const ScalarJet& F);

/// Curvature of e^{2F} g from the base curvature: e^{2F} (R_{i jbar k lbar} - 2 F_{i jbar} g_{k lbar}).
Tensor4 conformal_curvature_law(const CurvaturePackage& base, const ScalarJet& F);

}  // namespace crf::geom
