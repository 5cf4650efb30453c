#include "crf/geometry/conformal.hpp"

#include <cmath>

namespace crf::geom {

ScalarFieldFn constant_field(int n, double c) {
  return [n, c](const Point&) { return ScalarJet{c, CVec::Zero(n), CMat::Zero(n, n)}; };
}

ScalarFieldFn radial_exhaustion_field(int n, double scale, std::function<ProfileValue(double)> f) {
  return [n, scale, f](const Point& z) {
    const double rho = 1.0 + z.squaredNorm();
    const ProfileValue p = f(rho / scale);
    ScalarJet j{p.f, CVec::Zero(n), CMat::Zero(n, n)};
    // d_a rho = conj(z_a), d_a d_bbar rho = delta_ab
    for (int a = 0; a < n; ++a) j.d(a) = p.f1 * std::conj(z(a)) / scale;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        j.ddbar(a, b) = p.f2 * std::conj(z(a)) * z(b) / (scale * scale) + (a == b ? p.f1 / scale : 0.0);
    return j;
  };
}

MetricPtr conformal_metric(MetricPtr base, ScalarFieldFn F, std::string label) {
  if (label.empty()) label = "conformal:" + base->label();
  const int max_order = base->max_order();
  return std::make_shared<AnalyticMetric>(
      base->chart(), std::move(label),
      [base, F](const Point& z, int order) {
        const MetricJet b = base->jet(z, order);
        const ScalarJet f = F(z);
        const double e = std::exp(2.0 * f.value);
        MetricJet j = MetricJet::zero(b.n, order);
        j.g = e * b.g;
        if (order >= 1)
          for (int a = 0; a < b.n; ++a) j.d[a] = e * (2.0 * f.d(a) * b.g + b.d[a]);
        if (order >= 2)
          for (int a = 0; a < b.n; ++a)
            for (int c = 0; c < b.n; ++c) {
              const cd fbar_c = std::conj(f.d(c));  // d_cbar F for real F
              j.ddbar[a][c] = e * ((2.0 * f.ddbar(a, c) + 4.0 * f.d(a) * fbar_c) * b.g +
                                   2.0 * f.d(a) * b.dbar(c) + 2.0 * fbar_c * b.d[a] + b.ddbar[a][c]);
            }
        return j;
      },
      max_order);
}

Tensor3 conformal_torsion_law(const CurvaturePackage& base, const ScalarJet& F) {
  const int n = base.n;
  const double e = std::exp(2.0 * F.value);
  Tensor3 T(n);
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < n; ++q)
        T(p, k, q) = 2.0 * e * (F.d(p) * base.g(k, q) - F.d(k) * base.g(p, q)) + e * base.torsion_lower(p, k, q);
  return T;
}

Tensor4 conformal_curvature_law(const CurvaturePackage& base, const ScalarJet& F) {
  const int n = base.n;
  const double e = std::exp(2.0 * F.value);
  Tensor4 R(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          R(i, j, k, l) = e * (base.curvature(i, j, k, l) - 2.0 * F.ddbar(i, j) * base.g(k, l));
  return R;
}

}  // namespace crf::geom
