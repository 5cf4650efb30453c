#include "crf/geometry/royden.hpp"

namespace crf::geom {

RoydenResult royden_from(const CMat& g, const CurvaturePackage& hpkg, const HscReport& hrep,
                         double kappa0) {
  const int n = hpkg.n;
  RoydenResult r;
  r.kappa = hrep.kappa;
  r.nabla_bar_T = hrep.nabla_bar_T_norm;
  if (r.kappa > kappa0) {
    r.skipped = true;
    return r;
  }
  const CMat gi = inverse_metric(g);
  cd lhs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) lhs += gi(i, j) * gi(k, l) * hpkg.curvature(i, j, k, l);
  const CMat A = g.inverse() * hpkg.g;
  r.trace = A.trace().real();
  r.h_norm2 = (A * A).trace().real();
  r.lhs = lhs.real();
  const double L2 = r.trace * r.trace;
  r.rhs = ((n + 1.0) / (2.0 * n) * r.kappa + r.nabla_bar_T) * L2 +
          0.5 * kappa0 * (-L2 / n + r.h_norm2);
  r.slack = r.rhs - r.lhs;
  return r;
}

RoydenResult royden_check(const MetricProvider& g, const MetricProvider& h, const Point& z,
                          double kappa0, const SamplerConfig& cfg) {
  if (g.dim() != h.dim()) throw PreconditionError("royden_check: mismatched dimensions");
  const CMat gv = g.eval(z);
  CurvaturePackage hpkg = chern_curvature(h, z);
  const HscReport rep = hsc_max(h, z, cfg);
  return royden_from(gv, hpkg, rep, kappa0);
}

}  // namespace crf::geom
