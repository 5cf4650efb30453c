#include "crf/geometry/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace crf::geom {

CMat inverse_metric(const CMat& g) { return g.inverse().transpose(); }

CurvaturePackage connection_from_jet(const MetricJet& jet) {
  if (jet.order < 1) throw DerivativeOrderError("connection needs first derivatives");
  const int n = jet.n;
  CurvaturePackage p;
  p.n = n;
  p.g = jet.g;
  p.g_inv = inverse_metric(jet.g);
  p.connection = Tensor3(n);
  p.torsion_lower = Tensor3(n);
  p.torsion_mixed = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        cd gam{};
        for (int l = 0; l < n; ++l) gam += p.g_inv(k, l) * jet.d[i](j, l);
        p.connection(i, j, k) = gam;
      }
      for (int l = 0; l < n; ++l) p.torsion_lower(i, j, l) = jet.d[i](j, l) - jet.d[j](i, l);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        cd t{};
        for (int l = 0; l < n; ++l) t += p.g_inv(k, l) * p.torsion_lower(i, j, l);
        p.torsion_mixed(i, j, k) = t;
      }
  return p;
}

CurvaturePackage curvature_from_jet(const MetricJet& jet) {
  if (jet.order < 2) throw DerivativeOrderError("curvature needs second derivatives");
  CurvaturePackage p = connection_from_jet(jet);
  const int n = jet.n;
  p.curvature = Tensor4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cd r = -jet.ddbar[i][j](k, l);
          for (int pp = 0; pp < n; ++pp)
            for (int q = 0; q < n; ++q)
              r += p.g_inv(q, pp) * jet.d[i](k, pp) * std::conj(jet.d[j](l, q));
          p.curvature(i, j, k, l) = r;
        }

  // Ricci through d dbar log det g, independent of the full tensor.
  const CMat ginv = jet.g.inverse();
  p.ricci = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      p.ricci(i, j) = (ginv * jet.d[i] * ginv * jet.dbar(j)).trace() - (ginv * jet.ddbar[i][j]).trace();
  cd s{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += p.g_inv(i, j) * p.ricci(i, j);
  p.scalar = s.real();
  p.has_curvature = true;
  return p;
}

CurvaturePackage chern_connection(const MetricProvider& g, const Point& z) {
  CurvaturePackage p = connection_from_jet(g.jet(z, 1));
  p.point = z;
  return p;
}

CurvaturePackage torsion(const MetricProvider& g, const Point& z) { return chern_connection(g, z); }

CurvaturePackage chern_curvature(const MetricProvider& g, const Point& z) {
  CurvaturePackage p = curvature_from_jet(g.jet(z, 2));
  p.point = z;
  return p;
}

CMat ricci_from_trace(const CurvaturePackage& pkg) {
  const int n = pkg.n;
  CMat ric = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) ric(i, j) += pkg.g_inv(k, l) * pkg.curvature(i, j, k, l);
  return ric;
}

Tensor4 nabla_torsion_conj(const MetricJet& jet, const CurvaturePackage& pkg) {
  if (jet.order < 2) throw DerivativeOrderError("nabla T needs second derivatives");
  const int n = jet.n;
  Tensor4 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          // d_i conj(T_{j l kbar}) = conj(d_ibar T_{j l kbar})
          const cd dT = jet.ddbar[j][i](l, k) - jet.ddbar[l][i](j, k);
          cd v = std::conj(dT);
          for (int r = 0; r < n; ++r) v -= pkg.connection(i, k, r) * std::conj(pkg.torsion_lower(j, l, r));
          out(i, j, l, k) = v;
        }
  return out;
}

double kahler_identity_residual(const MetricJet& jet) {
  const CurvaturePackage pkg = curvature_from_jet(jet);
  const Tensor4 nt = nabla_torsion_conj(jet, pkg);
  const int n = jet.n;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const cd res = pkg.curvature(i, j, k, l) - pkg.curvature(i, l, k, j) + nt(i, j, l, k);
          worst = std::max(worst, std::abs(res));
        }
  return worst;
}

double kahler_identity_residual(const MetricProvider& g, const Point& z) {
  return kahler_identity_residual(g.jet(z, 2));
}

cd bisectional_form(const Tensor4& R, const CVec& X, const CVec& Y) {
  const int n = R.dim();
  cd s{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += R(i, j, k, l) * X(i) * std::conj(X(j)) * Y(k) * std::conj(Y(l));
  return s;
}

}  // namespace crf::geom
