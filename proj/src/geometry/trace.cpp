#include "crf/geometry/trace.hpp"

#include <cmath>

namespace crf::geom {

double trace_of(const CMat& g, const CMat& h) {
  return (g.inverse() * h).trace().real();
}

TraceDiagnostics trace_terms_from_jets(const MetricJet& gj, const MetricJet& hj) {
  if (gj.n != hj.n) throw PreconditionError("trace terms: metrics of different dimension");
  if (gj.order < 2 || hj.order < 2)
    throw DerivativeOrderError("trace terms need second derivatives of both metrics");
  const int n = gj.n;
  const CurvaturePackage G = curvature_from_jet(gj);
  const CurvaturePackage H = curvature_from_jet(hj);
  const CMat& gi = G.g_inv;  // gi(i, j) = g^{i jbar}
  const CMat& hi = H.g_inv;
  const CMat& h = hj.g;
  const Tensor3& T0 = G.torsion_lower;
  const Tensor3& Th = H.torsion_lower;

  TraceDiagnostics d;
  d.lambda = trace_of(gj.g, h);
  d.psi = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) d.psi(i, j, k) = H.connection(i, j, k) - G.connection(i, j, k);
  const Tensor3& P = d.psi;

  // (I)
  cd quad = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const cd gg = gi(i, j) * gi(p, q);
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              quad += h(k, l) * gg * P(p, i, k) * std::conj(P(q, j, l));
              const cd w = gg * gi(k, l) * h(k, j);
              for (int s = 0; s < n; ++s) cross += w * std::conj(P(l, q, s)) * T0(i, p, s);
            }
        }
  d.term_I = -quad.real() - 2.0 * cross.real();

  // (II): algebraic torsion part
  cd alg = 0.0;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          for (int q = 0; q < n; ++q)
            for (int p = 0; p < n; ++p) {
              const cd w = gi(l, k) * gi(j, i) * gi(q, p) * h(j, k);
              if (w == 0.0) continue;
              for (int r = 0; r < n; ++r) {
                cd br = 0.0;
                for (int s = 0; s < n; ++s) br += Th(l, q, s) * hi(r, s) - T0(l, q, s) * gi(r, s);
                alg += w * std::conj(T0(i, p, r)) * br;
              }
            }
  // (II): hat-covariant derivatives of T0
  cd der = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
              const cd w = gi(i, j) * gi(k, l) * gi(p, q) * h(k, j);
              if (w == 0.0) continue;
              // hat nabla_p T0_{qbar lbar i}
              cd a = std::conj(gj.ddbar[q][p](l, i) - gj.ddbar[l][p](q, i));
              for (int r = 0; r < n; ++r) a -= H.connection(p, i, r) * std::conj(T0(q, l, r));
              // hat nabla_lbar T0_{p i qbar}
              cd b = gj.ddbar[p][l](i, q) - gj.ddbar[i][l](p, q);
              for (int r = 0; r < n; ++r) b -= std::conj(H.connection(l, q, r)) * T0(p, i, r);
              der += w * (a + b);
            }
  d.term_II = (alg + der).real();

  // (III)
  cd t3 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) t3 += gi(i, j) * gi(p, q) * H.curvature(p, q, i, j);
  d.term_III = t3.real();

  // bound on (I)
  cd b1 = 0.0;
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        for (int q = 0; q < n; ++q) {
          const cd w0 = h(p, r) * h(c, q) * gi(p, q);
          if (w0 == 0.0) continue;
          for (int k = 0; k < n; ++k)
            for (int a = 0; a < n; ++a)
              for (int s = 0; s < n; ++s)
                for (int dd = 0; dd < n; ++dd) {
                  const cd w1 = w0 * hi(k, a) * gi(s, r) * gi(c, dd);
                  if (w1 == 0.0) continue;
                  for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                      b1 += w1 * gi(i, j) * T0(s, i, a) * std::conj(T0(dd, j, k));
                }
        }
  d.bound_I = b1.real();

  // d_p Lambda = tr(-G^{-1} dG G^{-1} H + G^{-1} dH)
  const CMat Ginv = gj.g.inverse();
  d.grad_lambda = CVec::Zero(n);
  for (int p = 0; p < n; ++p)
    d.grad_lambda(p) = (-Ginv * gj.d[p] * Ginv * h + Ginv * hj.d[p]).trace();
  double grad2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) grad2 += (gi(i, j) * d.grad_lambda(i) * std::conj(d.grad_lambda(j))).real();
  d.term_IV = d.term_I / d.lambda + grad2 / (d.lambda * d.lambda);

  // bound on (IV): Lambda^{-1} bound_I + 2 Lambda^{-2} Re[h_{p rbar} g^{a rbar} g^{i lbar} g^{p qbar} T0_{a i lbar} dbar_q Lambda]
  cd b4 = 0.0;
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r)
      for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
          for (int l = 0; l < n; ++l)
            for (int q = 0; q < n; ++q)
              b4 += h(p, r) * gi(a, r) * gi(i, l) * gi(p, q) * T0(a, i, l) * std::conj(d.grad_lambda(q));
  d.bound_IV = d.bound_I / d.lambda - 2.0 * b4.real() / (d.lambda * d.lambda);
  return d;
}

TraceDiagnostics trace_terms_exact(const MetricJet& gj, const MetricJet& hj) {
  TraceDiagnostics d = trace_terms_from_jets(gj, hj);
  const int n = gj.n;
  const CurvaturePackage G = curvature_from_jet(gj);
  const CMat Ginv = gj.g.inverse();
  const CMat& H = hj.g;
  d.dt_lambda = (Ginv * G.ricci * Ginv * H).trace().real();

  cd lap = 0.0;
  for (int p = 0; p < n; ++p) {
    const CMat dpGi = -Ginv * gj.d[p] * Ginv;
    for (int q = 0; q < n; ++q) {
      const cd w = G.g_inv(p, q);
      if (w == 0.0) continue;
      const CMat Bq = gj.dbar(q);
      const CMat dqGi = -Ginv * Bq * Ginv;
      const CMat ddGi = Ginv * Bq * Ginv * gj.d[p] * Ginv + Ginv * gj.d[p] * Ginv * Bq * Ginv -
                        Ginv * gj.ddbar[p][q] * Ginv;
      const cd v = (ddGi * H).trace() + (dpGi * hj.dbar(q)).trace() + (dqGi * hj.d[p]).trace() +
                   (Ginv * hj.ddbar[p][q]).trace();
      lap += w * v;
    }
  }
  d.lap_lambda = lap.real();
  d.heat_residual = d.dt_lambda - d.lap_lambda - (d.term_I + d.term_II + d.term_III);
  return d;
}

TraceDiagnostics trace_and_terms(const MetricProvider& g, const MetricProvider& h,
                                 const TimeDerivativeFn& gdot, const Point& z,
                                 const TraceFdOptions& opt) {
  if (g.dim() != h.dim()) throw PreconditionError("trace_and_terms: mismatched charts");
  const MetricJet gj = g.jet(z, 2);
  const MetricJet hj = h.jet(z, 2);
  TraceDiagnostics d = trace_terms_from_jets(gj, hj);
  d.point = z;

  const CMat gd = gdot(z);
  const double e = opt.time_step;
  d.dt_lambda = (trace_of(gj.g + e * gd, hj.g) - trace_of(gj.g - e * gd, hj.g)) / (2.0 * e);

  const int n = g.dim();
  const double s = opt.space_step;
  const auto lam = [&](const Point& w) { return trace_of(g.unchecked_value(w), h.unchecked_value(w)); };
  const double l0 = d.lambda;
  // d_p d_qbar = 1/4 [ (d_xp d_xq + d_yp d_yq) + i (d_xp d_yq - d_yp d_xq) ]
  const auto second = [&](int a, int b) {
    if (a == b) return (lam(axis_shift(z, a, s)) - 2.0 * l0 + lam(axis_shift(z, a, -s))) / (s * s);
    const Point pp = axis_shift(axis_shift(z, a, s), b, s), pm = axis_shift(axis_shift(z, a, s), b, -s);
    const Point mp = axis_shift(axis_shift(z, a, -s), b, s), mm = axis_shift(axis_shift(z, a, -s), b, -s);
    return (lam(pp) - lam(pm) - lam(mp) + lam(mm)) / (4.0 * s * s);
  };
  const CMat gi = inverse_metric(gj.g);
  cd lap = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const int xp = 2 * p, yp = 2 * p + 1, xq = 2 * q, yq = 2 * q + 1;
      const cd ddb = 0.25 * cd(second(xp, xq) + second(yp, yq), second(xp, yq) - second(yp, xq));
      lap += gi(p, q) * ddb;
    }
  d.lap_lambda = lap.real();
  d.heat_residual = d.dt_lambda - d.lap_lambda - (d.term_I + d.term_II + d.term_III);
  return d;
}

TraceDiagnostics trace_and_terms(const MetricProvider& g, const MetricProvider& h, const Point& z,
                                 const TraceFdOptions& opt) {
  return trace_and_terms(
      g, h, [&g](const Point& w) -> CMat { return -chern_curvature(g, w).ricci; }, z, opt);
}

}  // namespace crf::geom
