#pragma once

#include <functional>

#include "crf/geometry/curvature.hpp"

namespace crf::geom {

/// Lambda = tr_g h and the pieces of its heat-operator evolution under dg/dt = -Ric(g).
/// T0 is the torsion of g, which the Chern-Ricci flow preserves.
struct TraceDiagnostics {
  Point point;
  double lambda = 0.0;
  Tensor3 psi;  ///< psi(i, j, k) = hat Gamma^k_{ij} - Gamma^k_{ij}
  double term_I = 0.0;
  double term_II = 0.0;
  double term_III = 0.0;
  double term_IV = 0.0;  ///< Lambda^{-1} (I) + Lambda^{-2} |d Lambda|_g^2
  double bound_I = 0.0;
  double bound_IV = 0.0;
  double dt_lambda = 0.0;
  double lap_lambda = 0.0;
  double heat_residual = 0.0;  ///< (d_t - Delta) Lambda - [(I) + (II) + (III)]
  CVec grad_lambda;            ///< d_p Lambda
};

/// Decomposition terms only (no d_t or Delta), from jets of g and h at one point.
TraceDiagnostics trace_terms_from_jets(const MetricJet& g, const MetricJet& h);

/// Terms plus d_t Lambda and Delta Lambda evaluated in closed form from the jets,
/// with d_t g = -Ric(g).
TraceDiagnostics trace_terms_exact(const MetricJet& g, const MetricJet& h);

using TimeDerivativeFn = std::function<CMat(const Point&)>;

struct TraceFdOptions {
  double time_step = 1e-5;   ///< epsilon in Lambda(g +- eps dg/dt)
  double space_step = 1e-3;  ///< central second differences of Lambda(z)
};

/// Terms from the jets; d_t Lambda by central difference along g + eps * gdot and
/// Delta Lambda by central differences of Lambda(z) on the chart.
TraceDiagnostics trace_and_terms(const MetricProvider& g, const MetricProvider& h,
                                 const TimeDerivativeFn& gdot, const Point& z,
                                 const TraceFdOptions& opt = {});

/// Same, with gdot = -Ric(g) taken from g itself.
TraceDiagnostics trace_and_terms(const MetricProvider& g, const MetricProvider& h, const Point& z,
                                 const TraceFdOptions& opt = {});

/// tr_g h = g^{i jbar} h_{i jbar}.
double trace_of(const CMat& g, const CMat& h);

}  // namespace crf::geom
