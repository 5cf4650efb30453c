#pragma once

#include "crf/geometry/hsc.hpp"

namespace crf::geom {

struct RoydenResult {
  double lhs = 0.0;  ///< g^{i jbar} g^{k lbar} hat R_{i jbar k lbar}
  double rhs = 0.0;
  double slack = 0.0;
  double kappa = 0.0;
  double nabla_bar_T = 0.0;
  double trace = 0.0;      ///< tr_g h
  double h_norm2 = 0.0;    ///< |h|_g^2 = g^{i jbar} g^{k lbar} h_{k jbar} h_{i lbar}
  bool skipped = false;    ///< kappa > kappa0: precondition violated
};

/// Evaluates both sides of the Royden-type bound at z. kappa and the torsion-derivative
/// norm come from hsc_max on h; kappa0 is the caller's upper bound for kappa.
RoydenResult royden_check(const MetricProvider& g, const MetricProvider& h, const Point& z,
                          double kappa0, const SamplerConfig& cfg = {});

/// Same evaluation from a metric value for g and a precomputed report for h.
RoydenResult royden_from(const CMat& g, const CurvaturePackage& hpkg, const HscReport& hrep,
                         double kappa0);

}  // namespace crf::geom
