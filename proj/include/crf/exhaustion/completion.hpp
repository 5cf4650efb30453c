#pragma once

#include "crf/exhaustion/cutoff.hpp"
#include "crf/geometry/conformal.hpp"
#include "crf/geometry/hsc.hpp"

namespace crf::exh {

/// rho = 1 + |z|^2 on the chart; F = frakF(rho / rho_i).
struct CompletionSpec {
  CutoffSpec cutoff;
  double rho_i = 50.0;
  int radial_samples = 64;   ///< sample radii per direction
  int directions = 8;        ///< sample directions in C^n
  geom::SamplerConfig sampler{256, 30, 64, 20, 0};
  void validate() const;
};

/// The scalar field F = frakF(rho / rho_i) with two derivatives.
geom::ScalarFieldFn completion_field(int n, const CompletionSpec& spec);

struct CompletionResult {
  geom::MetricPtr g0i;  ///< e^{2F} g0
  geom::MetricPtr hi;   ///< e^{2F} h
  double beta = 0.0;    ///< measured from g0, h before the change
  double kappa0 = 0.0;  ///< sup of (n+1)/(2n) kappa_h + |hat nabla T_hat|_h
  double c_i = 0.0, c_ii = 0.0, c_iii = 0.0, c_iv = 0.0;
  double c = 0.0;                 ///< max of the four
  double law_torsion_error = 0.0; ///< law vs direct, max abs over samples
  double law_curvature_error = 0.0;
  double law_hsc_error = 0.0;
  double unchanged_region_error = 0.0;  ///< tensors where F = 0 vs the originals
  EstimateReport report;
};

/// Builds the conformal completion and calibrates the constant in bounds (i)-(iv) over
/// sample points with rho / rho_i in (0, 1).
CompletionResult conformal_completion(geom::MetricPtr g0, geom::MetricPtr h, const CompletionSpec& spec);

}  // namespace crf::exh
