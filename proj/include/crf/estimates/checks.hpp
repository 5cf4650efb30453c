#pragma once

#include <vector>

#include "crf/core/report.hpp"
#include "crf/flow/flow.hpp"
#include "crf/geometry/metric.hpp"

namespace crf::est {

/// t R + n over interior nodes of every frame (for normalized runs the scalar curvature of g~,
/// which equals t R). The t = 0 frame is skipped for unnormalized runs.
EstimateReport scalar_lower_bound_check(const flow::FlowRun& run, double tolerance = 1e-2,
                                        flow::Exec exec = flow::Exec::Parallel);

/// Pointwise |Ric|^2 - R^2 / n >= 0 on every frame; slack is reported relative to |Ric|^2 + 1.
/// details.identity_residual is the sup over interior nodes and interior frames of
/// |(R_{k+1} - R_{k-1}) / (2 dt) - Delta R_k - |Ric_k|^2|, Delta taken with the frame metric.
/// With identity_tolerance >= 0 the residual also enters the slack as identity_tolerance - residual.
EstimateReport scalar_evolution_residual(const flow::FlowRun& run, double tolerance = 1e-10,
                                         flow::Exec exec = flow::Exec::Parallel,
                                         double identity_tolerance = -1.0);

/// phi~' <= 0 and phi~' + phi~ <= 0 at every node and frame, and phi~' + phi~ non-increasing
/// between frames up to dt_slack.
EstimateReport potential_monotonicity_check(const flow::FlowRun& run, double tolerance = 1e-8,
                                            double dt_slack = -1.0);

struct KeConvergenceOptions {
  double threshold = 1e-3;
  double r_limit = 0.9;           ///< compare with the exact metric on |z| <= r_limit
  double tail_noise = 1e-10;      ///< tolerated increase of ke_residual between tail frames
};
/// ke_residual monotone over the last half, final ke_residual and sup error below threshold.
/// The error is the larger of max |g - g_KE| and max |g - g_KE|_{g_KE}. exact may be null.
/// Broken runs are reported as not applicable.
EstimateReport ke_convergence_check(const flow::FlowRun& run, const geom::MetricProvider* exact,
                                    const KeConvergenceOptions& opt = {},
                                    flow::Exec exec = flow::Exec::Parallel);

/// Sup over frames and nodes of max |g - g_exact| / max |g_exact| for Einstein data
/// Ric(g_model) = c g_model, where g_exact(t) = (1 - c t) g_model. c = 0 checks stationarity.
EstimateReport exact_solution_check(const flow::FlowRun& run, const geom::MetricProvider& model,
                                    double c, double tolerance = 1e-8);

/// Residual of (d_t - Delta) Lambda = (I) + (II) + (III) on an unnormalized run, Lambda = tr_g h.
/// Jets of g come from 4th-order differences of each frame, d_t Lambda from central differences
/// between frames and Delta Lambda from the grid stencil. Nodes with |z| > r_limit are skipped.
EstimateReport trace_heat_residual(const flow::FlowRun& run, const geom::MetricProvider& h,
                                   double tolerance = 1e-4, double r_limit = 1e300);

}  // namespace crf::est
