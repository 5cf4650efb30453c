#pragma once

#include <json.hpp>

#include "crf/core/report.hpp"
#include "crf/flow/flow.hpp"

namespace crf::est {

/// Constants of the trace barrier v(t) = ((n alpha + 1)^{-3} - 3 c1 s t)^{-1/3}.
/// s = kappa0 + c2 beta (1 + beta) unless s_override is set (the supremum form).
struct BarrierConfig {
  int n = 1;
  double alpha = 1.0;
  double beta = 0.0;
  double k = 0.0;
  double kappa0 = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double s_override = -1.0;  ///< negative: use the kappa0 form
  double T = 1.0;            ///< horizon for the Chen bound

  double rate() const;
  /// 1 / (3 c1 (n alpha + 1)^3 s); infinite when s = 0.
  double blowup_time() const;
  /// S = 1 / (2 c1 (n alpha + 1)^3 s). Requires s > 0.
  double existence_time() const;
  /// Infinite at and beyond the blow-up time.
  double v(double t) const;
  /// alpha >= 1, beta >= 0, s >= 0, c1 > 0, c2 > 0, n >= 1.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Smallest alpha >= 1 with alpha^{-1} h <= g0 <= alpha h at every node.
double measure_alpha(int n, const flow::MatrixField& g0, const flow::MatrixField& h);

/// Compares sup_x tr_g h at each stored frame with v(t) - 1 (interior nodes).
/// Frames at or past the blow-up time are counted as out of the barrier domain, not failures.
/// details carries c1_min: the smallest c1 for which the barrier holds on this run.
EstimateReport trace_barrier_check(const flow::FlowRun& run, const flow::MatrixField& h,
                                   const BarrierConfig& cfg, double tolerance = 1e-10);

}  // namespace crf::est
