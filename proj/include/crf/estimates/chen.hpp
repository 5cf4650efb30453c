#pragma once

#include <vector>

#include "crf/core/report.hpp"

namespace crf::est {

/// Riccati majorant q' = -alpha q^2 + beta from q(0) = q0 on (0, T].
struct ChenResult {
  double sup_tq = 0.0;   ///< sup over (0, T] of t q(t)
  double t_at_sup = 0.0;
  double bound = 0.0;    ///< (1 + sqrt(1 + 4 alpha beta T^2)) / (2 alpha)
  double slack = 0.0;    ///< bound - sup_tq
};

double chen_bound(double alpha, double beta, double T);

/// Integrates with an adaptive Dormand-Prince scheme (rtol 1e-12) and maximizes t q(t) over
/// dense output on a geometric-plus-uniform time grid, refined by golden-section search.
ChenResult chen_ode_oracle(double alpha, double beta, double T, double q0);

/// Closed-form Riccati solution, used as an independent check.
double chen_exact(double alpha, double beta, double q0, double t);

struct ChenSweep {
  std::vector<double> alphas, betas, Ts, q0s;
};
/// 5 x 5 x 5 grid over [0.1, 10] x [0, 10] x [0.1, 2] (alpha and T geometric, beta linear)
/// and q0 in {0.1, 1, 10, 100, 1000}.
ChenSweep default_chen_sweep();
EstimateReport chen_sweep_check(const ChenSweep& sweep, double tolerance = 1e-6);

}  // namespace crf::est
