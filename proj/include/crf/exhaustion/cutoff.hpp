#pragma once

#include <vector>

#include "crf/core/report.hpp"
#include "crf/core/types.hpp"

namespace crf::exh {

/// Cutoff parameters. The transition of phi occupies [1 - tau + tau^2, 1 - tau + 2 tau^2];
/// its width tau^2 is forced by the slope bound phi' <= 2 / tau^2 together with the plateau.
struct CutoffSpec {
  double tau = 0.1;
  int quad_resolution = 20;      ///< max bisection depth of the adaptive Gauss-Kronrod rule
  double quad_tolerance = 1e-11; ///< relative tolerance requested from the quadrature
  void validate() const;
  double plateau_start() const { return 1.0 - tau + 2.0 * tau * tau; }  ///< phi = 1 beyond
  double support_start() const { return 1.0 - tau + tau * tau; }        ///< phi = 0 below
};

/// f(s) = 0 on [0, 1 - tau] and -log(1 - ((s - 1 + tau)/tau)^2) on (1 - tau, 1).
double f_eval(double s, double tau);
double f_d1(double s, double tau);
double f_d2(double s, double tau);

/// Smooth monotone transition 0 -> 1 on [0, 1], slope at most 2.
double sigma(double x);
double sigma_d1(double x);
double sigma_d2(double x);

double phi(double s, const CutoffSpec& spec);
double phi_d1(double s, const CutoffSpec& spec);
double phi_d2(double s, const CutoffSpec& spec);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  ///< achieved error estimate
  bool converged = true;
};

/// frakF(s) = int_0^s phi f'. Quadrature over the transition, closed form on the plateau.
QuadResult frak_F(double s, const CutoffSpec& spec);
/// Same integral by adaptive quadrature alone (reference path).
QuadResult frak_F_quadrature(double s, const CutoffSpec& spec);

/// k-th derivative, k = 0..4: analytic for k <= 2, central differences of the analytic
/// second derivative for k = 3, 4.
double frak_F_derivative(double s, const CutoffSpec& spec, int k);

struct CutoffPropertiesResult {
  EstimateReport report;
  bool zero_region_exact = true;
  std::vector<double> sup_scaled_derivative;  ///< sup e^{-k F} |F^(k)|, index k
  double c2 = 0.0;
  double c3 = 0.0;
  double max_phi_slope = 0.0;  ///< sup phi' tau^2 / 2 (<= 1 required)
};

/// Sweeps s over n_points samples and evaluates properties (i)-(iii) of the cutoff.
/// Property (iii) uses the local radius r(s) = tau (1 - s) / 2 for s in (1 - 2 tau, 1).
CutoffPropertiesResult frakF_properties_check(const CutoffSpec& spec, int K, int n_points = 10000);

/// Rows (s, f, phi, frakF, frakF') for plotting.
std::vector<std::array<double, 5>> cutoff_profile(const CutoffSpec& spec, int n_points);

}  // namespace crf::exh
