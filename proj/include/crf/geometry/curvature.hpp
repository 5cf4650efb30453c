#pragma once

#include "crf/core/types.hpp"
#include "crf/geometry/metric.hpp"

namespace crf::geom {

/// Pointwise Chern-connection data of a Hermitian metric.
///
/// Storage conventions (all indices 0-based):
///   g_inv(i, j)             = g^{i jbar}
///   connection(i, j, k)     = Gamma^k_{ij}      = g^{k lbar} d_i g_{j lbar}
///   torsion_lower(i, j, l)  = T_{i j lbar}      = d_i g_{j lbar} - d_j g_{i lbar}
///   torsion_mixed(i, j, k)  = T^k_{ij}          = g^{k lbar} T_{i j lbar}
///   curvature(i, j, k, l)   = R_{i jbar k lbar} = -d_i d_jbar g_{k lbar} + g^{q pbar} d_i g_{k pbar} d_jbar g_{q lbar}
///   ricci(i, j)             = R_{i jbar}        = -d_i d_jbar log det g
struct CurvaturePackage {
  Point point;
  int n = 0;
  CMat g;
  CMat g_inv;
  Tensor3 connection;
  Tensor3 torsion_lower;
  Tensor3 torsion_mixed;
  Tensor4 curvature;
  CMat ricci;
  double scalar = 0.0;
  bool has_curvature = false;
};

/// g^{i jbar} laid out as g_inv(i, j).
CMat inverse_metric(const CMat& g);

CurvaturePackage connection_from_jet(const MetricJet& jet);
CurvaturePackage curvature_from_jet(const MetricJet& jet);

/// Connection part only (first derivatives).
CurvaturePackage chern_connection(const MetricProvider& g, const Point& z);
/// Torsion tensors; requires first derivatives.
CurvaturePackage torsion(const MetricProvider& g, const Point& z);
/// Full package: connection, torsion, curvature, Ricci via log det, scalar.
CurvaturePackage chern_curvature(const MetricProvider& g, const Point& z);

/// Ricci computed as the g^{k lbar} trace of the curvature over its second pair.
CMat ricci_from_trace(const CurvaturePackage& pkg);

/// N(i, j, l, k) = nabla_i T_{jbar lbar k}, with T_{jbar lbar k} = conj(T_{j l kbar}).
Tensor4 nabla_torsion_conj(const MetricJet& jet, const CurvaturePackage& pkg);

/// Max-norm residual of R_{i jbar k lbar} = R_{i lbar k jbar} - nabla_i T_{jbar lbar k}
/// over all index combinations.
double kahler_identity_residual(const MetricProvider& g, const Point& z);
double kahler_identity_residual(const MetricJet& jet);

/// R(X, Xbar, X, Xbar) (real part; imaginary part is round-off).
cd bisectional_form(const Tensor4& R, const CVec& X, const CVec& Y);

}  // namespace crf::geom
