#pragma once

#include <cstdint>

#include "crf/geometry/curvature.hpp"

namespace crf::geom {

struct SamplerConfig {
  int directions = 2048;   ///< quasi-uniform sphere samples for the HSC search
  int ascent_steps = 50;   ///< projected gradient steps per ascent
  int frames = 512;        ///< unitary frames for the torsion-derivative sweep
  int frame_ascent_steps = 40;
  std::uint64_t seed = 0;  ///< offset into the low-discrepancy sequence
};

struct HscReport {
  Point point;
  double kappa = 0.0;
  CVec maximizer;  ///< unit in g, first nonzero entry real positive
  double nabla_bar_T_norm = 0.0;
  double combined = 0.0;  ///< (n+1)/(2n) kappa + nabla_bar_T_norm
  int evaluations = 0;
};

/// R(X, Xbar, X, Xbar) / |X|^4_g.
double hsc_ratio(const CurvaturePackage& pkg, const CVec& X);

/// Maximum of the holomorphic sectional curvature over unit directions.
HscReport hsc_max(const CurvaturePackage& pkg, const SamplerConfig& cfg = {});

/// Full report for a provider: kappa, maximizer and the torsion-derivative norm of the same metric.
HscReport hsc_max(const MetricProvider& h, const Point& z, const SamplerConfig& cfg = {});

/// N(i, j, l, k) = hat nabla_{ibar} hat T_{j l kbar} in coordinates.
Tensor4 nabla_bar_torsion(const MetricJet& jet, const CurvaturePackage& pkg);

/// hat nabla_{ibar} T_{j l kbar} for the torsion T of `src`, differentiated with `connection`
/// (the Chern connection of another metric h).
Tensor4 nabla_bar_torsion(const MetricJet& src, const Tensor3& T, const Tensor3& connection);

/// |T|_h for a tensor T_{i j kbar}.
double torsion_norm(const Tensor3& T, const CMat& h);

/// Largest component modulus of N(ibar, j, l, kbar) over sampled h-unitary frames; the value
/// never decreases as cfg.frames grows.
double frame_sweep_max(const Tensor4& N, const CMat& h, const SamplerConfig& cfg = {});

/// Largest component modulus of nabla_bar T over sampled h-unitary frames.
double nabla_bar_torsion_norm(const MetricJet& jet, const SamplerConfig& cfg = {});
double nabla_bar_torsion_norm(const MetricProvider& h, const Point& z, const SamplerConfig& cfg = {});

/// Max component modulus of N in the frame whose columns are E (E h-unitary).
double frame_component_max(const Tensor4& N, const CMat& E);

/// h-orthonormal frame: columns e_a with h(e_a, conj e_b) = delta_ab.
CMat orthonormal_frame(const CMat& h);

/// Radical-inverse Halton coordinate of index i in the given dimension (0-based).
double halton(std::uint64_t i, int dim);

}  // namespace crf::geom
