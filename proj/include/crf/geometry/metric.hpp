#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "crf/core/types.hpp"
#include "crf/geometry/chart.hpp"

namespace crf::geom {

/// Value and derivatives of a Hermitian metric at a point.
///   g(i, j)            = g_{i jbar}
///   d[a](i, j)         = d_a g_{i jbar}
///   ddbar[a][b](i, j)  = d_a d_bbar g_{i jbar}
/// d_bbar g follows from Hermitian symmetry: (d_bbar g)(i, j) = conj(d_b g_{j ibar}).
struct MetricJet {
  int n = 0;
  int order = 0;
  CMat g;
  std::array<CMat, kMaxDim> d{};
  std::array<std::array<CMat, kMaxDim>, kMaxDim> ddbar{};

  static MetricJet zero(int n, int order);
  CMat dbar(int b) const { return d[b].adjoint(); }
};

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMat& g);
double max_eigenvalue(const CMat& g);
/// max |g - g^H|.
double hermitian_defect(const CMat& g);
/// Throws DegenerateMetricError when the smallest eigenvalue is below 1e-12.
void require_positive_definite(const CMat& g, const std::string& where);

inline constexpr double kDegenerateEigenvalue = 1e-12;

/// A Hermitian metric field on a chart with derivative access.
class MetricProvider {
 public:
  MetricProvider(ChartDomain chart, std::string label, int max_order);
  virtual ~MetricProvider() = default;

  int dim() const { return chart_.complex_dimension; }
  const ChartDomain& chart() const { return chart_; }
  const std::string& label() const { return label_; }
  /// Highest derivative order the backend supplies (0, 1 or 2).
  int max_order() const { return max_order_; }

  /// Metric value; validates domain and positivity.
  CMat eval(const Point& z) const;
  /// Value plus derivatives up to `order`. Throws DerivativeOrderError when the
  /// backend is too shallow, DomainError outside the chart.
  MetricJet jet(const Point& z, int order) const;
  /// Metric value with no domain or positivity check (stencil evaluation).
  CMat unchecked_value(const Point& z) const { return raw_value(z); }

 protected:
  virtual MetricJet compute_jet(const Point& z, int order) const = 0;
  /// Raw metric value without checks; finite-difference stencils use this.
  virtual CMat raw_value(const Point& z) const { return compute_jet(z, 0).g; }

 private:
  void check_domain(const Point& z) const;

  ChartDomain chart_;
  std::string label_;
  int max_order_;
};

using MetricPtr = std::shared_ptr<const MetricProvider>;

using JetFn = std::function<MetricJet(const Point&, int)>;
using ValueFn = std::function<CMat(const Point&)>;

/// Caller supplies closed-form derivatives.
class AnalyticMetric final : public MetricProvider {
 public:
  AnalyticMetric(ChartDomain chart, std::string label, JetFn jet, int max_order = 2);

 protected:
  MetricJet compute_jet(const Point& z, int order) const override;

 private:
  JetFn jet_;
};

/// Central finite differences of a value closure, order 2 or 4 in the step.
class FiniteDifferenceMetric final : public MetricProvider {
 public:
  FiniteDifferenceMetric(ChartDomain chart, std::string label, ValueFn value, int fd_order,
                         double step, int max_order = 2);

  int fd_order() const { return fd_order_; }
  double step() const { return step_; }

 protected:
  MetricJet compute_jet(const Point& z, int order) const override;
  CMat raw_value(const Point& z) const override { return value_(z); }

 private:
  ValueFn value_;
  int fd_order_;
  double step_;
};

/// Constant multiple c * g of another provider.
class ScaledMetric final : public MetricProvider {
 public:
  ScaledMetric(MetricPtr base, double factor);

 protected:
  MetricJet compute_jet(const Point& z, int order) const override;

 private:
  MetricPtr base_;
  double factor_;
};

/// A constant metric matrix on C^n (all derivatives vanish).
MetricPtr constant_metric(const CMat& g, std::string label = "constant");

/// Re-derive an existing provider's jet through central differences of its values.
MetricPtr finite_difference_of(MetricPtr base, int fd_order, double step);

/// Real-axis unit displacement: axis 2a moves Re z_a, axis 2a+1 moves Im z_a.
Point axis_shift(const Point& z, int axis, double h);

}  // namespace crf::geom
