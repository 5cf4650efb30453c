#include "crf/geometry/metric.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace crf::geom {

MetricJet MetricJet::zero(int n, int order) {
  MetricJet j;
  j.n = n;
  j.order = order;
  j.g = CMat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    j.d[a] = CMat::Zero(n, n);
    for (int b = 0; b < n; ++b) j.ddbar[a][b] = CMat::Zero(n, n);
  }
  return j;
}

double min_eigenvalue(const CMat& g) {
  if (g.rows() == 1) return g(0, 0).real();
  Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const CMat& g) {
  if (g.rows() == 1) return g(0, 0).real();
  Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(g.rows() - 1);
}

double hermitian_defect(const CMat& g) { return (g - g.adjoint()).cwiseAbs().maxCoeff(); }

void require_positive_definite(const CMat& g, const std::string& where) {
  const double lam = min_eigenvalue(g);
  if (!(lam >= kDegenerateEigenvalue)) {
    std::ostringstream os;
    os << "degenerate metric at " << where << ": smallest eigenvalue " << lam;
    throw DegenerateMetricError(os.str());
  }
}

namespace {

std::string describe(const Point& z) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < z.size(); ++a) os << (a ? ", " : "") << z(a);
  os << ")";
  return os.str();
}

}  // namespace

MetricProvider::MetricProvider(ChartDomain chart, std::string label, int max_order)
    : chart_(std::move(chart)), label_(std::move(label)), max_order_(max_order) {
  chart_.validate();
}

void MetricProvider::check_domain(const Point& z) const {
  if (!chart_.contains(z))
    throw DomainError("point " + describe(z) + " outside chart of metric '" + label_ + "'");
}

CMat MetricProvider::eval(const Point& z) const {
  check_domain(z);
  CMat g = raw_value(chart_.wrap(z));
  require_positive_definite(g, label_ + " at " + describe(z));
  return g;
}

MetricJet MetricProvider::jet(const Point& z, int order) const {
  if (order > max_order_)
    throw DerivativeOrderError("metric '" + label_ + "' supplies derivatives up to order " +
                               std::to_string(max_order_) + ", " + std::to_string(order) +
                               " requested");
  check_domain(z);
  MetricJet j = compute_jet(chart_.wrap(z), order);
  require_positive_definite(j.g, label_ + " at " + describe(z));
  return j;
}

AnalyticMetric::AnalyticMetric(ChartDomain chart, std::string label, JetFn jet, int max_order)
    : MetricProvider(std::move(chart), std::move(label), max_order), jet_(std::move(jet)) {}

MetricJet AnalyticMetric::compute_jet(const Point& z, int order) const {
  MetricJet j = jet_(z, order);
  j.order = order;
  return j;
}

Point axis_shift(const Point& z, int axis, double h) {
  Point w = z;
  const int a = axis / 2;
  w(a) += (axis % 2 == 0) ? cd(h, 0.0) : cd(0.0, h);
  return w;
}

FiniteDifferenceMetric::FiniteDifferenceMetric(ChartDomain chart, std::string label, ValueFn value,
                                               int fd_order, double step, int max_order)
    : MetricProvider(std::move(chart), std::move(label), max_order),
      value_(std::move(value)),
      fd_order_(fd_order),
      step_(step) {
  if (fd_order_ != 2 && fd_order_ != 4) throw ConfigError("finite-difference order must be 2 or 4");
  if (!(step_ > 0.0)) throw ConfigError("finite-difference step must be positive");
}

MetricJet FiniteDifferenceMetric::compute_jet(const Point& z, int order) const {
  const int n = static_cast<int>(z.size());
  MetricJet j = MetricJet::zero(n, order);
  j.g = value_(z);
  if (order == 0) return j;

  const double h = step_;
  // first-derivative stencil (offsets, weights / h)
  std::vector<std::pair<int, double>> w1;
  if (fd_order_ == 2)
    w1 = {{-1, -0.5}, {1, 0.5}};
  else
    w1 = {{-2, 1.0 / 12.0}, {-1, -8.0 / 12.0}, {1, 8.0 / 12.0}, {2, -1.0 / 12.0}};

  const int m = 2 * n;
  std::array<CMat, 2 * kMaxDim> real_d;
  for (int u = 0; u < m; ++u) {
    CMat acc = CMat::Zero(n, n);
    for (auto [o, w] : w1) acc += w * value_(axis_shift(z, u, o * h));
    real_d[u] = acc / h;
  }
  for (int a = 0; a < n; ++a) j.d[a] = 0.5 * (real_d[2 * a] - cd(0, 1) * real_d[2 * a + 1]);
  if (order == 1) return j;

  std::vector<std::pair<int, double>> w2;
  if (fd_order_ == 2)
    w2 = {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
  else
    w2 = {{-2, -1.0 / 12.0}, {-1, 16.0 / 12.0}, {0, -30.0 / 12.0}, {1, 16.0 / 12.0}, {2, -1.0 / 12.0}};

  std::array<std::array<CMat, 2 * kMaxDim>, 2 * kMaxDim> hess;
  for (int u = 0; u < m; ++u) {
    CMat acc = CMat::Zero(n, n);
    for (auto [o, w] : w2) acc += w * value_(axis_shift(z, u, o * h));
    hess[u][u] = acc / (h * h);
    for (int v = u + 1; v < m; ++v) {
      CMat mix = CMat::Zero(n, n);
      for (auto [ou, wu] : w1)
        for (auto [ov, wv] : w1) mix += (wu * wv) * value_(axis_shift(axis_shift(z, u, ou * h), v, ov * h));
      hess[u][v] = mix / (h * h);
      hess[v][u] = hess[u][v];
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      j.ddbar[a][b] = 0.25 * (hess[2 * a][2 * b] + hess[2 * a + 1][2 * b + 1] +
                              cd(0, 1) * (hess[2 * a][2 * b + 1] - hess[2 * a + 1][2 * b]));
  return j;
}

ScaledMetric::ScaledMetric(MetricPtr base, double factor)
    : MetricProvider(base->chart(), std::to_string(factor) + "*" + base->label(), base->max_order()),
      base_(std::move(base)),
      factor_(factor) {
  if (!(factor_ > 0.0)) throw ConfigError("metric scale factor must be positive");
}

MetricJet ScaledMetric::compute_jet(const Point& z, int order) const {
  MetricJet j = base_->jet(z, order);
  j.g *= factor_;
  for (int a = 0; a < j.n; ++a) {
    j.d[a] *= factor_;
    for (int b = 0; b < j.n; ++b) j.ddbar[a][b] *= factor_;
  }
  return j;
}

MetricPtr constant_metric(const CMat& g, std::string label) {
  const int n = static_cast<int>(g.rows());
  return std::make_shared<AnalyticMetric>(
      ChartDomain::radial_plane(n, 1.0, 8), std::move(label),
      [g, n](const Point&, int order) {
        MetricJet j = MetricJet::zero(n, order);
        j.g = g;
        return j;
      });
}

MetricPtr finite_difference_of(MetricPtr base, int fd_order, double step) {
  auto value = [base](const Point& z) { return base->unchecked_value(z); };
  return std::make_shared<FiniteDifferenceMetric>(base->chart(), base->label() + "[fd" +
                                                                     std::to_string(fd_order) + "]",
                                                  value, fd_order, step);
}

}  // namespace crf::geom
