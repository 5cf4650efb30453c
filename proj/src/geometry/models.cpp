#include "crf/geometry/models.hpp"

#include <cmath>
#include <numbers>

namespace crf::geom {

namespace {

constexpr cd I{0.0, 1.0};

}  // namespace

MetricPtr radial_metric(ChartDomain chart, std::string label, RadialProfileFn profile) {
  return std::make_shared<AnalyticMetric>(
      std::move(chart), std::move(label), [profile](const Point& z, int order) {
        MetricJet j = MetricJet::zero(1, order);
        const double rho = std::norm(z(0));
        const RadialProfileValue p = profile(rho);
        j.g(0, 0) = p.value;
        if (order >= 1) j.d[0](0, 0) = p.d1 * std::conj(z(0));
        if (order >= 2) j.ddbar[0][0](0, 0) = p.d1 + rho * p.d2;
        return j;
      });
}

MetricPtr euclidean(int n) {
  return std::make_shared<AnalyticMetric>(ChartDomain::radial_plane(n, 1.0, 64), "euclidean",
                                          [n](const Point&, int order) {
                                            MetricJet j = MetricJet::zero(n, order);
                                            j.g = CMat::Identity(n, n);
                                            return j;
                                          });
}

MetricPtr poincare_disk() {
  return radial_metric(ChartDomain::radial_disk(1, 0.95, 256), "poincare-disk", [](double rho) {
    const double q = 1.0 / (1.0 - rho);
    return RadialProfileValue{q * q, 2.0 * q * q * q, 6.0 * q * q * q * q};
  });
}

MetricPtr poincare_ke() {
  return radial_metric(ChartDomain::radial_disk(1, 0.95, 256), "poincare-ke", [](double rho) {
    const double q = 1.0 / (1.0 - rho);
    return RadialProfileValue{2.0 * q * q, 4.0 * q * q * q, 12.0 * q * q * q * q};
  });
}

MetricPtr fubini_study_cap() {
  return radial_metric(ChartDomain::radial_disk(1, 0.95, 256), "fubini-study-cap", [](double rho) {
    const double q = 1.0 / (1.0 + rho);
    return RadialProfileValue{q * q, -2.0 * q * q * q, 6.0 * q * q * q * q};
  });
}

MetricPtr perturbed_poincare(double eps, double rho_b) {
  return radial_metric(
      ChartDomain::radial_disk(1, 0.95, 256),
      "perturbed-poincare", [eps, rho_b](double rho) {
        const double q = 1.0 / (1.0 - rho);
        const double p0 = q * q, p1 = 2.0 * q * q * q, p2 = 6.0 * q * q * q * q;
        double b0 = 0.0, b1 = 0.0, b2 = 0.0;
        if (rho < rho_b) {
          const double k = std::numbers::pi / (2.0 * rho_b);
          const double c = std::cos(k * rho), s = std::sin(k * rho);
          b0 = c * c * c * c;
          b1 = -4.0 * c * c * c * s * k;
          b2 = (12.0 * c * c * s * s - 4.0 * c * c * c * c) * k * k;
        }
        const double m0 = 1.0 + eps * b0, m1 = eps * b1, m2 = eps * b2;
        return RadialProfileValue{m0 * p0, m1 * p0 + m0 * p1, m2 * p0 + 2.0 * m1 * p1 + m0 * p2};
      });
}

MetricPtr bergman_ball(int n) {
  return std::make_shared<AnalyticMetric>(
      ChartDomain::radial_disk(n, 0.95, 64), "bergman-ball", [n](const Point& z, int order) {
        MetricJet j = MetricJet::zero(n, order);
        const double rho = z.squaredNorm();
        const double A = 1.0 / (1.0 - rho);
        const auto zb = [&](int i) { return std::conj(z(i)); };
        const auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) j.g(i, k) = delta(i, k) * A + zb(i) * z(k) * A * A;
        if (order >= 1)
          for (int a = 0; a < n; ++a)
            for (int i = 0; i < n; ++i)
              for (int k = 0; k < n; ++k)
                j.d[a](i, k) = delta(i, k) * zb(a) * A * A + delta(k, a) * zb(i) * A * A +
                               2.0 * zb(i) * z(k) * zb(a) * A * A * A;
        if (order >= 2)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                  j.ddbar[a][b](i, k) =
                      delta(i, k) * delta(a, b) * A * A + 2.0 * delta(i, k) * zb(a) * z(b) * A * A * A +
                      delta(k, a) * delta(i, b) * A * A + 2.0 * delta(k, a) * zb(i) * z(b) * A * A * A +
                      2.0 * delta(i, b) * z(k) * zb(a) * A * A * A +
                      2.0 * delta(a, b) * zb(i) * z(k) * A * A * A +
                      6.0 * zb(i) * z(k) * zb(a) * z(b) * A * A * A * A;
        return j;
      });
}

MetricPtr torsion_example_1() {
  return std::make_shared<AnalyticMetric>(ChartDomain::radial_plane(2, 1.0, 64), "torsion-example-1",
                                          [](const Point& z, int order) {
                                            MetricJet j = MetricJet::zero(2, order);
                                            j.g(0, 0) = 1.0;
                                            j.g(1, 1) = 1.0 + std::norm(z(0));
                                            if (order >= 1) j.d[0](1, 1) = std::conj(z(0));
                                            if (order >= 2) j.ddbar[0][0](1, 1) = 1.0;
                                            return j;
                                          });
}

MetricPtr flat_torus(int n) {
  return std::make_shared<AnalyticMetric>(ChartDomain::periodic_box(n, 2.0 * std::numbers::pi, 32),
                                          "flat-torus", [n](const Point&, int order) {
                                            MetricJet j = MetricJet::zero(n, order);
                                            j.g = CMat::Identity(n, n);
                                            return j;
                                          });
}

MetricPtr bumpy_torus(double amplitude) {
  return std::make_shared<AnalyticMetric>(
      ChartDomain::periodic_box(1, 2.0 * std::numbers::pi, 32), "bumpy-torus",
      [a = amplitude](const Point& z, int order) {
        MetricJet j = MetricJet::zero(1, order);
        const double x = z(0).real(), y = z(0).imag();
        j.g(0, 0) = 1.0 + a * std::sin(x) * std::sin(y);
        if (order >= 1) {
          const double fx = a * std::cos(x) * std::sin(y), fy = a * std::sin(x) * std::cos(y);
          j.d[0](0, 0) = 0.5 * cd(fx, -fy);
        }
        if (order >= 2) j.ddbar[0][0](0, 0) = -0.5 * a * std::sin(x) * std::sin(y);
        return j;
      });
}

namespace {

MetricJet hermitian_coeff_jet(double a, double b, const Point& z, int order) {
  MetricJet j = MetricJet::zero(2, order);
  const double x1 = z(0).real(), y2 = z(1).imag();
  const cd e = std::exp(I * x1);
  j.g(0, 0) = 1.0 + a * std::cos(y2);
  j.g(1, 1) = 1.0 + a * std::sin(x1);
  j.g(0, 1) = b * e;
  j.g(1, 0) = b * std::conj(e);
  if (order >= 1) {
    // d_{z1} = (d_x1 - i d_y1)/2 ; d_{z2} = (d_x2 - i d_y2)/2
    j.d[0](1, 1) = 0.5 * a * std::cos(x1);
    j.d[0](0, 1) = 0.5 * I * b * e;
    j.d[0](1, 0) = -0.5 * I * b * std::conj(e);
    j.d[1](0, 0) = 0.5 * I * a * std::sin(y2);
  }
  if (order >= 2) {
    j.ddbar[0][0](1, 1) = -0.25 * a * std::sin(x1);
    j.ddbar[0][0](0, 1) = -0.25 * b * e;
    j.ddbar[0][0](1, 0) = -0.25 * b * std::conj(e);
    j.ddbar[1][1](0, 0) = -0.25 * a * std::cos(y2);
  }
  return j;
}

}  // namespace

MetricPtr hermitian_torus(double a, double b) {
  return std::make_shared<AnalyticMetric>(
      ChartDomain::periodic_box(2, 2.0 * std::numbers::pi, 12), "hermitian-torus",
      [a, b](const Point& z, int order) { return hermitian_coeff_jet(a, b, z, order); });
}

MetricPtr hermitian_plane(double a, double b) {
  return std::make_shared<AnalyticMetric>(
      ChartDomain::radial_plane(2, 4.0, 32), "hermitian-plane",
      [a, b](const Point& z, int order) { return hermitian_coeff_jet(a, b, z, order); });
}

HolomorphicMap mobius(cd a) {
  HolomorphicMap m;
  const cd ab = std::conj(a);
  const double k = 1.0 - std::norm(a);
  m.value = [a, ab](cd z) { return (z - a) / (1.0 - ab * z); };
  m.d1 = [ab, k](cd z) {
    const cd w = 1.0 - ab * z;
    return k / (w * w);
  };
  m.d2 = [ab, k](cd z) {
    const cd w = 1.0 - ab * z;
    return 2.0 * k * ab / (w * w * w);
  };
  return m;
}

MetricPtr pullback_n1(MetricPtr base, HolomorphicMap map, std::string label) {
  if (base->dim() != 1) throw ConfigError("pullback_n1 needs a one-dimensional base metric");
  ChartDomain chart = base->chart();
  return std::make_shared<AnalyticMetric>(
      chart, std::move(label),
      [base, map](const Point& z, int order) {
        const cd zz = z(0);
        Point w(1);
        w(0) = map.value(zz);
        const cd f1 = map.d1(zz);
        const MetricJet bj = base->jet(w, order);
        const double L = bj.g(0, 0).real();
        MetricJet j = MetricJet::zero(1, order);
        j.g(0, 0) = L * std::norm(f1);
        if (order >= 1) {
          const cd f2 = map.d2(zz);
          const cd Lw = bj.d[0](0, 0);
          j.d[0](0, 0) = Lw * f1 * f1 * std::conj(f1) + L * f2 * std::conj(f1);
          if (order >= 2) {
            const cd Lwwb = bj.ddbar[0][0](0, 0);
            const cd Lwb = std::conj(Lw);
            j.ddbar[0][0](0, 0) = Lwwb * std::norm(f1) * std::norm(f1) + Lw * f1 * f1 * std::conj(f2) +
                                  Lwb * std::conj(f1) * f2 * std::conj(f1) + L * std::norm(f2);
          }
        }
        return j;
      },
      base->max_order());
}

}  // namespace crf::geom
