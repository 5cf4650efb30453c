#include "crf/exhaustion/cutoff.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace crf::exh {

void CutoffSpec::validate() const {
  if (!(tau > 0.0 && tau < 0.125)) throw ConfigError("cutoff tau must lie in (0, 1/8)");
  if (quad_resolution < 1) throw ConfigError("cutoff quad_resolution must be positive");
  if (!(quad_tolerance > 0.0)) throw ConfigError("cutoff quad_tolerance must be positive");
}

namespace {

void check_s(double s) {
  if (!(s >= 0.0)) throw DomainError("cutoff argument must be >= 0");
  if (s >= 1.0) throw DomainError("cutoff argument must be < 1");
}

}  // namespace

double f_eval(double s, double tau) {
  check_s(s);
  if (s <= 1.0 - tau) return 0.0;
  const double x = (s - 1.0 + tau) / tau;
  return -std::log1p(-x * x);
}

double f_d1(double s, double tau) {
  check_s(s);
  if (s <= 1.0 - tau) return 0.0;
  const double x = (s - 1.0 + tau) / tau;
  return 2.0 * x / (tau * (1.0 - x * x));
}

double f_d2(double s, double tau) {
  check_s(s);
  if (s <= 1.0 - tau) return 0.0;
  const double x = (s - 1.0 + tau) / tau;
  const double q = 1.0 - x * x;
  return 2.0 * (1.0 + x * x) / (tau * tau * q * q);
}

double sigma(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp(1.0 / x - 1.0 / (1.0 - x)));
}

double sigma_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double s = sigma(x);
  return s * (1.0 - s) * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)));
}

double sigma_d2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double s = sigma(x);
  const double y = 1.0 - x;
  const double w1 = -1.0 / (x * x) - 1.0 / (y * y);     // w = 1/x - 1/(1-x)
  const double w2 = 2.0 / (x * x * x) - 2.0 / (y * y * y);
  const double s1 = -s * (1.0 - s) * w1;
  return -(s1 * (1.0 - 2.0 * s) * w1 + s * (1.0 - s) * w2);
}

double phi(double s, const CutoffSpec& spec) {
  return sigma((s - spec.support_start()) / (spec.tau * spec.tau));
}
double phi_d1(double s, const CutoffSpec& spec) {
  const double t2 = spec.tau * spec.tau;
  return sigma_d1((s - spec.support_start()) / t2) / t2;
}
double phi_d2(double s, const CutoffSpec& spec) {
  const double t2 = spec.tau * spec.tau;
  return sigma_d2((s - spec.support_start()) / t2) / (t2 * t2);
}

namespace {

constexpr double kAbsTolerance = 1e-14;

// Bisection over single Gauss-Kronrod panels; a panel is accepted once its error estimate is
// below max(abs, rel * |panel|) scaled to its share of the interval.
template <class Fn>
void adapt(const Fn& f, double lo, double hi, double width, double rel, int depth, QuadResult& r) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &err);
  const double allowed = std::max(kAbsTolerance * (hi - lo) / width, rel * std::abs(v));
  if (err <= allowed || depth == 0) {
    r.value += v;
    r.error += err;
    if (err > allowed) r.converged = false;
    return;
  }
  const double mid = 0.5 * (lo + hi);
  adapt(f, lo, mid, width, rel, depth - 1, r);
  adapt(f, mid, hi, width, rel, depth - 1, r);
}

// Transition part in its own variable: s = a + tau^2 x, so phi = sigma(x) and
// (s - 1 + tau) / tau = tau (1 + x) carry no cancellation.
QuadResult integrate_transition(double x_hi, const CutoffSpec& spec) {
  QuadResult r;
  if (x_hi <= 0.0) return r;
  const double tau = spec.tau;
  const auto integrand = [tau](double x) {
    const double y = tau * (1.0 + x);
    return sigma(x) * 2.0 * y / (tau * (1.0 - y * y)) * tau * tau;
  };
  adapt(integrand, 0.0, x_hi, x_hi, spec.quad_tolerance, spec.quad_resolution, r);
  return r;
}

// Plateau part: int f' over [lo, hi] with phi = 1.
QuadResult integrate_plateau(double lo, double hi, const CutoffSpec& spec) {
  QuadResult r;
  if (hi <= lo) return r;
  const auto integrand = [&spec](double u) { return f_d1(u, spec.tau); };
  adapt(integrand, lo, hi, hi - lo, spec.quad_tolerance, spec.quad_resolution, r);
  return r;
}

double transition_coordinate(double s, const CutoffSpec& spec) {
  return std::min(1.0, (s - spec.support_start()) / (spec.tau * spec.tau));
}

}  // namespace

QuadResult frak_F(double s, const CutoffSpec& spec) {
  check_s(s);
  if (s <= spec.support_start()) return {};
  QuadResult r = integrate_transition(transition_coordinate(s, spec), spec);
  const double b = spec.plateau_start();
  if (s > b) r.value += f_eval(s, spec.tau) - f_eval(b, spec.tau);
  return r;
}

QuadResult frak_F_quadrature(double s, const CutoffSpec& spec) {
  check_s(s);
  if (s <= spec.support_start()) return {};
  QuadResult r = integrate_transition(transition_coordinate(s, spec), spec);
  const QuadResult p = integrate_plateau(spec.plateau_start(), s, spec);
  r.value += p.value;
  r.error += p.error;
  r.converged = r.converged && p.converged;
  return r;
}

double frak_F_derivative(double s, const CutoffSpec& spec, int k) {
  check_s(s);
  const double tau = spec.tau;
  const auto second = [&](double u) {
    return phi_d1(u, spec) * f_d1(u, tau) + phi(u, spec) * f_d2(u, tau);
  };
  switch (k) {
    case 0:
      return frak_F(s, spec).value;
    case 1:
      return phi(s, spec) * f_d1(s, tau);
    case 2:
      return second(s);
    case 3:
    case 4: {
      if (s <= spec.support_start()) return 0.0;
      const double h = std::min({1e-3 * (1.0 - s), 1e-3 * tau * tau, 1e-4});
      const double up = std::min(s + h, std::nextafter(1.0, 0.0));
      if (k == 3) return (second(up) - second(s - h)) / (up - s + h);
      return (second(up) - 2.0 * second(s) + second(s - h)) / (h * h);
    }
    default:
      throw PreconditionError("frakF derivative order must be 0..4");
  }
}

CutoffPropertiesResult frakF_properties_check(const CutoffSpec& spec, int K, int n_points) {
  spec.validate();
  if (K < 0 || K > 4) throw PreconditionError("derivative order K must be in 0..4");
  const double tau = spec.tau, a = spec.support_start();
  CutoffPropertiesResult out;
  out.report = EstimateReport("cutoff_properties", 0.0);
  out.sup_scaled_derivative.assign(static_cast<std::size_t>(K + 1), 0.0);

  // s samples: a uniform tenth on [0, a], the rest clustered geometrically toward s = 1.
  const int n_flat = std::max(2, n_points / 10);
  const int n_tail = std::max(2, n_points - n_flat);
  std::vector<double> s_grid;
  s_grid.reserve(static_cast<std::size_t>(n_points));
  for (int j = 0; j < n_flat; ++j) s_grid.push_back(a * j / (n_flat - 1));
  const double gap0 = 1.0 - a, gap1 = 1e-6 * tau;
  for (int j = 1; j <= n_tail; ++j)
    s_grid.push_back(1.0 - gap0 * std::pow(gap1 / gap0, static_cast<double>(j) / n_tail));

  bool finite = true;
  for (double s : s_grid) {
    const double F = frak_F(s, spec).value;
    if (s <= a && F != 0.0) out.zero_region_exact = false;
    if (F < 0.0 || frak_F_derivative(s, spec, 1) < 0.0) finite = false;
    for (int k = 0; k <= K; ++k) {
      const double v = std::exp(-k * F) * std::abs(frak_F_derivative(s, spec, k));
      if (!std::isfinite(v)) finite = false;
      out.sup_scaled_derivative[static_cast<std::size_t>(k)] =
          std::max(out.sup_scaled_derivative[static_cast<std::size_t>(k)], v);
    }
    out.max_phi_slope = std::max(out.max_phi_slope, phi_d1(s, spec) * tau * tau / 2.0);
  }
  // slope check on a uniform grid across the transition
  for (int j = 0; j <= 2000; ++j) {
    const double s = a + tau * tau * j / 2000.0;
    out.max_phi_slope = std::max(out.max_phi_slope, phi_d1(s, spec) * tau * tau / 2.0);
  }

  // property (iii)
  double c2 = 0.0, c3 = std::numeric_limits<double>::infinity();
  const int n3 = std::max(2, n_points / 2);
  for (int j = 1; j <= n3; ++j) {
    const double gap = 2.0 * tau * std::pow(1e-6, static_cast<double>(j) / n3);
    const double s = 1.0 - gap;
    const double r = tau * (1.0 - s) / 2.0;
    const double lo = frak_F(s - r, spec).value, hi = frak_F(s + r, spec).value;
    const double ratio = std::exp(hi - lo);
    if (ratio < 1.0) finite = false;
    c2 = std::max(c2, (ratio - 1.0) / tau);
    c3 = std::min(c3, r * std::exp(lo) / (tau * tau));
  }
  out.c2 = c2;
  out.c3 = c3;

  out.report.offer(out.zero_region_exact ? 0.0 : -1.0);
  out.report.offer(finite ? 0.0 : -1.0);
  out.report.offer(1.0 - out.max_phi_slope);
  out.report.samples = static_cast<long>(s_grid.size());
  out.report.details = {{"tau", tau},
                        {"K", K},
                        {"sup_scaled_derivative", out.sup_scaled_derivative},
                        {"c2", c2},
                        {"c3", c3},
                        {"max_phi_slope_ratio", out.max_phi_slope},
                        {"zero_region_exact", out.zero_region_exact}};
  out.report.finish();
  return out;
}

std::vector<std::array<double, 5>> cutoff_profile(const CutoffSpec& spec, int n_points) {
  std::vector<std::array<double, 5>> rows;
  const double s_max = 1.0 - 1e-4 * spec.tau;
  for (int j = 0; j < n_points; ++j) {
    const double s = s_max * j / (n_points - 1);
    rows.push_back({s, f_eval(s, spec.tau), phi(s, spec), frak_F(s, spec).value,
                    frak_F_derivative(s, spec, 1)});
  }
  return rows;
}

}  // namespace crf::exh
