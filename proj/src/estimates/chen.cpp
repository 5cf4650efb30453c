#include "crf/estimates/chen.hpp"

#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "crf/core/types.hpp"

namespace crf::est {

namespace odeint = boost::numeric::odeint;

double chen_bound(double alpha, double beta, double T) {
  return (1.0 + std::sqrt(1.0 + 4.0 * alpha * beta * T * T)) / (2.0 * alpha);
}

double chen_exact(double alpha, double beta, double q0, double t) {
  if (beta == 0.0) return q0 / (1.0 + alpha * q0 * t);
  // q' = -alpha (q^2 - m^2): q = m coth(alpha m t + c) above m, m tanh(...) below, m at m
  const double m = std::sqrt(beta / alpha);
  if (q0 == m) return m;
  if (q0 > m) return m / std::tanh(alpha * m * t + std::atanh(m / q0));
  return m * std::tanh(alpha * m * t + std::atanh(q0 / m));
}

ChenResult chen_ode_oracle(double alpha, double beta, double T, double q0) {
  if (!(alpha > 0.0) || beta < 0.0 || !(T > 0.0) || !(q0 > 0.0))
    throw DomainError("chen oracle needs alpha > 0, beta >= 0, T > 0, q0 > 0");
  using State = std::array<double, 1>;
  auto rhs = [alpha, beta](const State& q, State& dq, double) { dq[0] = -alpha * q[0] * q[0] + beta; };
  auto stepper = odeint::make_dense_output(1e-13, 1e-12, odeint::runge_kutta_dopri5<State>());

  // Sample times: geometric from T * 1e-9 up to T, plus a uniform grid.
  std::vector<double> times;
  const int geo = 400, uni = 400;
  for (int k = 0; k <= geo; ++k) times.push_back(T * std::pow(1e-9, 1.0 - static_cast<double>(k) / geo));
  for (int k = 1; k <= uni; ++k) times.push_back(T * k / uni);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<double> tq;
  tq.reserve(times.size());
  State q{q0};
  std::vector<double> ts(1, 0.0);
  ts.insert(ts.end(), times.begin(), times.end());
  std::vector<double> qs;
  odeint::integrate_times(stepper, rhs, q, ts.begin(), ts.end(), 1e-6 * T,
                          [&](const State& s, double) { qs.push_back(s[0]); });
  std::size_t best = 1;
  for (std::size_t k = 1; k < ts.size(); ++k)
    if (ts[k] * qs[k] > ts[best] * qs[best]) best = k;

  // Golden-section refinement of t q(t) between the neighbouring samples.
  auto value = [&](double t) {
    State s{q0};
    odeint::integrate_adaptive(odeint::make_controlled(1e-13, 1e-12, odeint::runge_kutta_dopri5<State>()),
                               rhs, s, 0.0, t, 1e-6 * T);
    return t * s[0];
  };
  double lo = ts[best - 1 > 0 ? best - 1 : 1], hi = ts[std::min(best + 1, ts.size() - 1)];
  ChenResult r;
  r.sup_tq = ts[best] * qs[best];
  r.t_at_sup = ts[best];
  if (hi > lo) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi, c = b - g * (b - a), d = a + g * (b - a);
    double fc = value(c), fd = value(d);
    for (int it = 0; it < 60 && b - a > 1e-14 * T; ++it) {
      if (fc > fd) {
        b = d; d = c; fd = fc; c = b - g * (b - a); fc = value(c);
      } else {
        a = c; c = d; fc = fd; d = a + g * (b - a); fd = value(d);
      }
    }
    const double tm = 0.5 * (a + b), vm = value(tm);
    if (vm > r.sup_tq) {
      r.sup_tq = vm;
      r.t_at_sup = tm;
    }
  }
  r.bound = chen_bound(alpha, beta, T);
  r.slack = r.bound - r.sup_tq;
  return r;
}

ChenSweep default_chen_sweep() {
  ChenSweep s;
  for (int k = 0; k < 5; ++k) {
    s.alphas.push_back(0.1 * std::pow(100.0, k / 4.0));
    s.betas.push_back(10.0 * k / 4.0);
    s.Ts.push_back(0.1 * std::pow(20.0, k / 4.0));
  }
  s.q0s = {0.1, 1.0, 10.0, 100.0, 1000.0};
  return s;
}

EstimateReport chen_sweep_check(const ChenSweep& sw, double tolerance) {
  EstimateReport rep("chen_ode_oracle", tolerance);
  double worst_rel = 0.0;
  for (double a : sw.alphas)
    for (double b : sw.betas)
      for (double T : sw.Ts)
        for (double q0 : sw.q0s) {
          const ChenResult r = chen_ode_oracle(a, b, T, q0);
          rep.offer(r.slack, {a, b, T, q0}, r.t_at_sup);
          worst_rel = std::max(worst_rel, r.sup_tq / r.bound);
        }
  rep.details = {{"combinations", rep.samples}, {"max_ratio_sup_over_bound", worst_rel},
                 {"worst_point_order", "alpha, beta, T, q0"}};
  return rep.finish();
}

}  // namespace crf::est
