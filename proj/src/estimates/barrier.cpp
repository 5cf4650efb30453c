#include "crf/estimates/barrier.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace crf::est {

using flow::MatrixField;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> real_coords(const Point& z) {
  std::vector<double> v;
  for (int a = 0; a < z.size(); ++a) {
    v.push_back(z(a).real());
    v.push_back(z(a).imag());
  }
  return v;
}
}  // namespace

double BarrierConfig::rate() const {
  return s_override >= 0.0 ? s_override : kappa0 + c2 * beta * (1.0 + beta);
}

double BarrierConfig::blowup_time() const {
  const double s = rate();
  if (s <= 0.0) return kInf;
  return 1.0 / (3.0 * c1 * std::pow(n * alpha + 1.0, 3) * s);
}

double BarrierConfig::existence_time() const {
  const double s = rate();
  if (!(s > 0.0)) throw PreconditionError("existence time needs a positive curvature-torsion bound");
  return 1.0 / (2.0 * c1 * std::pow(n * alpha + 1.0, 3) * s);
}

double BarrierConfig::v(double t) const {
  const double base = std::pow(n * alpha + 1.0, -3.0) - 3.0 * c1 * rate() * t;
  if (!(base > 0.0)) return kInf;
  return std::cbrt(1.0 / base);
}

void BarrierConfig::validate() const {
  if (n < 1) throw ConfigError("barrier: n must be >= 1");
  if (!(alpha >= 1.0)) throw ConfigError("barrier: alpha must be >= 1");
  if (!(beta >= 0.0)) throw ConfigError("barrier: beta must be >= 0");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("barrier: c1 and c2 must be positive");
  if (!(rate() >= 0.0))
    throw ConfigError("barrier: the curvature-torsion bound s must be >= 0 (kappa0 too negative)");
}

nlohmann::json BarrierConfig::to_json() const {
  const double tb = blowup_time();
  return {{"n", n},          {"alpha", alpha}, {"beta", beta},
          {"k", k},          {"kappa0", kappa0}, {"c1", c1},
          {"c2", c2},        {"rate", rate()}, {"T", T},
          {"blowup_time", std::isfinite(tb) ? nlohmann::json(tb) : nlohmann::json("inf")},
          {"existence_time", rate() > 0.0 ? nlohmann::json(existence_time()) : nlohmann::json("inf")}};
}

double measure_alpha(int n, const MatrixField& g0, const MatrixField& h) {
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  double a = 1.0;
  for (std::size_t i = 0; i < g0.size() / nn; ++i) {
    const CMat G = flow::matrix_at(g0, n, i), H = flow::matrix_at(h, n, i);
    Eigen::GeneralizedSelfAdjointEigenSolver<CMat> es(G, H, Eigen::EigenvaluesOnly);
    const auto& mu = es.eigenvalues();
    a = std::max({a, mu.maxCoeff(), 1.0 / mu.minCoeff()});
  }
  return a;
}

EstimateReport trace_barrier_check(const flow::FlowRun& run, const MatrixField& h,
                                   const BarrierConfig& cfg, double tolerance) {
  cfg.validate();
  if (run.normalized) throw PreconditionError("trace barrier applies to unnormalized runs");
  EstimateReport rep("trace_barrier", tolerance);
  const auto& grid = *run.grid;
  const int n = run.n;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const double base0 = std::pow(n * cfg.alpha + 1.0, -3.0);
  const double s = cfg.rate();
  double c1_min = 0.0, sup_lambda0 = 0.0;
  bool c1_bounded = true;
  long out_of_domain = 0;
  nlohmann::json series = nlohmann::json::array();
  for (const auto& f : run.frames) {
    double lam = -kInf;
    std::size_t at = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid.boundary(i)) continue;
      const double l = flow::trace_inv_product(n, &f.metric[i * nn], &h[i * nn]);
      if (l > lam) {
        lam = l;
        at = i;
      }
    }
    if (f.time == 0.0) sup_lambda0 = lam;
    const double v = cfg.v(f.time);
    series.push_back({f.time, lam, std::isfinite(v) ? nlohmann::json(v - 1.0) : nlohmann::json("inf")});
    // c1 needed at this frame: (n alpha + 1)^{-3} - 3 c1 s t <= (Lambda + 1)^{-3}
    const double need = base0 - std::pow(lam + 1.0, -3.0);
    if (need > 0.0) {
      if (s > 0.0 && f.time > 0.0)
        c1_min = std::max(c1_min, need / (3.0 * s * f.time));
      else
        c1_bounded = false;
    }
    if (!std::isfinite(v)) {
      ++out_of_domain;
      continue;
    }
    rep.offer(v - 1.0 - lam, real_coords(grid.point(at)), f.time);
  }
  rep.details = {{"config", cfg.to_json()},
                 {"c1_min", c1_bounded ? nlohmann::json(c1_min) : nlohmann::json("unbounded")},
                 {"sup_lambda_t0", sup_lambda0},
                 {"frames_out_of_domain", out_of_domain},
                 {"series_t_lambda_vminus1", series}};
  if (rep.samples == 0) rep.applicable = false;
  return rep.finish();
}

}  // namespace crf::est
