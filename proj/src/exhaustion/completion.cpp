#include "crf/exhaustion/completion.hpp"

#include <algorithm>
#include <cmath>

namespace crf::exh {

using namespace crf::geom;

void CompletionSpec::validate() const {
  cutoff.validate();
  if (!(rho_i > 1.0)) throw ConfigError("completion rho_i must exceed 1");
  if (radial_samples < 2 || directions < 1) throw ConfigError("completion sample counts too small");
}

ScalarFieldFn completion_field(int n, const CompletionSpec& spec) {
  const CutoffSpec c = spec.cutoff;
  return radial_exhaustion_field(n, spec.rho_i, [c](double u) {
    return ProfileValue{frak_F(u, c).value, frak_F_derivative(u, c, 1), frak_F_derivative(u, c, 2)};
  });
}

namespace {

// Levels of s = rho / rho_i: a quarter on the interior, half across the cutoff transition
// (where F'' peaks), a quarter clustered geometrically toward s = 1.
std::vector<double> radial_levels(const CompletionSpec& spec) {
  const int N = spec.radial_samples;
  const int n_in = std::max(2, N / 4), n_tr = std::max(2, N / 2), n_out = std::max(2, N - n_in - n_tr);
  const double s_lo = 1.0 / spec.rho_i;  // rho = 1 at z = 0
  const double a = spec.cutoff.support_start(), b = spec.cutoff.plateau_start();
  const double s_hi = 1.0 - 1e-3 * spec.cutoff.tau;
  std::vector<double> lv;
  for (int j = 0; j < n_in; ++j) lv.push_back(s_lo + (a - s_lo) * j / n_in);
  for (int j = 0; j < n_tr; ++j) lv.push_back(a + (b - a) * j / (n_tr - 1));
  for (int j = 1; j <= n_out; ++j)
    lv.push_back(1.0 - (1.0 - b) * std::pow((1.0 - s_hi) / (1.0 - b), static_cast<double>(j) / n_out));
  return lv;
}

std::vector<Point> sample_points(int n, const CompletionSpec& spec) {
  std::vector<Point> pts;
  for (int d = 0; d < spec.directions; ++d) {
    CVec u(n);
    for (int a = 0; a < n; ++a)
      u(a) = cd(halton(static_cast<std::uint64_t>(d), 2 * a) - 0.5,
                halton(static_cast<std::uint64_t>(d), 2 * a + 1) - 0.5);
    if (u.norm() < 1e-12) u(0) = 1.0;
    u.normalize();
    for (double sv : radial_levels(spec)) {
      const double r = std::sqrt(std::max(0.0, sv * spec.rho_i - 1.0));
      pts.push_back(r * u);
    }
  }
  return pts;
}

double max_diff(const Tensor3& a, const Tensor3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.flat(i) - b.flat(i)));
  return m;
}
double max_diff(const Tensor4& a, const Tensor4& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.flat(i) - b.flat(i)));
  return m;
}

}  // namespace

CompletionResult conformal_completion(MetricPtr g0, MetricPtr h, const CompletionSpec& spec) {
  spec.validate();
  if (g0->dim() != h->dim()) throw PreconditionError("completion: g0 and h differ in dimension");
  const int n = g0->dim();
  const ScalarFieldFn F = completion_field(n, spec);
  CompletionResult out;
  out.g0i = conformal_metric(g0, F, "completion:" + g0->label());
  out.hi = conformal_metric(h, F, "completion:" + h->label());
  out.report = EstimateReport("conformal_completion", 1e-9);

  const std::vector<Point> pts = sample_points(n, spec);

  // beta and kappa0 from the unchanged pair
  for (const Point& z : pts) {
    const MetricJet gj = g0->jet(z, 2), hj = h->jet(z, 2);
    const CurvaturePackage gp = connection_from_jet(gj);
    const CurvaturePackage hp = connection_from_jet(hj);
    const double T0 = torsion_norm(gp.torsion_lower, hj.g);
    const double Th = torsion_norm(hp.torsion_lower, hj.g);
    const double dT0 = frame_sweep_max(nabla_bar_torsion(gj, gp.torsion_lower, hp.connection), hj.g, spec.sampler);
    out.beta = std::max(out.beta, T0 * T0 + Th * T0 + dT0);
    const HscReport hr = hsc_max(*h, z, spec.sampler);
    out.kappa0 = std::max(out.kappa0, hr.combined);
  }
  if (!(out.beta > 0.0))
    throw PreconditionError("completion: beta vanishes for this pair; the bounds carry no constant");
  const double b1 = out.beta, b2 = out.beta * (1.0 + out.beta);

  for (const Point& z : pts) {
    const ScalarJet fj = F(z);
    const MetricJet gij = out.g0i->jet(z, 2), hij = out.hi->jet(z, 2);
    CurvaturePackage gip = curvature_from_jet(gij);
    CurvaturePackage hip = curvature_from_jet(hij);
    gip.point = hip.point = z;

    // two code paths
    const CurvaturePackage gbase = curvature_from_jet(g0->jet(z, 2));
    const CurvaturePackage hbase = curvature_from_jet(h->jet(z, 2));
    const Tensor3 Tlaw = conformal_torsion_law(gbase, fj);
    const Tensor4 Rlaw = conformal_curvature_law(hbase, fj);
    const double e2 = std::exp(2.0 * fj.value);
    out.law_torsion_error = std::max(out.law_torsion_error, max_diff(Tlaw, gip.torsion_lower) / e2);
    out.law_curvature_error = std::max(out.law_curvature_error, max_diff(Rlaw, hip.curvature) / (e2 * e2));
    CurvaturePackage law_pkg = hip;
    law_pkg.curvature = Rlaw;
    const HscReport h_direct = hsc_max(hip, spec.sampler);
    const HscReport h_law = hsc_max(law_pkg, spec.sampler);
    out.law_hsc_error = std::max(out.law_hsc_error, std::abs(h_direct.kappa - h_law.kappa));
    if (fj.value == 0.0) {
      out.unchanged_region_error = std::max(
          {out.unchanged_region_error, max_diff(gip.torsion_lower, gbase.torsion_lower),
           max_diff(hip.curvature, hbase.curvature)});
    }

    // bounds (i)-(iv)
    const double T0i = torsion_norm(gip.torsion_lower, hij.g);
    const double Thi = torsion_norm(hip.torsion_lower, hij.g);
    const double dT0i =
        frame_sweep_max(nabla_bar_torsion(gij, gip.torsion_lower, hip.connection), hij.g, spec.sampler);
    const double dThi = frame_sweep_max(nabla_bar_torsion(hij, hip), hij.g, spec.sampler);
    const double comb = (n + 1.0) / (2.0 * n) * h_direct.kappa + dThi;
    out.c_i = std::max(out.c_i, T0i * T0i / b1);
    out.c_ii = std::max(out.c_ii, T0i * Thi / b1);
    out.c_iii = std::max(out.c_iii, dT0i / b2);
    out.c_iv = std::max(out.c_iv, (comb - out.kappa0) / b2);
  }
  out.c = std::max({out.c_i, out.c_ii, out.c_iii, out.c_iv});

  const double law_err = std::max({out.law_torsion_error, out.law_curvature_error, out.law_hsc_error,
                                   out.unchanged_region_error});
  out.report.offer(-law_err);
  out.report.samples = static_cast<long>(pts.size());
  out.report.details = {{"beta", out.beta},           {"kappa0", out.kappa0},
                        {"c_i", out.c_i},             {"c_ii", out.c_ii},
                        {"c_iii", out.c_iii},         {"c_iv", out.c_iv},
                        {"c", out.c},                 {"law_torsion_error", out.law_torsion_error},
                        {"law_curvature_error", out.law_curvature_error},
                        {"law_hsc_error", out.law_hsc_error},
                        {"unchanged_region_error", out.unchanged_region_error},
                        {"rho_i", spec.rho_i},        {"tau", spec.cutoff.tau}};
  out.report.finish();
  return out;
}

}  // namespace crf::exh
