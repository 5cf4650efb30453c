#include "crf/estimates/uniqueness.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "crf/geometry/curvature.hpp"

namespace crf::est {

double ke_defect(const geom::MetricProvider& w, const std::vector<Point>& points) {
  double m = 0.0;
  for (const auto& z : points) {
    const auto pkg = geom::chern_curvature(w, z);
    const CMat M = pkg.g.inverse() * (pkg.ricci + pkg.g);
    m = std::max(m, std::sqrt(std::max(0.0, (M * M.adjoint()).trace().real())));
  }
  return m;
}

UniquenessDiag uniqueness_F(const geom::MetricProvider& w1, const geom::MetricProvider& w2,
                            const std::vector<Point>& points, double ke_tolerance) {
  if (w1.dim() != w2.dim()) throw PreconditionError("uniqueness: metrics of different dimension");
  UniquenessDiag d;
  d.ke_defect1 = ke_defect(w1, points);
  d.ke_defect2 = ke_defect(w2, points);
  for (int which : {1, 2}) {
    const double defect = which == 1 ? d.ke_defect1 : d.ke_defect2;
    if (!(defect <= ke_tolerance)) {
      std::ostringstream os;
      os << "inputs not Kahler-Einstein: omega" << which << " (" << (which == 1 ? w1 : w2).label()
         << ") has sup |Ric + omega| = " << defect << " > " << ke_tolerance;
      throw NotKahlerEinsteinError(os.str());
    }
  }
  const int n = w1.dim();
  d.points = points;
  d.sup_F = -std::numeric_limits<double>::infinity();
  d.inf_F = std::numeric_limits<double>::infinity();
  for (const auto& z : points) {
    // log of each determinant separately, so swapping the inputs negates F bit for bit
    const double F = (std::log(w2.eval(z).determinant().real()) -
                      std::log(w1.eval(z).determinant().real())) / n;
    d.F.push_back(F);
    d.sup_F = std::max(d.sup_F, F);
    d.inf_F = std::min(d.inf_F, F);
  }
  return d;
}

EstimateReport uniqueness_F_check(const geom::MetricProvider& w1, const geom::MetricProvider& w2,
                                  const std::vector<Point>& points, double tolerance,
                                  double ke_tolerance) {
  const UniquenessDiag d = uniqueness_F(w1, w2, points, ke_tolerance);
  EstimateReport rep("uniqueness_F", 0.0);
  for (std::size_t k = 0; k < d.F.size(); ++k) {
    const Point& z = d.points[k];
    std::vector<double> c;
    for (int a = 0; a < z.size(); ++a) {
      c.push_back(z(a).real());
      c.push_back(z(a).imag());
    }
    rep.offer(tolerance - std::abs(d.F[k]), c);
  }
  rep.details = {{"sup_F", d.sup_F},          {"inf_F", d.inf_F},
                 {"ke_defect_1", d.ke_defect1}, {"ke_defect_2", d.ke_defect2},
                 {"F_tolerance", tolerance},    {"ke_tolerance", ke_tolerance},
                 {"omega1", w1.label()},        {"omega2", w2.label()}};
  return rep.finish();
}

std::vector<Point> disk_samples(int count, double r_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  for (int k = 0; k < count; ++k) {
    const double r = r_max * std::sqrt(u(rng)), th = 2.0 * M_PI * u(rng);
    Point z(1);
    z(0) = std::polar(r, th);
    pts.push_back(z);
  }
  return pts;
}

}  // namespace crf::est
