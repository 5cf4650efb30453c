#pragma once

#include <cstdint>
#include <vector>

#include "crf/core/report.hpp"
#include "crf/geometry/metric.hpp"

namespace crf::est {

struct UniquenessDiag {
  std::vector<Point> points;
  std::vector<double> F;  ///< (1/n) log(det omega2 / det omega1)
  double sup_F = 0.0;
  double inf_F = 0.0;
  double ke_defect1 = 0.0;
  double ke_defect2 = 0.0;
};

/// sup over points of |Ric(w) + w|_w.
double ke_defect(const geom::MetricProvider& w, const std::vector<Point>& points);

/// Throws NotKahlerEinsteinError if either input misses Ric = -omega by more than ke_tolerance.
UniquenessDiag uniqueness_F(const geom::MetricProvider& w1, const geom::MetricProvider& w2,
                            const std::vector<Point>& points, double ke_tolerance = 1e-8);

EstimateReport uniqueness_F_check(const geom::MetricProvider& w1, const geom::MetricProvider& w2,
                                  const std::vector<Point>& points, double tolerance = 1e-10,
                                  double ke_tolerance = 1e-8);

/// Uniform samples in the disk |z| <= r_max (n = 1), deterministic in the seed.
std::vector<Point> disk_samples(int count, double r_max, std::uint64_t seed);

}  // namespace crf::est
