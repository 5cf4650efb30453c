#pragma once

#include <string>
#include <vector>

#include "crf/core/types.hpp"

namespace crf::geom {

enum class Topology { PeriodicBox, RadialDisk, RadialPlane };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

struct AxisBounds {
  double lo = 0.0;
  double hi = 1.0;
};

/// Coordinate chart carrying a metric. Box charts list 2n real axes in the order
/// (x_1, y_1, x_2, y_2, ...); radial charts list a single radius interval.
struct ChartDomain {
  int complex_dimension = 1;
  Topology topology = Topology::RadialPlane;
  int grid_resolution = 64;
  std::vector<AxisBounds> bounds;

  static ChartDomain periodic_box(int n, double period, int resolution);
  static ChartDomain radial_disk(int n, double r_max, int resolution);
  static ChartDomain radial_plane(int n, double r_max, int resolution);

  /// Throws ConfigError listing the first violated invariant.
  void validate() const;
  bool contains(const Point& z) const;
  /// Periodic charts: reduce every real coordinate into its fundamental interval.
  Point wrap(const Point& z) const;
  double period(int axis) const { return bounds[axis].hi - bounds[axis].lo; }
};

}  // namespace crf::geom
