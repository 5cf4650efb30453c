#include "crf/geometry/chart.hpp"

#include <cmath>

namespace crf::geom {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::PeriodicBox: return "periodic-box";
    case Topology::RadialDisk: return "radial-disk";
    case Topology::RadialPlane: return "radial-plane";
  }
  return "unknown";
}

Topology topology_from_string(const std::string& s) {
  if (s == "periodic-box") return Topology::PeriodicBox;
  if (s == "radial-disk") return Topology::RadialDisk;
  if (s == "radial-plane") return Topology::RadialPlane;
  throw ConfigError("unknown chart topology '" + s + "'");
}

ChartDomain ChartDomain::periodic_box(int n, double period, int resolution) {
  ChartDomain c;
  c.complex_dimension = n;
  c.topology = Topology::PeriodicBox;
  c.grid_resolution = resolution;
  c.bounds.assign(2 * n, AxisBounds{0.0, period});
  c.validate();
  return c;
}

ChartDomain ChartDomain::radial_disk(int n, double r_max, int resolution) {
  ChartDomain c;
  c.complex_dimension = n;
  c.topology = Topology::RadialDisk;
  c.grid_resolution = resolution;
  c.bounds = {AxisBounds{0.0, r_max}};
  c.validate();
  return c;
}

ChartDomain ChartDomain::radial_plane(int n, double r_max, int resolution) {
  ChartDomain c;
  c.complex_dimension = n;
  c.topology = Topology::RadialPlane;
  c.grid_resolution = resolution;
  c.bounds = {AxisBounds{0.0, r_max}};
  c.validate();
  return c;
}

void ChartDomain::validate() const {
  if (complex_dimension < 1 || complex_dimension > kMaxDim)
    throw ConfigError("complex dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  if (grid_resolution < 8) throw ConfigError("grid resolution must be >= 8");
  if (bounds.empty()) throw ConfigError("chart bounds are empty");
  for (const auto& b : bounds)
    if (!(b.hi > b.lo)) throw ConfigError("chart bounds must be nonempty intervals");
  if (topology == Topology::PeriodicBox && bounds.size() != static_cast<std::size_t>(2 * complex_dimension))
    throw ConfigError("periodic box needs 2n real axes");
  if (topology != Topology::PeriodicBox && bounds.size() != 1)
    throw ConfigError("radial chart needs exactly one radius interval");
  if (topology == Topology::RadialDisk && (bounds[0].lo < 0.0 || bounds[0].hi >= 1.0))
    throw ConfigError("radial-disk range must lie in [0, 1)");
}

bool ChartDomain::contains(const Point& z) const {
  if (z.size() != complex_dimension) return false;
  for (int a = 0; a < z.size(); ++a)
    if (!std::isfinite(z(a).real()) || !std::isfinite(z(a).imag())) return false;
  switch (topology) {
    case Topology::PeriodicBox: return true;
    case Topology::RadialDisk: return z.norm() < 1.0;
    case Topology::RadialPlane: return true;
  }
  return false;
}

Point ChartDomain::wrap(const Point& z) const {
  if (topology != Topology::PeriodicBox) return z;
  Point w = z;
  auto reduce = [](double v, const AxisBounds& b) {
    const double p = b.hi - b.lo;
    double r = std::fmod(v - b.lo, p);
    if (r < 0) r += p;
    return b.lo + r;
  };
  for (int a = 0; a < z.size(); ++a)
    w(a) = cd(reduce(z(a).real(), bounds[2 * a]), reduce(z(a).imag(), bounds[2 * a + 1]));
  return w;
}

}  // namespace crf::geom
