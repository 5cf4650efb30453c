#include "crf/flow/grid.hpp"

#include <cmath>
#include <string>

namespace crf::flow {

Grid Grid::radial(double r_max, int nodes) {
  if (nodes < 8) throw ConfigError("radial grid needs at least 8 nodes");
  if (!(r_max > 0.0)) throw ConfigError("radial grid needs r_max > 0");
  Grid g;
  g.kind_ = Kind::Radial;
  g.n_ = 1;
  g.N_ = nodes;
  g.size_ = static_cast<std::size_t>(nodes);
  g.lo_ = 0.0;
  g.hi_ = r_max;
  g.h_ = r_max / (nodes - 1);
  g.boundary_.assign(g.size_, 0);
  g.boundary_.back() = 1;
  g.stride_ = {1};
  // same layout as boxes (2 n axes); only axis 0 is meaningful
  g.nbr_.assign(g.size_ * 4, -1);
  for (std::size_t i = 0; i < g.size_; ++i) {
    g.nbr_[i * 4 + 0] = g.shift(i, 0, -1);
    g.nbr_[i * 4 + 1] = g.shift(i, 0, 1);
  }
  return g;
}

Grid Grid::box(int n, double lo, double hi, int nodes, bool periodic) {
  if (n < 1 || n > 2) throw ConfigError("box grids support complex dimension 1 or 2");
  if (nodes < 8) throw ConfigError("box grid needs at least 8 nodes per axis");
  if (!(hi > lo)) throw ConfigError("box grid bounds must be a nonempty interval");
  Grid g;
  g.kind_ = Kind::Box;
  g.n_ = n;
  g.N_ = nodes;
  g.lo_ = lo;
  g.hi_ = hi;
  g.periodic_ = periodic;
  g.h_ = periodic ? (hi - lo) / nodes : (hi - lo) / (nodes - 1);
  const int axes = 2 * n;
  g.stride_.resize(axes);
  std::size_t s = 1;
  for (int a = 0; a < axes; ++a) {
    g.stride_[a] = s;
    s *= static_cast<std::size_t>(nodes);
  }
  g.size_ = s;
  g.boundary_.assign(s, 0);
  if (!periodic) {
    for (std::size_t i = 0; i < s; ++i)
      for (int a = 0; a < axes; ++a) {
        const int k = g.axis_index(i, a);
        if (k == 0 || k == nodes - 1) g.boundary_[i] = 1;
      }
  }
  g.nbr_.resize(s * axes * 2);
  for (std::size_t i = 0; i < s; ++i)
    for (int a = 0; a < axes; ++a) {
      g.nbr_[(i * axes + a) * 2 + 0] = g.shift(i, a, -1);
      g.nbr_[(i * axes + a) * 2 + 1] = g.shift(i, a, 1);
    }
  return g;
}

Grid Grid::from_chart(const geom::ChartDomain& chart) {
  chart.validate();
  if (chart.topology == geom::Topology::PeriodicBox)
    return box(chart.complex_dimension, chart.bounds[0].lo, chart.bounds[0].hi, chart.grid_resolution,
               true);
  if (chart.complex_dimension != 1)
    throw ConfigError("radial grids are implemented for complex dimension 1 only");
  return radial(chart.bounds[0].hi, chart.grid_resolution);
}

int Grid::axis_index(std::size_t i, int axis) const {
  if (kind_ == Kind::Radial) return static_cast<int>(i);
  return static_cast<int>((i / stride_[axis]) % static_cast<std::size_t>(N_));
}

Point Grid::point(std::size_t i) const {
  Point z(n_);
  if (kind_ == Kind::Radial) {
    z(0) = cd(radius(i), 0.0);
    return z;
  }
  for (int a = 0; a < n_; ++a)
    z(a) = cd(lo_ + h_ * axis_index(i, 2 * a), lo_ + h_ * axis_index(i, 2 * a + 1));
  return z;
}

double Grid::radius(std::size_t i) const {
  if (kind_ == Kind::Radial) return h_ * static_cast<double>(i);
  return point(i).norm();
}

std::ptrdiff_t Grid::shift(std::size_t i, int axis, int k) const {
  if (kind_ == Kind::Radial) {
    const std::ptrdiff_t j = std::abs(static_cast<std::ptrdiff_t>(i) + k);
    return j < N_ ? j : -1;
  }
  const int idx = axis_index(i, axis);
  int m = idx + k;
  if (periodic_) {
    m %= N_;
    if (m < 0) m += N_;
  } else if (m < 0 || m >= N_) {
    return -1;
  }
  return static_cast<std::ptrdiff_t>(i) +
         static_cast<std::ptrdiff_t>(stride_[axis]) * (m - idx);
}

int Grid::usable_order(std::size_t, int order) const { return order == 4 ? 4 : 2; }

int Grid::window(std::size_t i, int axis) const {
  if (periodic_) return -2;
  const int k = axis_index(i, axis);
  // radial grids reflect at the origin, so only the outer edge constrains the window
  const int lo = kind_ == Kind::Radial ? -2 : std::max(-2, -k);
  return std::min(lo, N_ - 1 - k - 4);
}

}  // namespace crf::flow
