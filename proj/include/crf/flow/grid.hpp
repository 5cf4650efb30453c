#pragma once

#include <cstddef>
#include <vector>

#include "crf/core/types.hpp"
#include "crf/geometry/chart.hpp"

namespace crf::flow {

/// Structured grid for flows.
///  - Radial: n = 1, nodes r_j = j h on [0, r_max], points placed on the positive real axis.
///    The origin uses the even extension; the outer node is a boundary node.
///  - Box: n in {1, 2}, N nodes per real axis (x_1, y_1, x_2, y_2). Periodic boxes wrap;
///    otherwise every node on a face is a boundary node.
class Grid {
 public:
  enum class Kind { Radial, Box };

  static Grid radial(double r_max, int nodes);
  static Grid box(int n, double lo, double hi, int nodes, bool periodic);
  /// Radial charts become radial grids, periodic-box charts periodic boxes.
  static Grid from_chart(const geom::ChartDomain& chart);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  int nodes_per_axis() const { return N_; }
  std::size_t size() const { return size_; }
  double step() const { return h_; }
  bool periodic() const { return periodic_; }
  double r_max() const { return hi_; }

  Point point(std::size_t i) const;
  /// Radius |z| of node i.
  double radius(std::size_t i) const;
  bool boundary(std::size_t i) const { return boundary_[i] != 0; }
  int axis_index(std::size_t i, int axis) const;

  /// Node reached by k steps along a real axis, or -1 when it falls off a non-periodic grid.
  /// Radial grids reflect negative indices (even extension at the origin).
  std::ptrdiff_t shift(std::size_t i, int axis, int k) const;
  /// Precomputed +-1 neighbours: nbr(i, axis, 0) is the minus side, nbr(i, axis, 1) the plus side.
  std::ptrdiff_t nbr(std::size_t i, int axis, int side) const {
    return nbr_[(i * 2 * n_ + axis) * 2 + side];
  }

  /// Highest stencil order (2 or 4) usable at node i. Order 4 is always available: next to an
  /// edge the 5-point window is shifted off-centre.
  int usable_order(std::size_t i, int order) const;
  /// First offset of the 5-point window along an axis: -2 when centred, else in [-4, 0].
  int window(std::size_t i, int axis) const;

  /// Reference stencils on a node-indexed scalar field u (callable cd(std::size_t)).
  /// d_a u, and d_a dbar_b u. Not defined on boundary nodes.
  template <class U>
  cd d(const U& u, std::size_t i, int a, int order = 2) const;
  template <class U>
  cd ddbar(const U& u, std::size_t i, int a, int b, int order = 2) const;
  /// Chern-type Laplacian of u with respect to a metric inverse gi: sum gi(p,q) d_p dbar_q u.
  template <class U>
  double laplacian(const U& u, std::size_t i, const CMat& g_inv, int order = 2) const;

 private:
  template <class U>
  cd axis_d1(const U& u, std::size_t i, int axis, int order) const;
  template <class U>
  cd axis_d2(const U& u, std::size_t i, int p, int q, int order) const;

  Kind kind_ = Kind::Box;
  int n_ = 1;
  int N_ = 0;
  std::size_t size_ = 0;
  double lo_ = 0.0, hi_ = 1.0, h_ = 1.0;
  bool periodic_ = false;
  std::vector<unsigned char> boundary_;
  std::vector<std::ptrdiff_t> nbr_;
  std::vector<std::size_t> stride_;
};

namespace detail {
// Weights on offsets m..m+4, indexed by m + 4 for m in [-4, 0]. Row 2 (m = -2) is central.
inline constexpr double kD1o4[5][5] = {
    {1.0 / 4, -4.0 / 3, 3.0, -4.0, 25.0 / 12},
    {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4},
    {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
    {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12},
    {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4}};
inline constexpr double kD2o4[5][5] = {
    {11.0 / 12, -14.0 / 3, 19.0 / 2, -26.0 / 3, 35.0 / 12},
    {-1.0 / 12, 1.0 / 3, 1.0 / 2, -5.0 / 3, 11.0 / 12},
    {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12},
    {11.0 / 12, -5.0 / 3, 1.0 / 2, 1.0 / 3, -1.0 / 12},
    {35.0 / 12, -26.0 / 3, 19.0 / 2, -14.0 / 3, 11.0 / 12}};
inline constexpr double kD1o2[5] = {0.0, -0.5, 0.0, 0.5, 0.0};
inline constexpr double kD2o2[5] = {0.0, 1.0, -2.0, 1.0, 0.0};
}  // namespace detail

template <class U>
cd Grid::axis_d1(const U& u, std::size_t i, int axis, int order) const {
  const int m = order == 4 ? window(i, axis) : -2;
  const double* w = order == 4 ? detail::kD1o4[m + 4] : detail::kD1o2;
  cd s{};
  for (int k = 0; k < 5; ++k) {
    if (w[k] == 0.0) continue;
    s += w[k] * u(static_cast<std::size_t>(shift(i, axis, m + k)));
  }
  return s / h_;
}

template <class U>
cd Grid::axis_d2(const U& u, std::size_t i, int p, int q, int order) const {
  if (p == q) {
    const int m = order == 4 ? window(i, p) : -2;
    const double* w = order == 4 ? detail::kD2o4[m + 4] : detail::kD2o2;
    cd s{};
    for (int k = 0; k < 5; ++k) {
      if (w[k] == 0.0) continue;
      s += w[k] * u(static_cast<std::size_t>(shift(i, p, m + k)));
    }
    return s / (h_ * h_);
  }
  // mixed: D_q applied at each node of the D_p stencil
  const int m = order == 4 ? window(i, p) : -2;
  const double* w = order == 4 ? detail::kD1o4[m + 4] : detail::kD1o2;
  cd s{};
  for (int k = 0; k < 5; ++k) {
    if (w[k] == 0.0) continue;
    const auto j = static_cast<std::size_t>(shift(i, p, m + k));
    s += w[k] * axis_d1(u, j, q, order) * h_;
  }
  return s / (h_ * h_);
}

template <class U>
cd Grid::d(const U& u, std::size_t i, int a, int order) const {
  order = usable_order(i, order);
  if (kind_ == Kind::Radial) {
    // radial field on the real axis: d_z u = u_r / 2
    if (i == 0) return cd{};
    return 0.5 * axis_d1(u, i, 0, order);
  }
  return 0.5 * (axis_d1(u, i, 2 * a, order) - cd(0, 1) * axis_d1(u, i, 2 * a + 1, order));
}

template <class U>
cd Grid::ddbar(const U& u, std::size_t i, int a, int b, int order) const {
  order = usable_order(i, order);
  if (kind_ == Kind::Radial) {
    const cd urr = axis_d2(u, i, 0, 0, order);
    if (i == 0) return 0.5 * urr;
    return 0.25 * (urr + axis_d1(u, i, 0, order) / radius(i));
  }
  const int xa = 2 * a, ya = 2 * a + 1, xb = 2 * b, yb = 2 * b + 1;
  const cd re = axis_d2(u, i, xa, xb, order) + axis_d2(u, i, ya, yb, order);
  if (a == b) return 0.25 * re;
  const cd im = axis_d2(u, i, xa, yb, order) - axis_d2(u, i, ya, xb, order);
  return 0.25 * (re + cd(0, 1) * im);
}

template <class U>
double Grid::laplacian(const U& u, std::size_t i, const CMat& g_inv, int order) const {
  cd s{};
  for (int p = 0; p < n_; ++p)
    for (int q = 0; q < n_; ++q) s += g_inv(p, q) * ddbar(u, i, p, q, order);
  return s.real();
}

}  // namespace crf::flow
