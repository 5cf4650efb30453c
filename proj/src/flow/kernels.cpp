#include "crf/flow/kernels.hpp"

#include <cmath>
#include <limits>

namespace crf::flow {

namespace {

template <class F>
void for_nodes(Exec exec, std::size_t count, F&& body) {
  const auto N = static_cast<std::ptrdiff_t>(count);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < N; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < N; ++i) body(static_cast<std::size_t>(i));
  }
}

void ddbar_radial(const Grid& g, const ScalarField& u, MatrixField& out, Exec exec) {
  const double h = g.step(), ih2 = 1.0 / (h * h);
  const std::size_t N = g.size();
  for_nodes(exec, N, [&](std::size_t j) {
    if (j + 1 == N) {
      out[j] = 0.0;
      return;
    }
    if (j == 0) {
      // even extension: u_rr(0) = 2 (u_1 - u_0) / h^2, ddbar = u_rr / 2
      out[0] = (u[1] - u[0]) * ih2;
      return;
    }
    const double urr = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * ih2;
    const double ur = (u[j + 1] - u[j - 1]) / (2.0 * h);
    out[j] = 0.25 * (urr + ur / (h * static_cast<double>(j)));
  });
}

void ddbar_box(const Grid& g, const ScalarField& u, MatrixField& out, Exec exec) {
  const int n = g.dim();
  const double ih2 = 1.0 / (g.step() * g.step());
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  auto d2 = [&](std::size_t i, int p) {
    return (u[g.nbr(i, p, 1)] - 2.0 * u[i] + u[g.nbr(i, p, 0)]) * ih2;
  };
  auto dx = [&](std::size_t i, int p, int q) {
    const auto pp = static_cast<std::size_t>(g.nbr(i, p, 1));
    const auto pm = static_cast<std::size_t>(g.nbr(i, p, 0));
    return (u[g.nbr(pp, q, 1)] - u[g.nbr(pp, q, 0)] - u[g.nbr(pm, q, 1)] + u[g.nbr(pm, q, 0)]) *
           (0.25 * ih2);
  };
  for_nodes(exec, g.size(), [&](std::size_t i) {
    cd* o = &out[i * nn];
    if (g.boundary(i)) {
      for (std::size_t k = 0; k < nn; ++k) o[k] = 0.0;
      return;
    }
    for (int a = 0; a < n; ++a) o[a * n + a] = 0.25 * (d2(i, 2 * a) + d2(i, 2 * a + 1));
    if (n == 2) {
      const double re = dx(i, 0, 2) + dx(i, 1, 3);
      const double im = dx(i, 0, 3) - dx(i, 1, 2);
      o[1] = 0.25 * cd(re, im);
      o[2] = 0.25 * cd(re, -im);
    }
  });
}

}  // namespace

std::string to_string(Exec e) { return e == Exec::Parallel ? "parallel" : "serial"; }

Exec exec_from_string(const std::string& s) {
  if (s == "parallel") return Exec::Parallel;
  if (s == "serial") return Exec::Serial;
  throw ConfigError("unknown execution mode '" + s + "' (serial | parallel)");
}

CMat matrix_at(const MatrixField& f, int n, std::size_t node) {
  CMat m(n, n);
  const cd* p = &f[node * n * n];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = p[i * n + j];
  return m;
}

void store_matrix(MatrixField& f, int n, std::size_t node, const CMat& m) {
  cd* p = &f[node * n * n];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p[i * n + j] = m(i, j);
}

double hermitian_det(int n, const cd* m) {
  if (n == 1) return m[0].real();
  if (n == 2) return m[0].real() * m[3].real() - std::norm(m[1]);
  return matrix_at(MatrixField(m, m + n * n), n, 0).determinant().real();
}

double hermitian_min_eig(int n, const cd* m) {
  if (n == 1) return m[0].real();
  if (n == 2) {
    const double a = m[0].real(), d = m[3].real();
    const double half = 0.5 * (a - d);
    return 0.5 * (a + d) - std::sqrt(half * half + std::norm(m[1]));
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(matrix_at(MatrixField(m, m + n * n), n, 0),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double trace_inv_product(int n, const cd* a, const cd* b) {
  if (n == 1) return b[0].real() / a[0].real();
  if (n == 2) {
    // A^{-1} = adj(A) / det
    const double det = hermitian_det(2, a);
    const cd t = a[3] * b[0] - a[1] * b[2] - a[2] * b[1] + a[0] * b[3];
    return t.real() / det;
  }
  const CMat A = matrix_at(MatrixField(a, a + n * n), n, 0);
  const CMat B = matrix_at(MatrixField(b, b + n * n), n, 0);
  return (A.inverse() * B).trace().real();
}

void ddbar_field(const Grid& grid, const ScalarField& u, MatrixField& out, Exec exec) {
  const std::size_t nn = static_cast<std::size_t>(grid.dim()) * grid.dim();
  out.resize(grid.size() * nn);
  if (grid.kind() == Grid::Kind::Radial)
    ddbar_radial(grid, u, out, exec);
  else
    ddbar_box(grid, u, out, exec);
}

void ddbar_field_reference(const Grid& grid, const ScalarField& u, MatrixField& out) {
  const int n = grid.dim();
  out.assign(grid.size() * n * n, cd{});
  auto val = [&](std::size_t j) { return cd(u[j], 0.0); };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.boundary(i)) continue;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[i * n * n + a * n + b] = grid.ddbar(val, i, a, b, 2);
  }
}

std::ptrdiff_t log_det_ratio(int n, const MatrixField& g, const ScalarField& det0, ScalarField& out,
                             Exec exec) {
  const std::size_t N = det0.size();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  out.resize(N);
  std::vector<unsigned char> bad(N, 0);
  for_nodes(exec, N, [&](std::size_t i) {
    const double d = hermitian_det(n, &g[i * nn]);
    if (!(d > 0.0)) {
      bad[i] = 1;
      out[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    out[i] = std::log(d / det0[i]);
  });
  for (std::size_t i = 0; i < N; ++i)
    if (bad[i]) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

void symmetrize(int n, MatrixField& g, Exec exec) {
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  for_nodes(exec, g.size() / nn, [&](std::size_t i) {
    cd* m = &g[i * nn];
    for (int a = 0; a < n; ++a) {
      m[a * n + a] = m[a * n + a].real();
      for (int b = a + 1; b < n; ++b) {
        const cd avg = 0.5 * (m[a * n + b] + std::conj(m[b * n + a]));
        m[a * n + b] = avg;
        m[b * n + a] = std::conj(avg);
      }
    }
  });
}

double min_eigenvalue_field(int n, const MatrixField& g, Exec exec, std::size_t* where) {
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const std::size_t N = g.size() / nn;
  std::vector<double> e(N);
  for_nodes(exec, N, [&](std::size_t i) {
    const double v = hermitian_min_eig(n, &g[i * nn]);
    e[i] = std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  });
  double m = std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t i = 0; i < N; ++i)
    if (e[i] < m || (i == 0 && e[i] == m)) {
      m = e[i];
      at = i;
    }
  if (where) *where = at;
  return m;
}

std::ptrdiff_t ricci_field(const Grid& grid, const MatrixField& g, const MatrixField& ric_ref,
                           const ScalarField& det_ref, MatrixField& ric, Exec exec) {
  const int n = grid.dim();
  ScalarField L;
  const auto bad = log_det_ratio(n, g, det_ref, L, exec);
  if (bad >= 0) return bad;
  MatrixField D;
  ddbar_field(grid, L, D, exec);
  ric.resize(g.size());
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  for_nodes(exec, grid.size(), [&](std::size_t i) {
    for (std::size_t k = 0; k < nn; ++k) ric[i * nn + k] = ric_ref[i * nn + k] - D[i * nn + k];
  });
  return -1;
}

std::ptrdiff_t ricci_field_reference(const Grid& grid, const MatrixField& g,
                                     const MatrixField& ric_ref, const ScalarField& det_ref,
                                     MatrixField& ric) {
  const int n = grid.dim();
  ScalarField L(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = matrix_at(g, n, i).determinant().real();
    if (!(d > 0.0)) return static_cast<std::ptrdiff_t>(i);
    L[i] = std::log(d) - std::log(det_ref[i]);
  }
  MatrixField D;
  ddbar_field_reference(grid, L, D);
  ric.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) ric[k] = ric_ref[k] - D[k];
  return -1;
}

}  // namespace crf::flow
