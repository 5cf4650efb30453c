#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crf/core/types.hpp"
#include "crf/flow/grid.hpp"

namespace crf::flow {

/// Serial runs the same kernel without a parallel region; reductions are always
/// finished serially in node order, so both paths give identical bits.
enum class Exec { Serial, Parallel };

std::string to_string(Exec e);
Exec exec_from_string(const std::string& s);

/// Metric fields hold n*n complex entries per node, row-major: g(i, j) = g_{i jbar}.
using MatrixField = std::vector<cd>;
using ScalarField = std::vector<double>;

CMat matrix_at(const MatrixField& f, int n, std::size_t node);
void store_matrix(MatrixField& f, int n, std::size_t node, const CMat& m);

/// Closed forms for n <= 2 Hermitian blocks.
double hermitian_det(int n, const cd* m);
double hermitian_min_eig(int n, const cd* m);
/// tr(A^{-1} B) for Hermitian A and B.
double trace_inv_product(int n, const cd* a, const cd* b);

/// i ddbar u of a real field: out(node) = [d_a dbar_b u]. Boundary nodes are zeroed.
void ddbar_field(const Grid& grid, const ScalarField& u, MatrixField& out, Exec exec);
/// Serial reference built on Grid's generic stencils.
void ddbar_field_reference(const Grid& grid, const ScalarField& u, MatrixField& out);

/// out = log(det g / det0). Returns the first node whose determinant is not positive, or -1.
std::ptrdiff_t log_det_ratio(int n, const MatrixField& g, const ScalarField& det0, ScalarField& out,
                             Exec exec);

/// Replaces every block by (A + A^H) / 2.
void symmetrize(int n, MatrixField& g, Exec exec);

/// Smallest eigenvalue per node; returns the minimum (ties: lowest node) and its node.
double min_eigenvalue_field(int n, const MatrixField& g, Exec exec, std::size_t* where = nullptr);

/// Chern-Ricci form on the grid relative to a reference metric with known Ricci form:
/// Ric(g) = ric_ref - i ddbar log(det g / det_ref). Boundary nodes copy ric_ref.
/// Returns the first degenerate node, or -1.
std::ptrdiff_t ricci_field(const Grid& grid, const MatrixField& g, const MatrixField& ric_ref,
                           const ScalarField& det_ref, MatrixField& ric, Exec exec);
std::ptrdiff_t ricci_field_reference(const Grid& grid, const MatrixField& g,
                                     const MatrixField& ric_ref, const ScalarField& det_ref,
                                     MatrixField& ric);

}  // namespace crf::flow
