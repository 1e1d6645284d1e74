#pragma once

// Dense complex linear algebra helpers shared by the ideal and frame code.

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qml {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Relative singular-value cutoff for every rank decision.
inline constexpr double kRankTol = 1e-10;

/// Orthonormal basis of the column range of `m`. Singular values at or below
/// rel_tol * sigma_max are treated as zero. Columns come in descending
/// singular-value order.
Matrix orth_range(const Matrix& m, double rel_tol = kRankTol);

/// Orthonormal basis of the null space of `m` (a cols x k matrix).
Matrix null_space(const Matrix& m, double rel_tol = kRankTol);

/// Orthonormal basis of the orthogonal complement of span(q) in C^ambient.
/// `q` must have orthonormal columns.
Matrix complement(const Matrix& q, Eigen::Index ambient);

/// Spectral-norm distance between the orthogonal projections onto span(a)
/// and span(b); both must have orthonormal columns.
double subspace_distance(const Matrix& a, const Matrix& b);

/// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& m);

/// Singular values in descending order.
Eigen::VectorXd singular_values(const Matrix& m);

}  // namespace qml
