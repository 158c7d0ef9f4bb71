#pragma once

#include <Eigen/Dense>

#include "orex/errors.hpp"

namespace orex {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default relative singular-value threshold for numerical rank decisions.
inline constexpr double kRankTol = 1e-10;

/// Largest eigenpair of a symmetric pencil A v = value * B v.
struct EigPair {
  double value = 0.0;
  Vector vector;
};

/// All eigenpairs of a symmetric pencil, ascending by eigenvalue.
struct GenEigDecomposition {
  Vector values;
  Matrix vectors;  // column i pairs with values(i); B-orthogonal, unit columns
};

bool all_finite(const Matrix& m);

/// Number of singular values above tol * sigma_max.
Index numerical_rank(const Matrix& m, double tol = kRankTol);

/// Orthonormal basis of the numerical null space of m; the result has
/// cols(m) - rank(m) columns. A matrix with no rows has full kernel.
Matrix nullspace_basis(const Matrix& m, double tol = kRankTol);

/// Minimum-Euclidean-norm solution of m x = y. Throws InconsistentDataError
/// when the residual exceeds 1e-10 * (1 + |y|).
Vector min_norm_solve(const Matrix& m, const Vector& y, double tol = kRankTol);

/// Minimum-norm least-squares solution, no consistency requirement on y.
Vector least_squares_min_norm(const Matrix& m, const Vector& y,
                              double tol = kRankTol);

/// Largest eigenpair of A v = value * B v with A symmetric PSD and B
/// symmetric positive definite. Solved by Cholesky-whitening B followed by
/// a symmetric eigensolve. Throws ModelDegeneracyError when B is singular.
EigPair gen_eig_max(const Matrix& a, const Matrix& b, double pd_tol = 1e-12);

/// Largest pencil eigenpair plus the runner-up eigenvalue.
struct GenEigTop {
  double value = 0.0;
  Vector vector;
  double second_value = 0.0;  // -inf on one-dimensional pencils
};

/// Same pencil given through factors: A = a_factor^T a_factor and
/// B = b_factor^T b_factor. Whitens with the triangular factor of a
/// column-pivoted QR of b_factor, which keeps the conditioning of the
/// factors instead of squaring it.
GenEigTop gen_eig_top_factors(const Matrix& a_factor, const Matrix& b_factor,
                              double rank_tol = kRankTol);
EigPair gen_eig_max_factors(const Matrix& a_factor, const Matrix& b_factor,
                            double rank_tol = kRankTol);

/// Full spectrum variant of gen_eig_max.
GenEigDecomposition gen_eig_sym(const Matrix& a, const Matrix& b,
                                double pd_tol = 1e-12);

/// Smallest eigenvalue of a symmetric matrix; an empty matrix is treated as
/// positive definite (+infinity).
double min_eig_sym(const Matrix& a);

}  // namespace orex
