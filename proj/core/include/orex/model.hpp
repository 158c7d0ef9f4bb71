#pragma once

#include <string>

#include "orex/numerics.hpp"

namespace orex {

/// Model set {g : |P g| <= radius}.
struct Hyperellipsoid {
  Matrix op;      // P, p x n
  double radius;  // epsilon > 0
};

/// Two-fidelity observation problem: f0 in k0, f0 - f1 in k1, observed
/// through lambda0 f0 and lambda1 f1, quantity of interest q f0.
struct MultiFidelityProblem {
  Hyperellipsoid k0;
  Hyperellipsoid k1;
  Matrix lambda0;  // m0 x n
  Matrix lambda1;  // m1 x n
  Matrix q;        // z x n
};

struct Observation {
  Vector y0;
  Vector y1;
};

enum class KernelCase { none, ker_in_p1, ker_in_lambda1 };

struct ValidationReport {
  bool ok = false;
  KernelCase kernel_case = KernelCase::none;
  std::string detail;
};

/// Checks the joint nondegeneracy condition and reports which kernel
/// inclusion (if any) certifies local optimality.
ValidationReport validate(const MultiFidelityProblem& p, double tol = 1e-9);

/// Lifted operators on the compound space F x F. Immutable after
/// construction; safe to share across threads.
class CompoundOperators {
 public:
  /// Generic constructor for arbitrary maps sharing a domain dimension.
  CompoundOperators(Matrix r, Matrix s, Matrix lambda, Matrix q_tilde,
                    double rank_tol = kRankTol);

  const Matrix& r() const { return r_; }
  const Matrix& s() const { return s_; }
  const Matrix& lambda() const { return lambda_; }
  const Matrix& q_tilde() const { return q_tilde_; }
  const Matrix& kernel_basis() const { return kernel_basis_; }

  // Kernel-restricted blocks: operator * kernel_basis.
  const Matrix& r_kernel() const { return r_kernel_; }
  const Matrix& s_kernel() const { return s_kernel_; }
  const Matrix& q_kernel() const { return q_kernel_; }

  Index dim() const { return lambda_.cols(); }
  Index kernel_dim() const { return kernel_basis_.cols(); }
  Index data_dim() const { return lambda_.rows(); }
  Index out_dim() const { return q_tilde_.rows(); }

  /// Minimum-norm data-consistent anchor; throws InconsistentDataError
  /// when y is not reachable.
  Vector min_norm_data(const Vector& y) const;

  /// Least-squares anchor for y possibly outside the range of lambda.
  Vector project_data(const Vector& y) const;

 private:
  Matrix r_, s_, lambda_, q_tilde_;
  Matrix kernel_basis_;
  Matrix r_kernel_, s_kernel_, q_kernel_;
  Eigen::JacobiSVD<Matrix> lambda_svd_;  // pseudoinverse factor
  double rank_tol_;
};

/// Builds the compound operators of the two-fidelity problem:
/// r = [P0/e0 | 0], s = [P1/e1 | -P1/e1], lambda block-diagonal,
/// q_tilde = [Q | 0]. Throws ModelDegeneracyError when validate() fails.
/// When the second fidelity carries no information at all (m1 = 0 and
/// P1 absent or zero) the lift collapses to the single-ellipsoid problem
/// on f0 alone.
CompoundOperators lift(const MultiFidelityProblem& p,
                       double rank_tol = kRankTol);

Vector stack_observation(const Observation& y);

}  // namespace orex
