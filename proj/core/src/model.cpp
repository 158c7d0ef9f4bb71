#include "orex/model.hpp"

#include <cmath>
#include <utility>

namespace orex {

namespace {

void check_problem_dims(const MultiFidelityProblem& p) {
  const Index n = p.k0.op.cols();
  if (n == 0) throw InvalidInputError("problem: empty object space");
  if (p.k1.op.cols() != n || p.lambda0.cols() != n || p.lambda1.cols() != n ||
      p.q.cols() != n) {
    throw InvalidInputError("problem: operators disagree on object dimension");
  }
  if (!(p.k0.radius > 0.0) || !(p.k1.radius > 0.0)) {
    throw InvalidInputError("problem: radii must be positive");
  }
  if (!all_finite(p.k0.op) || !all_finite(p.k1.op) || !all_finite(p.lambda0) ||
      !all_finite(p.lambda1) || !all_finite(p.q) ||
      !std::isfinite(p.k0.radius) || !std::isfinite(p.k1.radius)) {
    throw InvalidInputError("problem: non-finite entries");
  }
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

// No low-fidelity data and no bias constraint: f1 carries no information
// and the problem reduces to a single hyperellipsoid on f0.
bool single_fidelity(const MultiFidelityProblem& p) {
  return p.lambda1.rows() == 0 &&
         (p.k1.op.rows() == 0 || p.k1.op.norm() == 0.0);
}

}  // namespace

ValidationReport validate(const MultiFidelityProblem& p, double tol) {
  check_problem_dims(p);
  const Index n = p.k0.op.cols();

  ValidationReport rep;

  // Joint nondegeneracy on the compound space: no nonzero [f0; f1] is
  // killed by P0, P1(. - .), lambda0 and lambda1 simultaneously. Tested as
  // positive definiteness of (R*R + S*S)/2 restricted to ker(lambda). In
  // the single-fidelity reduction the test collapses to the f0 block.
  Matrix r, s, lambda;
  if (single_fidelity(p)) {
    r = p.k0.op;
    s = Matrix(0, n);
    lambda = p.lambda0;
  } else {
    r = Matrix::Zero(p.k0.op.rows(), 2 * n);
    r.leftCols(n) = p.k0.op;
    s = Matrix::Zero(p.k1.op.rows(), 2 * n);
    s.leftCols(n) = p.k1.op;
    s.rightCols(n) = -p.k1.op;
    lambda = block_diag(p.lambda0, p.lambda1);
  }

  const Matrix kernel = nullspace_basis(lambda);
  if (kernel.cols() == 0) {
    rep.ok = true;
    rep.detail = "observation maps have trivial joint kernel";
  } else {
    Matrix stacked(r.rows() + s.rows(), kernel.cols());
    stacked.topRows(r.rows()) = r * kernel;
    stacked.bottomRows(s.rows()) = s * kernel;
    const Matrix gram = 0.5 * stacked.transpose() * stacked;
    const double scale =
        std::max(1.0, gram.size() ? gram.cwiseAbs().maxCoeff() : 0.0);
    const double mineig = min_eig_sym(gram);
    rep.ok = mineig > tol * scale;
    rep.detail = rep.ok ? "nondegenerate"
                        : "degenerate: kernel direction invisible to both "
                          "model operators";
  }

  // Kernel inclusions certifying local optimality. An empty lambda1 does
  // not certify through the second inclusion: with no low-fidelity data
  // the problem is covered by the single-ellipsoid reduction instead.
  const Matrix n0 = nullspace_basis(p.lambda0);
  if (n0.cols() == 0) {
    rep.kernel_case = KernelCase::ker_in_p1;
  } else {
    const double p1_scale = std::max(1.0, p.k1.op.norm());
    const double l1_scale = std::max(1.0, p.lambda1.norm());
    if ((p.k1.op * n0).norm() <= tol * p1_scale) {
      rep.kernel_case = KernelCase::ker_in_p1;
    } else if (p.lambda1.rows() > 0 &&
               (p.lambda1 * n0).norm() <= tol * l1_scale) {
      rep.kernel_case = KernelCase::ker_in_lambda1;
    } else {
      rep.kernel_case = KernelCase::none;
    }
  }
  return rep;
}

CompoundOperators::CompoundOperators(Matrix r, Matrix s, Matrix lambda,
                                     Matrix q_tilde, double rank_tol)
    : r_(std::move(r)),
      s_(std::move(s)),
      lambda_(std::move(lambda)),
      q_tilde_(std::move(q_tilde)),
      rank_tol_(rank_tol) {
  const Index d = lambda_.cols();
  if (r_.cols() != d || s_.cols() != d || q_tilde_.cols() != d) {
    throw InvalidInputError("compound operators: domain dimension mismatch");
  }
  if (!all_finite(r_) || !all_finite(s_) || !all_finite(lambda_) ||
      !all_finite(q_tilde_)) {
    throw InvalidInputError("compound operators: non-finite entries");
  }
  kernel_basis_ = nullspace_basis(lambda_, rank_tol_);
  r_kernel_ = r_ * kernel_basis_;
  s_kernel_ = s_ * kernel_basis_;
  q_kernel_ = q_tilde_ * kernel_basis_;
  if (lambda_.rows() > 0) {
    lambda_svd_.compute(lambda_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  }
}

namespace {

Vector svd_apply_pinv(const Eigen::JacobiSVD<Matrix>& svd, const Vector& y,
                      double tol) {
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? tol * sv(0) : 0.0;
  Vector coeffs = svd.matrixU().transpose() * y;
  for (Index i = 0; i < sv.size(); ++i) {
    coeffs(i) = sv(i) > cutoff ? coeffs(i) / sv(i) : 0.0;
  }
  return svd.matrixV() * coeffs;
}

}  // namespace

Vector CompoundOperators::project_data(const Vector& y) const {
  if (y.size() != data_dim()) {
    throw InvalidInputError("compound operators: data length mismatch");
  }
  if (data_dim() == 0) return Vector::Zero(dim());
  return svd_apply_pinv(lambda_svd_, y, rank_tol_);
}

Vector CompoundOperators::min_norm_data(const Vector& y) const {
  Vector x = project_data(y);
  const double residual = (lambda_ * x - y).norm();
  if (residual > 1e-10 * (1.0 + y.norm())) {
    throw InconsistentDataError(
        "data outside the range of the observation map, residual " +
        std::to_string(residual));
  }
  return x;
}

CompoundOperators lift(const MultiFidelityProblem& p, double rank_tol) {
  const ValidationReport rep = validate(p);
  if (!rep.ok) {
    throw ModelDegeneracyError("lift: " + rep.detail);
  }
  const Index n = p.k0.op.cols();

  if (single_fidelity(p)) {
    return CompoundOperators(p.k0.op / p.k0.radius, Matrix(0, n), p.lambda0,
                             p.q, rank_tol);
  }

  Matrix r = Matrix::Zero(p.k0.op.rows(), 2 * n);
  r.leftCols(n) = p.k0.op / p.k0.radius;

  Matrix s = Matrix::Zero(p.k1.op.rows(), 2 * n);
  s.leftCols(n) = p.k1.op / p.k1.radius;
  s.rightCols(n) = -p.k1.op / p.k1.radius;

  Matrix lambda = Matrix::Zero(p.lambda0.rows() + p.lambda1.rows(), 2 * n);
  lambda.topLeftCorner(p.lambda0.rows(), n) = p.lambda0;
  lambda.bottomRightCorner(p.lambda1.rows(), n) = p.lambda1;

  Matrix q_tilde = Matrix::Zero(p.q.rows(), 2 * n);
  q_tilde.leftCols(n) = p.q;

  return CompoundOperators(std::move(r), std::move(s), std::move(lambda),
                           std::move(q_tilde), rank_tol);
}

Vector stack_observation(const Observation& y) {
  Vector out(y.y0.size() + y.y1.size());
  out.head(y.y0.size()) = y.y0;
  out.tail(y.y1.size()) = y.y1;
  return out;
}

}  // namespace orex
