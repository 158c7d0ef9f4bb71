#include "orex/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orex {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) {
    throw InvalidInputError(std::string(what) + ": non-finite entries");
  }
}

void require_symmetric(const Matrix& m, const char* what, double tol = 1e-12) {
  if (m.rows() != m.cols()) {
    throw InvalidInputError(std::string(what) + ": matrix not square");
  }
  require_finite(m, what);
  if (m.size() == 0) return;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw InvalidInputError(std::string(what) + ": matrix not symmetric");
  }
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

Index numerical_rank(const Matrix& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * sv(0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

Matrix nullspace_basis(const Matrix& m, double tol) {
  if (tol <= 0.0) throw InvalidInputError("nullspace_basis: tol must be > 0");
  require_finite(m, "nullspace_basis");
  const Index n = m.cols();
  if (m.rows() == 0 || n == 0) return Matrix::Identity(n, n);

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * sv(0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

namespace {

Vector svd_min_norm(const Matrix& m, const Vector& y, double tol) {
  if (m.rows() != y.size()) {
    throw InvalidInputError("min_norm_solve: rhs length mismatch");
  }
  if (m.rows() == 0) return Vector::Zero(m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? tol * sv(0) : 0.0;
  Vector coeffs = svd.matrixU().transpose() * y;
  for (Index i = 0; i < sv.size(); ++i) {
    coeffs(i) = sv(i) > cutoff ? coeffs(i) / sv(i) : 0.0;
  }
  return svd.matrixV() * coeffs;
}

}  // namespace

Vector least_squares_min_norm(const Matrix& m, const Vector& y, double tol) {
  require_finite(m, "least_squares_min_norm");
  return svd_min_norm(m, y, tol);
}

Vector min_norm_solve(const Matrix& m, const Vector& y, double tol) {
  require_finite(m, "min_norm_solve");
  if (!y.allFinite()) {
    throw InvalidInputError("min_norm_solve: non-finite rhs");
  }
  Vector x = svd_min_norm(m, y, tol);
  const double residual = (m * x - y).norm();
  if (residual > 1e-10 * (1.0 + y.norm())) {
    throw InconsistentDataError("min_norm_solve: rhs outside range, residual " +
                                std::to_string(residual));
  }
  return x;
}

GenEigDecomposition gen_eig_sym(const Matrix& a, const Matrix& b,
                                double pd_tol) {
  require_symmetric(a, "gen_eig_sym: A");
  require_symmetric(b, "gen_eig_sym: B");
  if (a.rows() != b.rows()) {
    throw InvalidInputError("gen_eig_sym: dimension mismatch");
  }
  const Index k = a.rows();
  if (k == 0) return {Vector(0), Matrix(0, 0)};

  const double b_scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (min_eig_sym(b) <= pd_tol * b_scale) {
    throw ModelDegeneracyError("gen_eig_sym: B is numerically singular");
  }
  Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) {
    throw ModelDegeneracyError("gen_eig_sym: Cholesky of B failed");
  }
  const Matrix l = llt.matrixL();
  // C = L^{-1} A L^{-T}, kept symmetric explicitly.
  Matrix c = l.triangularView<Eigen::Lower>().solve(a);
  c = l.triangularView<Eigen::Lower>().solve(Matrix(c.transpose()));
  c = 0.5 * (c + c.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  if (es.info() != Eigen::Success) {
    throw Error("gen_eig_sym: eigensolver failed");
  }
  GenEigDecomposition out;
  out.values = es.eigenvalues();
  out.vectors = Matrix(k, k);
  for (Index i = 0; i < k; ++i) {
    Vector v = l.transpose().triangularView<Eigen::Upper>().solve(
        es.eigenvectors().col(i));
    out.vectors.col(i) = v / v.norm();
  }
  return out;
}

EigPair gen_eig_max(const Matrix& a, const Matrix& b, double pd_tol) {
  GenEigDecomposition full = gen_eig_sym(a, b, pd_tol);
  if (full.values.size() == 0) {
    throw InvalidInputError("gen_eig_max: empty pencil");
  }
  const Index last = full.values.size() - 1;
  return {full.values(last), full.vectors.col(last)};
}

GenEigTop gen_eig_top_factors(const Matrix& a_factor, const Matrix& b_factor,
                              double rank_tol) {
  const Index k = b_factor.cols();
  if (a_factor.cols() != k) {
    throw InvalidInputError("gen_eig_max_factors: column counts disagree");
  }
  if (k == 0) throw InvalidInputError("gen_eig_max_factors: empty pencil");
  require_finite(a_factor, "gen_eig_max_factors: A factor");
  require_finite(b_factor, "gen_eig_max_factors: B factor");
  if (b_factor.rows() < k) {
    throw ModelDegeneracyError("gen_eig_max_factors: B factor is singular");
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(b_factor);
  const Matrix r_full = qr.matrixR().topLeftCorner(k, k);
  if (std::abs(r_full(k - 1, k - 1)) <=
      rank_tol * std::abs(r_full(0, 0))) {
    throw ModelDegeneracyError("gen_eig_max_factors: B factor is singular");
  }

  // M = a_factor P R^{-1}; the top generalized pair is the top singular
  // pair of M mapped back through the whitening.
  Matrix m = a_factor * qr.colsPermutation();
  r_full.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(m);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
  const double sigma = svd.singularValues()(0);
  Vector w = svd.matrixV().col(0);
  Vector v = qr.colsPermutation() *
             r_full.triangularView<Eigen::Upper>().solve(w);
  v.normalize();

  GenEigTop out;
  out.value = sigma * sigma;
  out.vector = std::move(v);
  if (svd.singularValues().size() > 1) {
    out.second_value = svd.singularValues()(1) * svd.singularValues()(1);
  } else {
    // Missing singular values of a wide pencil are zeros.
    out.second_value = k > 1 ? 0.0
                             : -std::numeric_limits<double>::infinity();
  }
  return out;
}

EigPair gen_eig_max_factors(const Matrix& a_factor, const Matrix& b_factor,
                            double rank_tol) {
  GenEigTop top = gen_eig_top_factors(a_factor, b_factor, rank_tol);
  return {top.value, std::move(top.vector)};
}

double min_eig_sym(const Matrix& a) {
  require_symmetric(a, "min_eig_sym");
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error("min_eig_sym: eigensolver failed");
  }
  return es.eigenvalues()(0);
}

}  // namespace orex
