#include "orex/regpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orex {

namespace {

// Stacked weighted operator [sqrt(wr) R; sqrt(ws) S] applied to the kernel
// basis and to a vector.
Matrix stacked_kernel(const CompoundOperators& ops, double wr, double ws) {
  const Index pr = ops.r_kernel().rows();
  const Index ps = ops.s_kernel().rows();
  Matrix out(pr + ps, ops.kernel_dim());
  out.topRows(pr) = std::sqrt(wr) * ops.r_kernel();
  out.bottomRows(ps) = std::sqrt(ws) * ops.s_kernel();
  return out;
}

Vector stacked_apply(const CompoundOperators& ops, double wr, double ws,
                     const Vector& f) {
  const Index pr = ops.r().rows();
  const Index ps = ops.s().rows();
  Vector out(pr + ps);
  out.head(pr) = std::sqrt(wr) * (ops.r() * f);
  out.tail(ps) = std::sqrt(ws) * (ops.s() * f);
  return out;
}

// Symmetric kernel-restricted matrix (1-tau) Rn^T Rn + tau Sn^T Sn.
Matrix kernel_gram(const CompoundOperators& ops, double wr, double ws) {
  return wr * ops.r_kernel().transpose() * ops.r_kernel() +
         ws * ops.s_kernel().transpose() * ops.s_kernel();
}

}  // namespace

Vector regularizer_from_anchor(const CompoundOperators& ops,
                               const Vector& anchor, double wr, double ws) {
  if (!(wr >= 0.0) || !(ws >= 0.0)) {
    throw InvalidInputError("regularizer: weights must be nonnegative");
  }
  if (ops.kernel_dim() == 0) return anchor;

  const Matrix wn = stacked_kernel(ops, wr, ws);
  Eigen::ColPivHouseholderQR<Matrix> qr(wn);
  if (qr.rank() < ops.kernel_dim()) {
    if (wr == 0.0 || ws == 0.0) {
      throw EndpointDegenerateError(
          "regularizer: singular kernel matrix at an endpoint weight");
    }
    throw ModelDegeneracyError(
        "regularizer: kernel-restricted matrix is singular");
  }
  const Vector rhs = -stacked_apply(ops, wr, ws, anchor);
  const Vector u = qr.solve(rhs);
  return anchor + ops.kernel_basis() * u;
}

Vector regularizer_weighted(const CompoundOperators& ops, const Vector& y,
                            double wr, double ws) {
  return regularizer_from_anchor(ops, ops.min_norm_data(y), wr, ws);
}

Vector regularizer(const CompoundOperators& ops, const Vector& y, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw InvalidInputError("regularizer: tau must lie in [0, 1]");
  }
  return regularizer_weighted(ops, y, 1.0 - tau, tau);
}

Vector regularizer_derivative(const CompoundOperators& ops, const Vector& y,
                              double tau) {
  const Vector f = regularizer(ops, y, tau);
  if (ops.kernel_dim() == 0) return Vector::Zero(ops.dim());
  const Matrix gram = kernel_gram(ops, 1.0 - tau, tau);
  const Vector rhs = ops.r_kernel().transpose() * (ops.r() * f) -
                     ops.s_kernel().transpose() * (ops.s() * f);
  const Vector u = gram.ldlt().solve(rhs);
  return ops.kernel_basis() * u;
}

RegPoint eig_point(const CompoundOperators& ops, const Vector& y, double tau) {
  RegPoint pt;
  pt.tau = tau;
  pt.f_tau = regularizer(ops, y, tau);

  const double rf2 = (ops.r() * pt.f_tau).squaredNorm();
  const double sf2 = (ops.s() * pt.f_tau).squaredNorm();
  pt.g_val = (1.0 - tau) * rf2 + tau * sf2;

  const double feas_tol = 1e-8 * std::max(1.0, pt.g_val);
  if (pt.g_val > 1.0 + feas_tol) {
    throw InconsistentDataError(
        "eig_point: data lie outside the model set (g = " +
        std::to_string(pt.g_val) + ")");
  }

  const Index k = ops.kernel_dim();
  if (k == 0) {
    pt.lambda_tau = 0.0;
    pt.h_tau = Vector::Zero(ops.dim());
    pt.h_val = std::numeric_limits<double>::infinity();
    pt.f_val = rf2 - sf2;
    return pt;
  }

  const Matrix w_n = stacked_kernel(ops, 1.0 - tau, tau);
  const GenEigTop top = gen_eig_top_factors(ops.q_kernel(), w_n);
  const double lambda = top.value;
  pt.lambda_tau = lambda;
  pt.h_val = lambda > 0.0 ? 1.0 / lambda
                          : std::numeric_limits<double>::infinity();
  if (k >= 2) {
    const double gap = lambda - top.second_value;
    pt.degenerate_eigenspace = gap < 1e-8 * std::max(std::abs(lambda), 1e-300);
  }

  // Scale the eigenvector to |q_tilde h|^2 = lambda (1 - g); the slack is
  // clamped to zero when the data sit on the model boundary.
  const double slack = std::max(0.0, 1.0 - pt.g_val);
  const Vector& u = top.vector;
  const double qh2 = (ops.q_kernel() * u).squaredNorm();
  if (lambda * slack <= 0.0 || qh2 <= 0.0) {
    pt.h_tau = Vector::Zero(ops.dim());
  } else {
    pt.h_tau = std::sqrt(lambda * slack / qh2) * (ops.kernel_basis() * u);
  }

  const double rh2 = (ops.r() * pt.h_tau).squaredNorm();
  const double sh2 = (ops.s() * pt.h_tau).squaredNorm();
  pt.f_val = (rf2 + rh2) - (sf2 + sh2);
  return pt;
}

namespace {

bool q_tilde_is_identity(const CompoundOperators& ops) {
  if (ops.q_tilde().rows() != ops.dim()) return false;
  return (ops.q_tilde() - Matrix::Identity(ops.dim(), ops.dim()))
             .cwiseAbs()
             .maxCoeff() < 1e-14;
}

double f_value(const CompoundOperators& ops, const Vector& y, double tau) {
  return eig_point(ops, y, tau).f_val;
}

}  // namespace

PathDerivatives derivatives(const CompoundOperators& ops, const Vector& y,
                            double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidInputError("derivatives: tau must lie in (0, 1)");
  }
  const RegPoint pt = eig_point(ops, y, tau);

  PathDerivatives out;
  const double rf2 = (ops.r() * pt.f_tau).squaredNorm();
  const double sf2 = (ops.s() * pt.f_tau).squaredNorm();
  out.g_prime = sf2 - rf2;

  const double qh2 = (ops.q_tilde() * pt.h_tau).squaredNorm();
  const double rh2 = (ops.r() * pt.h_tau).squaredNorm();
  const double sh2 = (ops.s() * pt.h_tau).squaredNorm();
  out.h_prime = qh2 > 0.0 ? (sh2 - rh2) / qh2 : 0.0;

  const Index k = ops.kernel_dim();
  if (q_tilde_is_identity(ops) && k > 0 && !pt.degenerate_eigenspace &&
      qh2 > 0.0) {
    // alpha = <(R*R - S*S) f, df/dtau>.
    const Vector df = regularizer_derivative(ops, y, tau);
    const double alpha = (ops.r() * pt.f_tau).dot(ops.r() * df) -
                         (ops.s() * pt.f_tau).dot(ops.s() * df);

    // With q_tilde = Id the pencil reduces to B u = H u on kernel
    // coordinates; the h-term of F' follows from first-order eigenvector
    // perturbation of the minimal eigenpair of B.
    const Matrix b_n = kernel_gram(ops, 1.0 - tau, tau);
    Eigen::SelfAdjointEigenSolver<Matrix> es(b_n);
    const double h_eig = es.eigenvalues()(0);
    const Vector u_hat = es.eigenvectors().col(0);
    const Matrix b_prime = ops.s_kernel().transpose() * ops.s_kernel() -
                           ops.r_kernel().transpose() * ops.r_kernel();
    const Vector bpu = b_prime * u_hat;
    const double h_prime_eig = u_hat.dot(bpu);

    // gamma = <B'u, (H I - B)^+ B'u> over the complement of u_hat.
    double gamma = 0.0;
    for (Index i = 1; i < k; ++i) {
      const double denom = h_eig - es.eigenvalues()(i);
      const double proj = es.eigenvectors().col(i).dot(bpu);
      gamma += proj * proj / denom;
    }

    const double nu = pt.h_tau.squaredNorm();        // |h|^2 = |q h|^2
    const double nu_prime = pt.f_val / pt.h_val;     // d|q h|^2/dtau = F/H
    const double beta = -0.5 * nu_prime * h_prime_eig - nu * gamma;
    out.f_prime = 2.0 * (alpha + beta);
    out.f_prime_analytic = true;
  } else {
    const double step = 1e-6;
    const double lo = std::max(tau - step, 1e-9);
    const double hi = std::min(tau + step, 1.0 - 1e-9);
    out.f_prime = (f_value(ops, y, hi) - f_value(ops, y, lo)) / (hi - lo);
    out.f_prime_analytic = false;
  }
  return out;
}

BalancedPoint balanced_regularizer(const CompoundOperators& ops,
                                   const Vector& y) {
  const auto g_prime = [&](double tau) {
    const Vector f = regularizer(ops, y, tau);
    return (ops.s() * f).squaredNorm() - (ops.r() * f).squaredNorm();
  };

  double lo = kTauClip;
  double hi = 1.0 - kTauClip;
  const double at_lo = g_prime(lo);
  const double at_hi = g_prime(hi);

  BalancedPoint out;
  // G' is nonincreasing; no crossing means an endpoint balances best.
  if (at_lo <= 0.0) {
    out.tau_bar = lo;
  } else if (at_hi >= 0.0) {
    out.tau_bar = hi;
  } else {
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (g_prime(mid) >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.tau_bar = 0.5 * (lo + hi);
  }
  out.f = regularizer(ops, y, out.tau_bar);
  return out;
}

}  // namespace orex
