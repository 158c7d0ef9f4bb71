#pragma once

#include <vector>

#include "orex/regpath.hpp"

namespace orex {

/// Chebyshev center of q_tilde({f : |Rf| <= 1, |Sf| <= 1, lambda f = y})
/// with a deterministic exactness certificate.
struct ChebyshevReport {
  Vector center;                  // q_tilde f^{tau*}
  double radius_sq_upper = 0.0;   // |q_tilde h^{tau*}|^2
  double tau_star = 0.0;
  double ortho_residual_r = 0.0;  // <R f, R h>
  double ortho_residual_s = 0.0;  // <S f, S h>
  bool exact = false;
  Vector witness_plus;            // f^{tau*} + h^{tau*}
  Vector witness_minus;           // f^{tau*} - h^{tau*}
  bool newton_converged = true;
  bool boundary_minimizer = false;
  bool one_ellipsoid = false;
  bool degenerate_eigenspace = false;
  std::vector<double> candidate_minima;  // disagreeing local grid minima
};

struct TauSolve {
  double tau = 0.0;
  bool newton_converged = true;
  bool at_boundary = false;
  std::vector<double> candidates;
};

/// Minimizer of |q_tilde h^tau|^2 over the clipped interval: safeguarded
/// Newton on F inside a sign-change bracket, golden-section fallback.
TauSolve solve_tau_star_detail(const CompoundOperators& ops, const Vector& y);
double solve_tau_star(const CompoundOperators& ops, const Vector& y);

/// Full report. Degenerate S (no rows or zero operator) reduces to the
/// one-hyperellipsoid formula with T = R, and symmetrically for R.
ChebyshevReport chebyshev_center(const CompoundOperators& ops, const Vector& y,
                                 double cert_tol = 1e-7);

/// Chebyshev center/radius of q_tilde({f : |Tf| <= 1, lambda f = y}).
struct OneEllipsoidResult {
  Vector center;
  double radius_sq = 0.0;
  Vector f_hat;
  Vector h_hat;
};
OneEllipsoidResult one_ellipsoid_center(const Matrix& t_op,
                                        const Matrix& lambda, const Vector& y,
                                        const Matrix& q_tilde);

/// Grid-refined value of the semidefinite relaxation; agrees with the
/// eigenvalue-path bound within about one percent. Cross-check oracle, not
/// the production path.
double sdp_value(const CompoundOperators& ops, const Vector& y);

/// Model- and data-consistent estimate whose local worst-case error is at
/// most twice the Chebyshev radius.
struct ConsistentEstimate {
  Vector f;
  double tau_bar = 0.5;
  double lwce_factor2_bound = 0.0;
};
ConsistentEstimate consistent_estimate(const CompoundOperators& ops,
                                       const Vector& y);

}  // namespace orex
