#pragma once

#include "orex/model.hpp"

namespace orex {

/// One point of the regularization path.
struct RegPoint {
  double tau = 0.0;
  Vector f_tau;             // constrained minimizer, data-consistent
  double lambda_tau = 0.0;  // largest pencil eigenvalue
  Vector h_tau;             // scaled leading eigenvector, lies in ker(lambda)
  double g_val = 0.0;       // (1-tau)|R f|^2 + tau|S f|^2
  double h_val = 0.0;       // 1 / lambda_tau
  double f_val = 0.0;       // (|Rf|^2+|Rh|^2) - (|Sf|^2+|Sh|^2)
  bool degenerate_eigenspace = false;
};

struct PathDerivatives {
  double g_prime = 0.0;
  double h_prime = 0.0;
  double f_prime = 0.0;
  bool f_prime_analytic = false;  // false: central finite differences
};

/// Constrained regularizer f^tau = argmin (1-tau)|Rf|^2 + tau|Sf|^2
/// subject to lambda f = y. Throws EndpointDegenerateError when the
/// kernel-restricted matrix is singular at tau in {0, 1}.
Vector regularizer(const CompoundOperators& ops, const Vector& y, double tau);

/// Same minimizer under general nonnegative weights wr|Rf|^2 + ws|Sf|^2.
Vector regularizer_weighted(const CompoundOperators& ops, const Vector& y,
                            double wr, double ws);

/// Weighted regularizer anchored at an arbitrary data-consistent point
/// (used to materialize linear maps column by column).
Vector regularizer_from_anchor(const CompoundOperators& ops,
                               const Vector& anchor, double wr, double ws);

/// d f^tau / d tau at fixed data.
Vector regularizer_derivative(const CompoundOperators& ops, const Vector& y,
                              double tau);

/// Full path point: regularizer, pencil eigenpair and the scalar values
/// G, H, F. Throws InconsistentDataError when the data lie outside the
/// model set (g_val > 1).
RegPoint eig_point(const CompoundOperators& ops, const Vector& y, double tau);

/// G', H' from their closed forms; F' analytically when q_tilde is the
/// identity on the compound space, otherwise by central finite differences
/// with step 1e-6.
PathDerivatives derivatives(const CompoundOperators& ops, const Vector& y,
                            double tau);

/// Balanced point |R f^tau| = |S f^tau| found by bisection on G'
/// (an endpoint when there is no crossing). Model- and data-consistent
/// whenever the feasible set is nonempty with margin.
struct BalancedPoint {
  Vector f;
  double tau_bar = 0.5;
};
BalancedPoint balanced_regularizer(const CompoundOperators& ops,
                                   const Vector& y);

/// Endpoint clip used throughout the path machinery.
inline constexpr double kTauClip = 1e-6;

}  // namespace orex
