#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "orex/generators.hpp"
#include "orex/regpath.hpp"

using namespace orex;

namespace {

CompoundOperators disk_slice() {
  Matrix lambda(1, 2);
  lambda << 1.0, 0.0;
  return CompoundOperators(Matrix::Identity(2, 2), Matrix(0, 2), lambda,
                           Matrix::Identity(2, 2));
}

// Swap-symmetric instance: exchanging the two coordinates exchanges R and
// S and fixes lambda, so the path is symmetric about tau = 1/2.
CompoundOperators swap_symmetric() {
  Matrix r(1, 2), s(1, 2), lambda(1, 2);
  r << 1.0, 0.0;
  s << 0.0, 1.0;
  lambda << 1.0, 1.0;
  return CompoundOperators(r, s, lambda, Matrix::Identity(2, 2));
}

MultiFidelityProblem pinned_two_dim() {
  MultiFidelityProblem p;
  p.k0.op = Matrix::Identity(2, 2);
  p.k0.radius = 1.0;
  p.k1.op = Matrix::Identity(2, 2);
  p.k1.radius = 1.0;
  p.lambda0 = Matrix(1, 2);
  p.lambda0 << 1.0, 0.0;
  p.lambda1 = p.lambda0;
  p.q = Matrix::Identity(2, 2);
  return p;
}

}  // namespace

TEST_CASE("zero data gives the zero regularizer at every tau") {
  const CompoundOperators ops =
      gen::random_compound(4, 4, 4, 2, 3, /*seed=*/3);
  for (double tau : {0.1, 0.5, 0.9}) {
    CHECK(regularizer(ops, Vector::Zero(2), tau).norm() < 1e-14);
  }
}

TEST_CASE("fully constrained scalar problem is data-determined") {
  MultiFidelityProblem p;
  p.k0.op = Matrix::Identity(1, 1);
  p.k0.radius = 1.0;
  p.k1.op = Matrix::Identity(1, 1);
  p.k1.radius = 1.0;
  p.lambda0 = Matrix::Identity(1, 1);
  p.lambda1 = Matrix::Identity(1, 1);
  p.q = Matrix::Identity(1, 1);
  const CompoundOperators ops = lift(p);
  Vector y(2);
  y << 1.0, 1.0;
  for (double tau : {0.2, 0.5, 0.8}) {
    const Vector f = regularizer(ops, y, tau);
    CHECK(std::abs(f(0) - 1.0) < 1e-12);
    CHECK(std::abs(f(1) - 1.0) < 1e-12);
  }
}

TEST_CASE("two-dimensional quadratic solved by hand") {
  // minimize (1-tau)|f0|^2 + tau|f0-f1|^2 with first coordinates pinned to
  // one: the free second coordinates vanish at the optimum.
  const CompoundOperators ops = lift(pinned_two_dim());
  Vector y(2);
  y << 1.0, 1.0;
  for (double tau : {0.25, 0.5, 0.75}) {
    const Vector f = regularizer(ops, y, tau);
    CHECK(std::abs(f(0) - 1.0) < 1e-12);
    CHECK(std::abs(f(1)) < 1e-12);
    CHECK(std::abs(f(2) - 1.0) < 1e-12);
    CHECK(std::abs(f(3)) < 1e-12);
  }
}

TEST_CASE("regularizer satisfies both first-order invariants") {
  const CompoundOperators ops =
      gen::random_compound(6, 6, 5, 3, 2, /*seed=*/11);
  const Vector y = gen::consistent_compound_data(ops, 4);
  for (double tau : {0.15, 0.5, 0.85}) {
    const Vector f = regularizer(ops, y, tau);
    CHECK((ops.lambda() * f - y).norm() <= 1e-9 * (1.0 + y.norm()));
    const Matrix weighted = (1.0 - tau) * ops.r().transpose() * ops.r() +
                            tau * ops.s().transpose() * ops.s();
    CHECK((ops.kernel_basis().transpose() * (weighted * f)).norm() <= 1e-8);
  }
}

TEST_CASE("disk slice: unit eigenvalue and three-quarters radius") {
  const CompoundOperators ops = disk_slice();
  Vector y(1);
  y << 0.5;
  const RegPoint pt = eig_point(ops, y, 0.0);
  CHECK(pt.lambda_tau == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((ops.q_tilde() * pt.h_tau).squaredNorm() ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::abs(pt.f_tau(0) - 0.5) < 1e-12);
  CHECK(std::abs(pt.f_tau(1)) < 1e-12);
}

TEST_CASE("zero data: the normalization reduces to lambda itself") {
  const CompoundOperators ops =
      gen::random_compound(4, 4, 4, 2, 4, /*seed=*/17);
  const Vector y = Vector::Zero(2);
  for (double tau : {0.3, 0.6}) {
    const RegPoint pt = eig_point(ops, y, tau);
    CHECK(std::abs((ops.q_tilde() * pt.h_tau).squaredNorm() -
                   pt.lambda_tau) <= 1e-10 * std::max(1.0, pt.lambda_tau));
  }
}

TEST_CASE("path identities on a random two-ellipsoid instance") {
  const CompoundOperators ops =
      gen::random_compound(4, 4, 4, 2, 3, /*seed=*/23);
  const Vector y = gen::consistent_compound_data(ops, 5);
  for (double tau : {0.2, 0.45, 0.7}) {
    const RegPoint pt = eig_point(ops, y, tau);
    // |q h|^2 = (1 - G) / H.
    const double qh2 = (ops.q_tilde() * pt.h_tau).squaredNorm();
    CHECK(std::abs(qh2 - (1.0 - pt.g_val) / pt.h_val) <= 1e-8);
    // Normalization display.
    CHECK(std::abs(qh2 - pt.lambda_tau * (1.0 - pt.g_val)) <= 1e-8);
    // Eigen-residual in kernel coordinates.
    const Vector u = ops.kernel_basis().transpose() * pt.h_tau;
    const Matrix a_n = ops.q_kernel().transpose() * ops.q_kernel();
    const Matrix b_n =
        (1.0 - tau) * ops.r_kernel().transpose() * ops.r_kernel() +
        tau * ops.s_kernel().transpose() * ops.s_kernel();
    CHECK((a_n * u - pt.lambda_tau * (b_n * u)).norm() <=
          1e-8 * std::max(1.0, a_n.norm()));
  }
}

TEST_CASE("derivative formulas match central finite differences") {
  const CompoundOperators ops =
      gen::random_compound(5, 5, 4, 2, 5, /*seed=*/31, /*q_identity=*/true);
  const Vector y = gen::consistent_compound_data(ops, 6);
  const double delta = 1e-6;
  for (double tau : {0.25, 0.5, 0.65}) {
    const PathDerivatives d = derivatives(ops, y, tau);
    CHECK(d.f_prime_analytic);

    const RegPoint lo = eig_point(ops, y, tau - delta);
    const RegPoint hi = eig_point(ops, y, tau + delta);
    const double g_fd = (hi.g_val - lo.g_val) / (2.0 * delta);
    const double h_fd = (hi.h_val - lo.h_val) / (2.0 * delta);
    const double f_fd = (hi.f_val - lo.f_val) / (2.0 * delta);
    CHECK(std::abs(d.g_prime - g_fd) <=
          1e-4 * std::max({std::abs(g_fd), std::abs(d.g_prime), 1e-6}));
    CHECK(std::abs(d.h_prime - h_fd) <=
          1e-4 * std::max({std::abs(h_fd), std::abs(d.h_prime), 1e-6}));
    CHECK(std::abs(d.f_prime - f_fd) <=
          1e-4 * std::max({std::abs(f_fd), std::abs(d.f_prime), 1e-6}));

    // df/dtau against finite differences of the regularizer itself.
    const Vector df = regularizer_derivative(ops, y, tau);
    const Vector df_fd = (regularizer(ops, y, tau + delta) -
                          regularizer(ops, y, tau - delta)) /
                         (2.0 * delta);
    CHECK((df - df_fd).norm() <= 1e-4 * std::max(df_fd.norm(), 1e-6));
  }
}

TEST_CASE("general quantity of interest falls back to finite differences") {
  const CompoundOperators ops =
      gen::random_compound(5, 5, 4, 2, 3, /*seed=*/37);
  const Vector y = gen::consistent_compound_data(ops, 7);
  const PathDerivatives d = derivatives(ops, y, 0.4);
  CHECK_FALSE(d.f_prime_analytic);
  // Same derivative from a different step size.
  const double delta = 3e-6;
  const double f_fd = (eig_point(ops, y, 0.4 + delta).f_val -
                       eig_point(ops, y, 0.4 - delta).f_val) /
                      (2.0 * delta);
  CHECK(std::abs(d.f_prime - f_fd) <=
        1e-3 * std::max({std::abs(f_fd), std::abs(d.f_prime), 1e-6}));
}

TEST_CASE("swap symmetry forces the balance point to one half") {
  const CompoundOperators ops = swap_symmetric();
  Vector y(1);
  y << 1.0;
  const RegPoint pt = eig_point(ops, y, 0.5);
  CHECK(std::abs(pt.f_val) <= 1e-10);

  const BalancedPoint bal = balanced_regularizer(ops, y);
  CHECK(std::abs(bal.tau_bar - 0.5) <= 1e-8);
  CHECK(std::abs((ops.r() * bal.f).norm() - (ops.s() * bal.f).norm()) <=
        1e-8);
}

TEST_CASE("radius derivative identity d|qh|^2/dtau = F/H") {
  const CompoundOperators ops =
      gen::random_compound(4, 4, 4, 1, 4, /*seed=*/41);
  const Vector y = gen::consistent_compound_data(ops, 8);
  const double delta = 1e-6;
  for (double tau : {0.35, 0.6}) {
    const RegPoint pt = eig_point(ops, y, tau);
    const double lhs =
        ((ops.q_tilde() * eig_point(ops, y, tau + delta).h_tau).squaredNorm() -
         (ops.q_tilde() * eig_point(ops, y, tau - delta).h_tau).squaredNorm()) /
        (2.0 * delta);
    const double rhs = pt.f_val / pt.h_val;
    CHECK(std::abs(lhs - rhs) <=
          1e-4 * std::max({std::abs(lhs), std::abs(rhs), 1e-6}));
  }
}

TEST_CASE("two-sided secant bounds of G hold on sampled pairs") {
  const CompoundOperators ops =
      gen::random_compound(5, 5, 5, 2, 2, /*seed=*/43);
  const Vector y = gen::consistent_compound_data(ops, 9);
  const auto g_and_slope = [&](double tau) {
    const Vector f = regularizer(ops, y, tau);
    const double rf2 = (ops.r() * f).squaredNorm();
    const double sf2 = (ops.s() * f).squaredNorm();
    return std::make_pair((1.0 - tau) * rf2 + tau * sf2, sf2 - rf2);
  };
  const double taus[] = {0.1, 0.3, 0.55, 0.8};
  for (double tau : taus) {
    for (double sigma : taus) {
      if (sigma <= tau) continue;
      const auto [g_tau, slope_tau] = g_and_slope(tau);
      const auto [g_sigma, slope_sigma] = g_and_slope(sigma);
      const double gap = sigma - tau;
      CHECK(gap * slope_sigma <= g_sigma - g_tau + 1e-10);
      CHECK(g_sigma - g_tau <= gap * slope_tau + 1e-10);
    }
  }
}

TEST_CASE("data outside the model set raises inconsistent data") {
  const CompoundOperators ops = disk_slice();
  Vector y(1);
  y << 2.0;  // the slice misses the unit disk entirely
  CHECK_THROWS_AS(eig_point(ops, y, 0.3), InconsistentDataError);
}
