#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "orex/functional.hpp"
#include "orex/lp.hpp"

using namespace orex;
using functional::ApproximabilityLevel;
using functional::EstimatorWeights;
using functional::FunctionalTarget;

namespace {

// Monomial basis values 1, x, ..., x^{n-1} at the given points.
Matrix monomials(Index degree_plus_one, const std::vector<double>& points) {
  Matrix m(degree_plus_one, static_cast<Index>(points.size()));
  for (Index j = 0; j < degree_plus_one; ++j) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      m(j, static_cast<Index>(i)) = std::pow(points[i], double(j));
    }
  }
  return m;
}

Vector monomial_target(Index degree_plus_one, double x) {
  Vector b(degree_plus_one);
  for (Index j = 0; j < degree_plus_one; ++j) b(j) = std::pow(x, double(j));
  return b;
}

ApproximabilityLevel level_of(const Matrix& basis_eval, double epsilon,
                              Index m_t) {
  ApproximabilityLevel level;
  level.basis_eval = basis_eval;
  level.epsilon = epsilon;
  level.m_t = m_t;
  return level;
}

Index nnz(const Vector& v, double tol = 1e-12) {
  Index count = 0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("assemble packages the basis evaluations") {
  SUBCASE("constant basis on two points") {
    const auto sys = functional::assemble(
        {level_of(monomials(1, {0.0, 1.0}), 0.1, 2)},
        {monomial_target(1, 0.5)});
    REQUIRE(sys.m.size() == 1);
    CHECK(sys.m[0](0, 0) == doctest::Approx(1.0));
    CHECK(sys.m[0](0, 1) == doctest::Approx(1.0));
    CHECK(sys.b(0) == doctest::Approx(1.0));
  }

  SUBCASE("affine basis carries the target point") {
    const auto sys = functional::assemble(
        {level_of(monomials(2, {0.0, 1.0}), 0.1, 2)},
        {monomial_target(2, 0.5)});
    CHECK(sys.m[0](1, 0) == doctest::Approx(0.0));
    CHECK(sys.m[0](1, 1) == doctest::Approx(1.0));
    CHECK(sys.b(1) == doctest::Approx(0.5));
  }

  SUBCASE("second level sees only its own tail of points") {
    const auto sys = functional::assemble(
        {level_of(monomials(1, {0.0, 1.0, 0.25, 0.75}), 0.1, 2),
         level_of(monomials(1, {0.25, 0.75}), 0.4, 2)},
        {monomial_target(1, 0.5)});
    REQUIRE(sys.m.size() == 2);
    CHECK(sys.m[1].rows() == 1);
    CHECK(sys.m[1].cols() == 2);
    CHECK(sys.m[1](0, 0) == doctest::Approx(1.0));
  }

  SUBCASE("rank-deficient level-0 basis is rejected") {
    // Two constant-like rows evaluated at a single point cannot be
    // separated: n0 = 2 > m0 = 1.
    CHECK_THROWS_AS(
        functional::assemble({level_of(monomials(2, {0.3}), 0.1, 1)},
                             {monomial_target(2, 0.5)}),
        ModelDegeneracyError);
  }
}

TEST_CASE("constant basis at midpoint: unit weights, gwce 0.2") {
  const std::vector<ApproximabilityLevel> levels = {
      level_of(monomials(1, {0.0, 1.0}), 0.1, 2)};
  const FunctionalTarget target{monomial_target(1, 0.5)};
  const EstimatorWeights w = functional::estimate_weights(levels, target);
  CHECK(w.a[0].lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.objective == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(w.gwce == doctest::Approx(0.2).epsilon(1e-10));

  // Independent oracle: vertex enumeration of min |a|_1 s.t. a1 + a2 = 1.
  // Vertices of the split program are a = e1 and a = e2, both of value 1.
  lp::StandardLP split;
  split.cost = Vector::Ones(4);
  split.constraint_matrix = Matrix(1, 4);
  split.constraint_matrix << 1.0, 1.0, -1.0, -1.0;
  split.rhs = Vector::Ones(1);
  const lp::Solution oracle = lp::solve_lp(split);
  CHECK(w.a[0].lpNorm<1>() ==
        doctest::Approx(oracle.value).epsilon(1e-10));
}

TEST_CASE("interpolation at a sampled point costs at most one") {
  const std::vector<ApproximabilityLevel> levels = {
      level_of(monomials(1, {0.0, 1.0}), 0.1, 2)};
  const FunctionalTarget target{monomial_target(1, 0.0)};  // equals a sample
  const EstimatorWeights w = functional::estimate_weights(levels, target);
  CHECK(w.a[0].lpNorm<1>() <= 1.0 + 1e-9);
}

TEST_CASE("worthless low fidelity collapses to the single level") {
  const std::vector<double> points = {0.0, 0.4, 1.0};
  const std::vector<double> all_points = {0.0, 0.4, 1.0, 0.0, 0.4, 1.0};
  const std::vector<ApproximabilityLevel> two = {
      level_of(monomials(2, all_points), 0.1, 3),
      level_of(monomials(1, points), 1e5, 3)};
  const FunctionalTarget target{monomial_target(2, 0.7)};
  const EstimatorWeights w2 = functional::estimate_weights(two, target);

  const std::vector<ApproximabilityLevel> one = {
      level_of(monomials(2, points), 0.1, 3)};
  const EstimatorWeights w1 = functional::estimate_weights(one, target);

  CHECK(std::abs(w2.objective - w1.objective) <= 1e-8);
  CHECK(w2.a[1].lpNorm<1>() <= 1e-10);
}

TEST_CASE("sparsify keeps the objective and thins level 0") {
  SUBCASE("single constant constraint leaves one nonzero") {
    const std::vector<ApproximabilityLevel> levels = {
        level_of(monomials(1, {0.0, 0.2, 0.5, 0.8, 1.0}), 0.1, 5)};
    const FunctionalTarget target{monomial_target(1, 0.3)};
    const EstimatorWeights w = functional::estimate_weights(levels, target);
    const EstimatorWeights sparse =
        functional::sparsify_level0(w, levels, target);
    CHECK(nnz(sparse.a[0]) <= 1);
    CHECK(sparse.objective == doctest::Approx(w.objective).epsilon(1e-9));
  }

  SUBCASE("random instances stay within the dimension bound") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 12; ++rep) {
      std::vector<double> points(6);
      for (double& x : points) x = unif(rng);
      const std::vector<ApproximabilityLevel> levels = {
          level_of(monomials(2, points), 0.2, 6)};
      const FunctionalTarget target{monomial_target(2, unif(rng))};
      const EstimatorWeights w = functional::estimate_weights(levels, target);
      const EstimatorWeights sparse =
          functional::sparsify_level0(w, levels, target);
      CHECK(nnz(sparse.a[0]) <= 2);
      CHECK(std::abs(sparse.gwce - w.gwce) <= 1e-9 * (1.0 + w.gwce));
    }
  }
}

TEST_CASE("apply") {
  EstimatorWeights w;
  w.a = {Vector::Zero(3)};
  CHECK(functional::apply(w, Vector::Ones(3)) == doctest::Approx(0.0));

  w.a = {Vector::Unit(3, 0)};
  Vector y(3);
  y << 3.0, -1.0, 5.0;
  CHECK(functional::apply(w, y) == doctest::Approx(3.0));

  CHECK_THROWS_AS(functional::apply(w, Vector::Ones(2)), InvalidInputError);
}

TEST_CASE("estimator reproduces V0 elements exactly") {
  const std::vector<double> pts0 = {0.0, 0.3, 0.6, 1.0, 0.2, 0.9};
  const std::vector<double> pts1 = {0.2, 0.9};
  const std::vector<ApproximabilityLevel> levels = {
      level_of(monomials(3, pts0), 0.1, 4),
      level_of(monomials(2, pts1), 0.5, 2)};
  const FunctionalTarget target{monomial_target(3, 0.45)};
  const EstimatorWeights w = functional::estimate_weights(levels, target);

  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    Vector coeff(3);
    for (Index i = 0; i < 3; ++i) coeff(i) = gauss(rng);
    // All fidelities equal to the same V0 element.
    Vector y(6);
    for (Index i = 0; i < 6; ++i) {
      const double x = pts0[static_cast<std::size_t>(i)];
      y(i) = coeff(0) + coeff(1) * x + coeff(2) * x * x;
    }
    const double truth = coeff.dot(monomial_target(3, 0.45));
    CHECK(std::abs(functional::apply(w, y) - truth) <= 1e-9);
  }
}

TEST_CASE("gwce is monotone in every epsilon") {
  const std::vector<double> pts0 = {0.0, 0.5, 1.0, 0.25, 0.75};
  const std::vector<double> pts1 = {0.25, 0.75};
  const std::vector<ApproximabilityLevel> base = {
      level_of(monomials(2, pts0), 0.1, 3),
      level_of(monomials(1, pts1), 0.3, 2)};
  const FunctionalTarget target{monomial_target(2, 0.4)};
  const double gwce = functional::estimate_weights(base, target).gwce;

  for (std::size_t t = 0; t < base.size(); ++t) {
    auto scaled = base;
    scaled[t].epsilon *= 1.5;
    CHECK(functional::estimate_weights(scaled, target).gwce >= gwce - 1e-9);
  }
}

TEST_CASE("duality gap of the underlying program is certified") {
  const std::vector<double> pts = {0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<ApproximabilityLevel> levels = {
      level_of(monomials(2, pts), 0.2, 5)};
  const FunctionalTarget target{monomial_target(2, 0.6)};
  const EstimatorWeights w = functional::estimate_weights(levels, target);

  // Rebuild the split LP and read a dual bound from its multipliers.
  lp::StandardLP split;
  const Matrix m = monomials(2, pts);
  split.constraint_matrix = Matrix(2, 10);
  split.constraint_matrix.leftCols(5) = m;
  split.constraint_matrix.rightCols(5) = -m;
  split.rhs = monomial_target(2, 0.6);
  split.cost = Vector::Constant(10, 0.2);
  const lp::Solution sol = lp::solve_lp(split);
  REQUIRE(sol.status == lp::Status::optimal);
  const double dual_bound = split.rhs.dot(sol.dual);
  CHECK(w.objective - dual_bound <= 1e-8);
  CHECK(std::abs(sol.value - w.objective) <= 1e-9);
}

TEST_CASE("sampled worst case stays under the reported gwce") {
  const std::vector<double> pts = {0.0, 0.2, 0.5, 0.8, 1.0};
  const std::vector<ApproximabilityLevel> levels = {
      level_of(monomials(2, pts), 0.15, 5)};
  const FunctionalTarget target{monomial_target(2, 0.35)};
  const EstimatorWeights w = functional::estimate_weights(levels, target);

  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 4000; ++rep) {
    Vector coeff(2);
    coeff << gauss(rng), gauss(rng);
    Vector y(5);
    for (Index i = 0; i < 5; ++i) {
      const double x = pts[static_cast<std::size_t>(i)];
      y(i) = coeff(0) + coeff(1) * x + 0.15 * unif(rng);
    }
    const double truth =
        coeff(0) + coeff(1) * 0.35 + 0.15 * unif(rng);
    worst = std::max(worst, std::abs(functional::apply(w, y) - truth));
  }
  CHECK(worst <= w.gwce + 1e-8);
}
