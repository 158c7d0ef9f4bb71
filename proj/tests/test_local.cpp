#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "orex/generators.hpp"
#include "orex/global.hpp"
#include "orex/local.hpp"

using namespace orex;

namespace {

MultiFidelityProblem uncertified_instance(std::uint64_t seed) {
  MultiFidelityProblem p;
  p.k0.op = gen::random_operator(4, 4, seed * 13 + 1);
  p.k0.radius = 1.0;
  p.k1.op = gen::random_operator(4, 4, seed * 13 + 2);
  p.k1.radius = 0.8;
  p.lambda0 = gen::random_operator(2, 4, seed * 13 + 3);
  p.lambda1 = gen::random_operator(2, 4, seed * 13 + 4);  // unrelated rows
  p.q = gen::random_operator(2, 4, seed * 13 + 5);
  return p;
}

}  // namespace

TEST_CASE("digital twins certify on random instances") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const MultiFidelityProblem p = gen::digital_twin({.n = 5,
                                                      .m0 = 3,
                                                      .m1 = 2,
                                                      .z = 2,
                                                      .eps0 = 1.0,
                                                      .eps1 = 0.6,
                                                      .seed = seed});
    const Observation y = gen::consistent_data(p, seed + 100, 0.85);
    const LocalReport rep = local_recover(p, y);
    CHECK(rep.kernel_case == KernelCase::ker_in_lambda1);
    CHECK(rep.certified);
  }
}

TEST_CASE("zero data: zero estimate and agreement with the global bound") {
  const MultiFidelityProblem p = gen::digital_twin(
      {.n = 4, .m0 = 2, .m1 = 1, .z = 2, .eps0 = 1.0, .eps1 = 0.5, .seed = 2});
  Observation zero;
  zero.y0 = Vector::Zero(2);
  zero.y1 = Vector::Zero(1);
  const LocalReport rep = local_recover(p, zero);
  CHECK(rep.estimate.norm() <= 1e-12);

  const GlobalSolution global = solve_global(p);
  CHECK(std::abs(rep.radius * rep.radius - global.gwce_sq) <=
        1e-7 * (1.0 + global.gwce_sq));
}

TEST_CASE("certified radius matches the sampling oracle within 5 percent") {
  const MultiFidelityProblem p = gen::digital_twin(
      {.n = 2, .m0 = 1, .m1 = 1, .z = 2, .eps0 = 1.0, .eps1 = 0.7, .seed = 5});
  const Observation y = gen::consistent_data(p, 7, 0.8);
  const RadiusBound bound = local_radius_bound(p, y, {100000, 3});
  CHECK(bound.lower <= bound.upper + 1e-7);
  CHECK(bound.lower >= 0.95 * bound.upper);
}

TEST_CASE("local sdp data") {
  const MultiFidelityProblem p = gen::digital_twin(
      {.n = 4, .m0 = 2, .m1 = 1, .z = 2, .eps0 = 1.1, .eps1 = 0.4, .seed = 9});

  SUBCASE("zero data zeroes the border terms") {
    Observation zero;
    zero.y0 = Vector::Zero(2);
    zero.y1 = Vector::Zero(1);
    const LocalSdp sdp = assemble_local_sdp(p, zero);
    CHECK(sdp.u0.norm() == doctest::Approx(0.0));
    CHECK(sdp.u1.norm() == doctest::Approx(0.0));
    CHECK(sdp.w_c0.norm() == doctest::Approx(0.0));
    CHECK(sdp.const0 == doctest::Approx(p.k0.radius * p.k0.radius));
  }

  SUBCASE("no low-fidelity data keeps u1 meaningful") {
    MultiFidelityProblem q = p;
    q.lambda1 = Matrix(0, 4);
    Observation y;
    y.y0 = gen::consistent_data(q, 13, 0.6).y0;
    y.y1 = Vector(0);
    const LocalSdp sdp = assemble_local_sdp(q, y);
    const Vector expect = q.k1.op * min_norm_solve(q.lambda0, y.y0);
    CHECK((sdp.u1 - expect).norm() <= 1e-12);
  }

  SUBCASE("grid-solved optimum matches the certified radius") {
    const Observation y = gen::consistent_data(p, 15, 0.85);
    const LocalReport rep = local_recover(p, y);
    REQUIRE(rep.certified);
    const LocalSdpSolve sdp = solve_local_sdp(assemble_local_sdp(p, y));
    const double radius_sq = rep.radius * rep.radius;
    CHECK(std::abs(sdp.value - radius_sq) <=
          0.01 * std::max(radius_sq, 1e-12));
  }
}

TEST_CASE("radius bounds enclose and report honest gaps") {
  SUBCASE("certified instances close the gap") {
    const MultiFidelityProblem p = gen::digital_twin({.n = 4,
                                                      .m0 = 2,
                                                      .m1 = 2,
                                                      .z = 2,
                                                      .eps0 = 1.0,
                                                      .eps1 = 0.6,
                                                      .seed = 21});
    const Observation y = gen::consistent_data(p, 22, 0.8);
    const RadiusBound bound = local_radius_bound(p, y, {2000, 5});
    // The witness pair alone closes the gap; sampling cannot overshoot.
    CHECK(bound.lower >= bound.upper - 1e-7);
    CHECK(bound.lower <= bound.upper + 1e-7);
  }

  SUBCASE("uncertified instances may leave a gap but never invert") {
    const MultiFidelityProblem p = uncertified_instance(1);
    REQUIRE(validate(p).kernel_case == KernelCase::none);
    const Observation y = gen::consistent_data(p, 3, 0.5);
    const RadiusBound bound = local_radius_bound(p, y, {20000, 11});
    CHECK(bound.lower <= bound.upper + 1e-7);
  }
}

TEST_CASE("certified orthogonality holds along the whole path") {
  const MultiFidelityProblem p = gen::digital_twin(
      {.n = 5, .m0 = 2, .m1 = 2, .z = 2, .eps0 = 1.0, .eps1 = 0.5, .seed = 25});
  const Observation y = gen::consistent_data(p, 26, 0.8);
  const CompoundOperators ops = lift(p);
  const Vector data = stack_observation(y);
  const Matrix h0 = nullspace_basis(p.lambda0);
  const Matrix h1 = nullspace_basis(p.lambda1);
  const Index n = p.k0.op.cols();
  const double e0_sq = p.k0.radius * p.k0.radius;
  const double e1_sq = p.k1.radius * p.k1.radius;

  for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const Vector f = regularizer(ops, data, tau);
    const Vector f0 = f.head(n);
    const Vector f1 = f.tail(n);
    const Vector p0f0 = p.k0.op * f0;
    const Vector p1_bias = p.k1.op * (f0 - f1);

    for (Index j = 0; j < h0.cols(); ++j) {
      const Vector dir = h0.col(j);
      // First displayed identity, then its two decoupled pieces.
      const double iden1 =
          (1.0 - tau) / e0_sq * p0f0.dot(p.k0.op * dir) +
          tau / e1_sq * p1_bias.dot(p.k1.op * dir);
      CHECK(std::abs(iden1) <= 1e-8);
      CHECK(std::abs(p0f0.dot(p.k0.op * dir)) <= 1e-7);
      CHECK(std::abs(p1_bias.dot(p.k1.op * dir)) <= 1e-7);
    }
    for (Index j = 0; j < h1.cols(); ++j) {
      CHECK(std::abs(p1_bias.dot(p.k1.op * h1.col(j))) <= 1e-8);
    }
  }
}

TEST_CASE("local radius never exceeds the global bound") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MultiFidelityProblem p = gen::digital_twin({.n = 4,
                                                      .m0 = 2,
                                                      .m1 = 1,
                                                      .z = 2,
                                                      .eps0 = 1.0,
                                                      .eps1 = 0.6,
                                                      .seed = seed + 40});
    const Observation y = gen::consistent_data(p, seed + 50, 0.7);
    const LocalReport rep = local_recover(p, y);
    const GlobalSolution global = solve_global(p);
    CHECK(rep.radius <= std::sqrt(global.gwce_sq) + 1e-7);
  }
}

TEST_CASE("locally optimal estimation is nonlinear in the data") {
  // Needs an uncertified instance with interior minimizers: certified
  // ones reduce to a linear single-ellipsoid map. Frozen seed; the
  // deviation regresses around 4.4e-2.
  const MultiFidelityProblem p = uncertified_instance(9);
  REQUIRE(validate(p).kernel_case == KernelCase::none);
  const Observation ya = gen::consistent_data(p, 61, 0.3);
  const Observation yb = gen::consistent_data(p, 62, 0.3);
  Observation sum;
  sum.y0 = ya.y0 + yb.y0;
  sum.y1 = ya.y1 + yb.y1;

  const Vector lhs = local_recover(p, sum).estimate;
  const Vector rhs =
      local_recover(p, ya).estimate + local_recover(p, yb).estimate;
  const double deviation = (lhs - rhs).norm() / std::max(1.0, rhs.norm());
  CHECK(deviation > 1e-6);
}

TEST_CASE("boundary data pins the estimate and zeroes the radius") {
  // One observation of a disk at its rightmost point.
  MultiFidelityProblem p;
  p.k0.op = Matrix::Identity(2, 2);
  p.k0.radius = 1.0;
  p.k1.op = Matrix(0, 2);
  p.k1.radius = 1.0;
  p.lambda0 = Matrix(1, 2);
  p.lambda0 << 1.0, 0.0;
  p.lambda1 = Matrix(0, 2);
  p.q = Matrix::Identity(2, 2);
  Observation y;
  y.y0 = Vector::Constant(1, 1.0);
  y.y1 = Vector(0);
  const LocalReport rep = local_recover(p, y);
  CHECK(rep.radius <= 1e-6);
  CHECK(std::abs(rep.estimate(0) - 1.0) <= 1e-9);
  CHECK(std::abs(rep.estimate(1)) <= 1e-9);
}
