#include "orex/global.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orex {

KernelLmi assemble_kernel_lmi(const MultiFidelityProblem& p) {
  const ValidationReport rep = validate(p);
  if (!rep.ok) throw ModelDegeneracyError("assemble_kernel_lmi: " + rep.detail);

  const Matrix h0 = nullspace_basis(p.lambda0);
  const Matrix h1 = nullspace_basis(p.lambda1);
  const Index k0 = h0.cols();
  const Index k1 = h1.cols();
  const Index k = k0 + k1;

  KernelLmi lmi;
  lmi.k0 = k0;
  lmi.k1 = k1;
  lmi.a = Matrix::Zero(k, k);
  lmi.b = Matrix::Zero(k, k);
  lmi.c = Matrix::Zero(k, k);

  const Matrix p0h0 = p.k0.op * h0;
  lmi.a.topLeftCorner(k0, k0) = p0h0.transpose() * p0h0;

  const Matrix p1h0 = p.k1.op * h0;
  const Matrix p1h1 = p.k1.op * h1;
  lmi.b.topLeftCorner(k0, k0) = p1h0.transpose() * p1h0;
  lmi.b.topRightCorner(k0, k1) = -p1h0.transpose() * p1h1;
  lmi.b.bottomLeftCorner(k1, k0) = -p1h1.transpose() * p1h0;
  lmi.b.bottomRightCorner(k1, k1) = p1h1.transpose() * p1h1;

  const Matrix qh0 = p.q * h0;
  lmi.c.topLeftCorner(k0, k0) = qh0.transpose() * qh0;
  return lmi;
}

namespace {

// Minimal feasible s at mixing weight sigma: the compound constraint
// s((1-sigma)|Rf|^2 + sigma|Sf|^2) >= |q f|^2 on ker(lambda) holds exactly
// from s = lambda_max of the pencil.
double pencil_value(const CompoundOperators& ops, double sigma) {
  Matrix stacked(ops.r_kernel().rows() + ops.s_kernel().rows(),
                 ops.kernel_dim());
  stacked.topRows(ops.r_kernel().rows()) =
      std::sqrt(1.0 - sigma) * ops.r_kernel();
  stacked.bottomRows(ops.s_kernel().rows()) =
      std::sqrt(sigma) * ops.s_kernel();
  return gen_eig_max_factors(ops.q_kernel(), stacked).value;
}

}  // namespace

GlobalSolution solve_global(const MultiFidelityProblem& p) {
  const ValidationReport rep = validate(p);
  if (!rep.ok) throw ModelDegeneracyError("solve_global: " + rep.detail);

  const CompoundOperators ops = lift(p);
  const double e0_sq = p.k0.radius * p.k0.radius;
  const double e1_sq = p.k1.radius * p.k1.radius;

  GlobalSolution sol;
  const bool trivial =
      ops.kernel_dim() == 0 || ops.q_kernel().norm() == 0.0;
  if (!trivial) {
    const double lo = 1e-9;
    const double hi = 1.0 - 1e-9;
    constexpr int kScan = 201;
    double best_val = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (int i = 0; i < kScan; ++i) {
      const double sigma = lo + (hi - lo) * i / (kScan - 1);
      double val = std::numeric_limits<double>::infinity();
      try {
        val = pencil_value(ops, sigma);
      } catch (const Error&) {
      }
      if (val < best_val) {
        best_val = val;
        best_idx = i;
      }
    }
    if (best_idx < 0) {
      throw ModelDegeneracyError("solve_global: pencil undefined everywhere");
    }
    // Golden-section on the bracket around the pre-scan argmin; no
    // unimodality is assumed beyond the bracket.
    double a = lo + (hi - lo) * std::max(0, best_idx - 1) / (kScan - 1);
    double b = lo + (hi - lo) * std::min(kScan - 1, best_idx + 1) / (kScan - 1);
    constexpr double kGolden = 0.6180339887498949;
    auto safe_val = [&](double sigma) {
      try {
        return pencil_value(ops, sigma);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = safe_val(x1);
    double f2 = safe_val(x2);
    while (b - a > 1e-10) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = safe_val(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = safe_val(x2);
      }
    }
    const double sigma = 0.5 * (a + b);
    const double s_min = safe_val(sigma);
    if (!std::isfinite(s_min)) {
      throw ModelDegeneracyError("solve_global: infeasible at the optimum");
    }
    sol.sigma_compound = sigma;
    sol.gwce_sq = s_min;
    sol.c0 = s_min * (1.0 - sigma) / e0_sq;
    sol.c1 = s_min * sigma / e1_sq;
  }
  if (sol.c0 + sol.c1 > 0.0) {
    sol.tau_sharp = sol.c1 / (sol.c0 + sol.c1);
  }

  // Re-verify feasibility of the returned pair against the kernel LMI.
  const KernelLmi lmi = assemble_kernel_lmi(p);
  if (lmi.a.rows() > 0) {
    const Matrix slack = sol.c0 * lmi.a + sol.c1 * lmi.b - lmi.c;
    if (min_eig_sym(slack) < -1e-8) {
      throw Error("solve_global: optimal pair fails the kernel LMI");
    }
  }

  // Materialize the linear map column by column on canonical data vectors.
  const Index m = ops.data_dim();
  const double wr = trivial ? 0.5 : 1.0 - sol.sigma_compound;
  const double ws = trivial ? 0.5 : sol.sigma_compound;
  sol.map_matrix = Matrix(ops.out_dim(), m);
  for (Index j = 0; j < m; ++j) {
    Vector e = Vector::Zero(m);
    e(j) = 1.0;
    const Vector f = regularizer_from_anchor(ops, ops.project_data(e), wr, ws);
    sol.map_matrix.col(j) = ops.q_tilde() * f;
  }
  return sol;
}

GlobalEstimate global_recover(const GlobalSolution& sol,
                              const CompoundOperators& ops, const Vector& y) {
  const double wr = 1.0 - sol.sigma_compound;
  const double ws = sol.sigma_compound;
  GlobalEstimate out;
  out.estimate = ops.q_tilde() * regularizer_weighted(ops, y, wr, ws);
  out.bound = std::sqrt(sol.gwce_sq);
  return out;
}

}  // namespace orex
