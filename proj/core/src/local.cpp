#include "orex/local.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grid_search.hpp"

namespace orex {

LocalReport local_recover(const MultiFidelityProblem& p, const Observation& y,
                          double cert_tol) {
  const ValidationReport val = validate(p);
  if (!val.ok) throw ModelDegeneracyError("local_recover: " + val.detail);

  const CompoundOperators ops = lift(p);
  const Vector data = ops.data_dim() == p.lambda0.rows()
                          ? y.y0
                          : stack_observation(y);
  if (data.size() != ops.data_dim()) {
    throw InvalidInputError("local_recover: data length mismatch");
  }

  LocalReport rep;
  rep.kernel_case = val.kernel_case;
  rep.cheb = chebyshev_center(ops, data, cert_tol);
  rep.estimate = rep.cheb.center;
  rep.radius = std::sqrt(std::max(0.0, rep.cheb.radius_sq_upper));

  // The compound mixing weight sigma converts back to the original
  // parameterization through the epsilon scaling.
  const double sigma = rep.cheb.tau_star;
  const double c0_raw = (1.0 - sigma) / (p.k0.radius * p.k0.radius);
  const double c1_raw = sigma / (p.k1.radius * p.k1.radius);
  const double total = c0_raw + c1_raw;
  rep.c0 = total > 0.0 ? c0_raw / total : 0.5;
  rep.c1 = total > 0.0 ? c1_raw / total : 0.5;
  rep.tau_y = rep.c1;

  rep.certified = val.kernel_case != KernelCase::none && rep.cheb.exact;
  return rep;
}

LocalSdp assemble_local_sdp(const MultiFidelityProblem& p,
                            const Observation& y) {
  const ValidationReport val = validate(p);
  if (!val.ok) throw ModelDegeneracyError("assemble_local_sdp: " + val.detail);
  if (y.y0.size() != p.lambda0.rows() || y.y1.size() != p.lambda1.rows()) {
    throw InvalidInputError("assemble_local_sdp: data length mismatch");
  }

  LocalSdp sdp;
  const Vector f0_anchor = min_norm_solve(p.lambda0, y.y0);
  const Vector f1_anchor = min_norm_solve(p.lambda1, y.y1);
  sdp.u0 = p.k0.op * f0_anchor;
  sdp.u1 = p.k1.op * (f0_anchor - f1_anchor);
  sdp.const0 = p.k0.radius * p.k0.radius - sdp.u0.squaredNorm();
  sdp.const1 = p.k1.radius * p.k1.radius - sdp.u1.squaredNorm();

  sdp.lmi = assemble_kernel_lmi(p);

  const Matrix h0 = nullspace_basis(p.lambda0);
  const Matrix h1 = nullspace_basis(p.lambda1);
  const Index k0 = h0.cols();
  const Index k1 = h1.cols();
  sdp.w_c0 = Vector::Zero(k0 + k1);
  sdp.w_c0.head(k0) = h0.transpose() * (p.k0.op.transpose() * sdp.u0);
  sdp.w_c1 = Vector::Zero(k0 + k1);
  sdp.w_c1.head(k0) = h0.transpose() * (p.k1.op.transpose() * sdp.u1);
  sdp.w_c1.tail(k1) = -(h1.transpose() * (p.k1.op.transpose() * sdp.u1));
  return sdp;
}

LocalSdpSolve solve_local_sdp(const LocalSdp& sdp) {
  const Matrix& a = sdp.lmi.a;
  const Matrix& b = sdp.lmi.b;
  const Matrix& c = sdp.lmi.c;
  const double c_scale = std::max(1.0, c.size() ? c.cwiseAbs().maxCoeff()
                                                : 0.0);

  const auto value_at = [&](double c0, double c1) -> double {
    const Matrix k_mat = c0 * a + c1 * b;
    if (min_eig_sym(k_mat - c) < -1e-9 * c_scale) {
      return std::numeric_limits<double>::infinity();
    }
    const Vector w = c0 * sdp.w_c0 + c1 * sdp.w_c1;
    const Vector z = least_squares_min_norm(k_mat, w);
    if ((k_mat * z - w).norm() > 1e-8 * (1.0 + w.norm())) {
      return std::numeric_limits<double>::infinity();
    }
    return c0 * sdp.const0 + c1 * sdp.const1 + w.dot(z);
  };

  // Joint axis scale: the smallest t with t(A + B) >= C makes (t, t)
  // feasible, so the optimum sits within a few decades of it.
  double scale = 1.0;
  if (a.rows() > 0 && c.norm() > 0.0) {
    try {
      scale = std::max(gen_eig_max(c, a + b).value, 1e-12);
    } catch (const Error&) {
    }
  }

  const detail::GridMin min = detail::grid_minimize(value_at, scale, scale);
  if (!std::isfinite(min.value)) {
    throw InconsistentDataError("solve_local_sdp: no feasible grid point");
  }
  LocalSdpSolve best;
  best.value = min.value;
  best.c0 = min.x;
  best.c1 = min.y;
  const Vector w = best.c0 * sdp.w_c0 + best.c1 * sdp.w_c1;
  const Matrix k_mat = best.c0 * a + best.c1 * b;
  best.b = w.dot(least_squares_min_norm(k_mat, w));
  return best;
}

RadiusBound local_radius_bound(const MultiFidelityProblem& p,
                               const Observation& y,
                               const oracle::SampleBudget& budget) {
  const CompoundOperators ops = lift(p);
  const Vector data = ops.data_dim() == p.lambda0.rows()
                          ? y.y0
                          : stack_observation(y);
  const ChebyshevReport cheb = chebyshev_center(ops, data);

  RadiusBound out;
  out.upper = std::sqrt(std::max(0.0, cheb.radius_sq_upper));

  // Witness half-distance is a valid lower bound whenever both witnesses
  // are feasible.
  const double feas = 1.0 + 1e-7;
  double lower = 0.0;
  const auto feasible = [&](const Vector& w) {
    return (ops.r() * w).norm() <= feas && (ops.s() * w).norm() <= feas;
  };
  if (cheb.witness_plus.size() > 0 && feasible(cheb.witness_plus) &&
      feasible(cheb.witness_minus)) {
    lower = 0.5 * (ops.q_tilde() * (cheb.witness_plus - cheb.witness_minus))
                      .norm();
  }
  lower = std::max(lower, oracle::sampled_half_diameter(ops, data, budget));
  out.lower = lower;
  return out;
}

}  // namespace orex
