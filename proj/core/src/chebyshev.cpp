#include "orex/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "grid_search.hpp"

namespace orex {

namespace {

constexpr double kGolden = 0.6180339887498949;

struct PathEval {
  double rq = std::numeric_limits<double>::infinity();  // |q h|^2
  double f_val = 0.0;
  bool valid = false;
};

PathEval eval_path(const CompoundOperators& ops, const Vector& y, double tau) {
  PathEval out;
  try {
    const RegPoint pt = eig_point(ops, y, tau);
    out.rq = (ops.q_tilde() * pt.h_tau).squaredNorm();
    out.f_val = pt.f_val;
    out.valid = true;
  } catch (const EndpointDegenerateError&) {
  } catch (const ModelDegeneracyError&) {
  }
  return out;
}

double golden_section(const CompoundOperators& ops, const Vector& y, double lo,
                      double hi) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = eval_path(ops, y, x1).rq;
  double f2 = eval_path(ops, y, x2).rq;
  while (b - a > 1e-8) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = eval_path(ops, y, x1).rq;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = eval_path(ops, y, x2).rq;
    }
  }
  return 0.5 * (a + b);
}

bool near_zero_inner(double inner, double norm_a, double norm_b, double tol) {
  return std::abs(inner) <= tol * std::max(norm_a * norm_b, 1e-300);
}

bool witnesses_feasible(const CompoundOperators& ops, const ChebyshevReport& r,
                        double cert_tol) {
  const double margin = 1.0 + 4.0 * cert_tol;
  for (const Vector* w : {&r.witness_plus, &r.witness_minus}) {
    if ((ops.r() * *w).squaredNorm() > margin) return false;
    if ((ops.s() * *w).squaredNorm() > margin) return false;
  }
  return true;
}

// Exact solve at a pinned endpoint tau in {0, 1}: the active operator T is
// minimized alone while the slack one U is only tracked for feasibility.
// The kernel of T on ker(lambda) must be invisible to q_tilde, otherwise
// the endpoint value is infinite and the caller keeps the clipped result.
// Free kernel directions of T are used to minimize the U-norms, which is
// the limit behavior of the regularization path.
std::optional<ChebyshevReport> endpoint_exact_report(
    const CompoundOperators& ops, const Vector& y, bool low_side,
    double cert_tol) {
  const Matrix& t_full = low_side ? ops.r() : ops.s();
  const Matrix& u_full = low_side ? ops.s() : ops.r();
  const Matrix& t_n = low_side ? ops.r_kernel() : ops.s_kernel();

  const Matrix z = nullspace_basis(t_n);
  const double q_scale = std::max(1.0, ops.q_kernel().norm());
  if (z.cols() > 0 && (ops.q_kernel() * z).norm() > 1e-9 * q_scale) {
    return std::nullopt;
  }

  const Matrix& n = ops.kernel_basis();
  const Index k = ops.kernel_dim();
  const Vector anchor = ops.min_norm_data(y);

  // Lexicographic anchor: minimize |T f|, then |U f| over the leftover
  // freedom.
  Vector f_hat = anchor;
  if (k > 0) {
    f_hat += n * least_squares_min_norm(t_n, -(t_full * anchor));
  }
  if (z.cols() > 0) {
    const Matrix u_free = u_full * (n * z);
    const Vector w = least_squares_min_norm(u_free, -(u_full * f_hat));
    f_hat += n * (z * w);
  }

  const double g0 = (t_full * f_hat).squaredNorm();
  if (g0 > 1.0 + 1e-8 * std::max(1.0, g0)) {
    throw InconsistentDataError(
        "chebyshev_center: data lie outside the model set at the endpoint");
  }
  const double slack = std::max(0.0, 1.0 - g0);

  ChebyshevReport rep;
  rep.tau_star = low_side ? 0.0 : 1.0;
  rep.boundary_minimizer = true;
  rep.center = ops.q_tilde() * f_hat;

  // Complement of the deflated directions carries the pencil.
  Matrix w_basis(k, 0);
  if (k > 0 && t_n.rows() > 0) {
    Eigen::JacobiSVD<Matrix> svd(t_n, Eigen::ComputeFullV);
    w_basis = svd.matrixV().leftCols(k - z.cols());
  }
  Vector h = Vector::Zero(ops.dim());
  double radius_sq = 0.0;
  if (w_basis.cols() > 0 && slack > 0.0) {
    const Matrix qw = ops.q_kernel() * w_basis;
    const Matrix tw = t_n * w_basis;
    const EigPair top = gen_eig_max_factors(qw, tw);
    radius_sq = top.value * slack;
    Vector h_dir = n * (w_basis * top.vector);
    const double th2 = (t_full * h_dir).squaredNorm();
    if (th2 > 0.0) {
      h = std::sqrt(slack / th2) * h_dir;
      if (z.cols() > 0) {
        const Matrix u_free = u_full * (n * z);
        const Vector w = least_squares_min_norm(u_free, -(u_full * h));
        h += n * (z * w);
      }
    }
  }
  rep.radius_sq_upper = radius_sq;
  rep.witness_plus = f_hat + h;
  rep.witness_minus = f_hat - h;
  rep.ortho_residual_r = (ops.r() * f_hat).dot(ops.r() * h);
  rep.ortho_residual_s = (ops.s() * f_hat).dot(ops.s() * h);
  rep.exact = witnesses_feasible(ops, rep, cert_tol);
  return rep;
}

}  // namespace

TauSolve solve_tau_star_detail(const CompoundOperators& ops, const Vector& y) {
  const double lo = kTauClip;
  const double hi = 1.0 - kTauClip;
  constexpr int kGridSize = 65;

  TauSolve out;
  std::vector<double> taus(kGridSize);
  std::vector<PathEval> evals(kGridSize);
  int best = -1;
  for (int i = 0; i < kGridSize; ++i) {
    taus[i] = lo + (hi - lo) * i / (kGridSize - 1);
    evals[i] = eval_path(ops, y, taus[i]);
    if (evals[i].valid && (best < 0 || evals[i].rq < evals[best].rq)) best = i;
  }
  if (best < 0) {
    throw ModelDegeneracyError(
        "solve_tau_star: path undefined across the whole interval");
  }

  // Record local grid minima that tie with the global one within 1%.
  for (int i = 0; i < kGridSize; ++i) {
    if (!evals[i].valid) continue;
    const bool left_up = i == 0 || !evals[i - 1].valid ||
                         evals[i - 1].rq >= evals[i].rq;
    const bool right_up = i == kGridSize - 1 || !evals[i + 1].valid ||
                          evals[i + 1].rq >= evals[i].rq;
    if (left_up && right_up &&
        evals[i].rq <= evals[best].rq * 1.01 + 1e-12) {
      out.candidates.push_back(taus[i]);
    }
  }

  // Bracket a sign change of F, preferring the neighborhood of the grid
  // argmin (F crosses - to + at an interior minimizer of |q h|^2).
  auto find_bracket = [&](int left, int right)
      -> std::optional<std::pair<double, double>> {
    for (int i = left; i < right; ++i) {
      if (!evals[i].valid || !evals[i + 1].valid) continue;
      if (evals[i].f_val < 0.0 && evals[i + 1].f_val >= 0.0) {
        return std::make_pair(taus[i], taus[i + 1]);
      }
    }
    return std::nullopt;
  };
  auto bracket = find_bracket(std::max(0, best - 1),
                              std::min(kGridSize - 1, best + 1));
  if (!bracket) bracket = find_bracket(0, kGridSize - 1);

  if (!bracket) {
    // No crossing: minimize by golden section (typically a clip boundary).
    const int left = std::max(0, best - 1);
    const int right = std::min(kGridSize - 1, best + 1);
    out.tau = golden_section(ops, y, taus[left], taus[right]);
    out.newton_converged = false;
    out.at_boundary = out.tau <= lo + 2e-6 || out.tau >= hi - 2e-6;
    return out;
  }

  // Safeguarded Newton on F inside the bracket.
  double a = bracket->first;   // F(a) < 0
  double b = bracket->second;  // F(b) >= 0
  double tau = 0.5 * (a + b);
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    const RegPoint pt = eig_point(ops, y, tau);
    const double f = pt.f_val;
    const double scale =
        std::max(1.0, (ops.r() * pt.f_tau).squaredNorm() +
                          (ops.r() * pt.h_tau).squaredNorm() +
                          (ops.s() * pt.f_tau).squaredNorm() +
                          (ops.s() * pt.h_tau).squaredNorm());
    if (std::abs(f) <= 1e-12 * scale || b - a <= 1e-15) {
      converged = true;
      break;
    }
    if (f < 0.0) {
      a = tau;
    } else {
      b = tau;
    }
    const double fp = derivatives(ops, y, tau).f_prime;
    double next = tau - f / fp;
    if (!(next > a && next < b)) next = 0.5 * (a + b);  // bisect
    if (std::abs(next - tau) <= 1e-16) {
      converged = true;
      break;
    }
    tau = next;
  }
  out.tau = tau;
  out.newton_converged = converged;
  if (!converged) out.tau = golden_section(ops, y, a, b);
  return out;
}

double solve_tau_star(const CompoundOperators& ops, const Vector& y) {
  return solve_tau_star_detail(ops, y).tau;
}

OneEllipsoidResult one_ellipsoid_center(const Matrix& t_op,
                                        const Matrix& lambda, const Vector& y,
                                        const Matrix& q_tilde) {
  CompoundOperators ops(t_op, Matrix(0, t_op.cols()), lambda, q_tilde);
  const Index k = ops.kernel_dim();
  if (k > 0 && numerical_rank(ops.r_kernel()) < k) {
    throw ModelDegeneracyError(
        "one_ellipsoid_center: ker(T) meets ker(lambda)");
  }

  OneEllipsoidResult out;
  out.f_hat = regularizer_from_anchor(ops, ops.min_norm_data(y), 1.0, 0.0);
  out.center = q_tilde * out.f_hat;

  const double slack_raw = 1.0 - (t_op * out.f_hat).squaredNorm();
  if (slack_raw < -1e-8) {
    throw InconsistentDataError("one_ellipsoid_center: empty slice");
  }
  const double slack = std::max(0.0, slack_raw);

  if (k == 0) {
    out.radius_sq = 0.0;
    out.h_hat = Vector::Zero(ops.dim());
    return out;
  }
  const EigPair top = gen_eig_max_factors(ops.q_kernel(), ops.r_kernel());
  out.radius_sq = top.value * slack;

  // Normalize |T h|^2 = 1 - |T f|^2.
  const Vector h_dir = ops.kernel_basis() * top.vector;
  const double th2 = (t_op * h_dir).squaredNorm();
  out.h_hat = th2 > 0.0 ? Vector(std::sqrt(slack / th2) * h_dir)
                        : Vector(Vector::Zero(ops.dim()));
  return out;
}

ChebyshevReport chebyshev_center(const CompoundOperators& ops, const Vector& y,
                                 double cert_tol) {
  ChebyshevReport rep;

  const bool s_absent = ops.s().rows() == 0 || ops.s().norm() == 0.0;
  const bool r_absent = ops.r().rows() == 0 || ops.r().norm() == 0.0;
  if (s_absent && r_absent) {
    throw ModelDegeneracyError("chebyshev_center: both constraints vanish");
  }
  if (s_absent || r_absent) {
    const Matrix& t_op = s_absent ? ops.r() : ops.s();
    const OneEllipsoidResult one =
        one_ellipsoid_center(t_op, ops.lambda(), y, ops.q_tilde());
    rep.center = one.center;
    rep.radius_sq_upper = one.radius_sq;
    rep.tau_star = s_absent ? 0.0 : 1.0;
    rep.one_ellipsoid = true;
    rep.exact = true;
    const double inner = (t_op * one.f_hat).dot(t_op * one.h_hat);
    (s_absent ? rep.ortho_residual_r : rep.ortho_residual_s) = inner;
    rep.witness_plus = one.f_hat + one.h_hat;
    rep.witness_minus = one.f_hat - one.h_hat;
    return rep;
  }

  const TauSolve tau = solve_tau_star_detail(ops, y);

  if (tau.at_boundary) {
    // The infimum sits at an endpoint; solve it exactly when possible.
    auto endpoint =
        endpoint_exact_report(ops, y, /*low_side=*/tau.tau < 0.5, cert_tol);
    if (endpoint) {
      endpoint->newton_converged = tau.newton_converged;
      endpoint->candidate_minima = tau.candidates;
      return *endpoint;
    }
  }

  const RegPoint pt = eig_point(ops, y, tau.tau);

  rep.center = ops.q_tilde() * pt.f_tau;
  rep.radius_sq_upper = (ops.q_tilde() * pt.h_tau).squaredNorm();
  rep.tau_star = tau.tau;
  rep.newton_converged = tau.newton_converged;
  rep.boundary_minimizer = tau.at_boundary;
  rep.degenerate_eigenspace = pt.degenerate_eigenspace;
  rep.candidate_minima = tau.candidates;
  rep.witness_plus = pt.f_tau + pt.h_tau;
  rep.witness_minus = pt.f_tau - pt.h_tau;

  const Vector rf = ops.r() * pt.f_tau;
  const Vector rh = ops.r() * pt.h_tau;
  const Vector sf = ops.s() * pt.f_tau;
  const Vector sh = ops.s() * pt.h_tau;
  rep.ortho_residual_r = rf.dot(rh);
  rep.ortho_residual_s = sf.dot(sh);

  const bool ortho =
      near_zero_inner(rep.ortho_residual_r, rf.norm(), rh.norm(), cert_tol) ||
      near_zero_inner(rep.ortho_residual_s, sf.norm(), sh.norm(), cert_tol);
  rep.exact = ortho && witnesses_feasible(ops, rep, cert_tol);
  return rep;
}

double sdp_value(const CompoundOperators& ops, const Vector& y) {
  const Vector anchor = ops.min_norm_data(y);
  const double ry = 1.0 - (ops.r() * anchor).squaredNorm();
  const double sy = 1.0 - (ops.s() * anchor).squaredNorm();
  const Matrix r2 = ops.r_kernel().transpose() * ops.r_kernel();
  const Matrix s2 = ops.s_kernel().transpose() * ops.s_kernel();
  const Matrix q2 = ops.q_kernel().transpose() * ops.q_kernel();
  const Vector vc = ops.r_kernel().transpose() * (ops.r() * anchor);
  const Vector vd = ops.s_kernel().transpose() * (ops.s() * anchor);
  const double q_scale = std::max(1.0, q2.size() ? q2.cwiseAbs().maxCoeff()
                                                 : 0.0);

  // Problem scale from the pencil eigenvalue at a few interior taus.
  double scale = 0.0;
  int scale_count = 0;
  for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    try {
      Matrix stacked(ops.r_kernel().rows() + ops.s_kernel().rows(),
                     ops.kernel_dim());
      stacked.topRows(ops.r_kernel().rows()) =
          std::sqrt(1.0 - tau) * ops.r_kernel();
      stacked.bottomRows(ops.s_kernel().rows()) =
          std::sqrt(tau) * ops.s_kernel();
      scale += gen_eig_max_factors(ops.q_kernel(), stacked).value;
      ++scale_count;
    } catch (const Error&) {
    }
  }
  if (scale_count == 0 || scale <= 0.0) {
    scale = 1.0;
  } else {
    scale /= scale_count;
  }

  const auto value_at = [&](double c, double d) -> double {
    Matrix lhs = c * r2 + d * s2;
    if (min_eig_sym(lhs - q2) < -1e-9 * q_scale) {
      return std::numeric_limits<double>::infinity();
    }
    // Minimal b from the Schur complement: b = w^T K^+ w with w in ran(K).
    const Vector w = c * vc + d * vd;
    const Vector z = least_squares_min_norm(lhs, w);
    if ((lhs * z - w).norm() > 1e-8 * (1.0 + w.norm())) {
      return std::numeric_limits<double>::infinity();
    }
    return c * ry + d * sy + w.dot(z);
  };

  const detail::GridMin best = detail::grid_minimize(value_at, scale, scale);
  if (!std::isfinite(best.value)) {
    throw InconsistentDataError("sdp_value: no feasible grid point");
  }
  return best.value;
}

ConsistentEstimate consistent_estimate(const CompoundOperators& ops,
                                       const Vector& y) {
  const BalancedPoint bal = balanced_regularizer(ops, y);
  ConsistentEstimate out;
  out.f = bal.f;
  out.tau_bar = bal.tau_bar;
  out.lwce_factor2_bound =
      2.0 * std::sqrt(chebyshev_center(ops, y).radius_sq_upper);
  return out;
}

}  // namespace orex
