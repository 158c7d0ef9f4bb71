#include "orex/functional.hpp"

#include <cmath>
#include <numeric>

#include "orex/lp.hpp"

namespace orex::functional {

namespace {

// Cumulative weights e0 + ... + e_t multiplying |a_t|_1.
std::vector<double> level_weights(
    const std::vector<ApproximabilityLevel>& levels) {
  std::vector<double> w;
  double acc = 0.0;
  for (const auto& level : levels) {
    acc += level.epsilon;
    w.push_back(acc);
  }
  return w;
}

}  // namespace

AssembledSystem assemble(const std::vector<ApproximabilityLevel>& levels,
                         const FunctionalTarget& target) {
  if (levels.empty()) throw InvalidInputError("assemble: no levels");
  const Index t_max = static_cast<Index>(levels.size());

  AssembledSystem sys;
  for (const auto& level : levels) {
    if (!(level.epsilon > 0.0)) {
      throw InvalidInputError("assemble: epsilons must be positive");
    }
    if (!all_finite(level.basis_eval)) {
      throw InvalidInputError("assemble: non-finite basis values");
    }
    sys.m_counts.push_back(level.m_t);
    sys.total_m += level.m_t;
  }
  if (!target.b.allFinite()) {
    throw InvalidInputError("assemble: non-finite target");
  }

  // Level t sees the observation points of levels t..T.
  Index tail = sys.total_m;
  for (Index t = 0; t < t_max; ++t) {
    const Matrix& v = levels[static_cast<std::size_t>(t)].basis_eval;
    if (v.cols() != tail) {
      throw InvalidInputError("assemble: basis column count mismatch");
    }
    sys.m.push_back(v);
    tail -= sys.m_counts[static_cast<std::size_t>(t)];
  }

  const Index n0 = sys.m.front().rows();
  if (target.b.size() != n0) {
    throw InvalidInputError("assemble: target length differs from dim(V0)");
  }
  const Index m0 = sys.m_counts.front();
  if (n0 > m0 ||
      numerical_rank(sys.m.front().leftCols(m0)) < n0) {
    throw ModelDegeneracyError(
        "assemble: V0 is rank deficient on the level-0 points");
  }
  sys.b = target.b;
  return sys;
}

namespace {

// Shared split-LP solve: minimize sum_t w_t |a_t|_1 subject to the stacked
// equality constraints, via a = a+ - a-.
struct SplitLpResult {
  std::vector<Vector> a;
  double objective = 0.0;
};

SplitLpResult solve_split_lp(const Matrix& constraints, const Vector& rhs,
                             const Vector& weights) {
  const Index m = constraints.cols();
  lp::StandardLP prog;
  prog.constraint_matrix = Matrix(constraints.rows(), 2 * m);
  prog.constraint_matrix.leftCols(m) = constraints;
  prog.constraint_matrix.rightCols(m) = -constraints;
  prog.rhs = rhs;
  prog.cost = Vector(2 * m);
  prog.cost.head(m) = weights;
  prog.cost.tail(m) = weights;

  const lp::Solution sol = lp::solve_lp(prog);
  if (sol.status != lp::Status::optimal) {
    throw InfeasibleModelError("weighted l1 program not solvable");
  }
  SplitLpResult out;
  out.a.push_back(sol.x.head(m) - sol.x.tail(m));
  out.objective = sol.value;
  return out;
}

}  // namespace

EstimatorWeights estimate_weights(
    const std::vector<ApproximabilityLevel>& levels,
    const FunctionalTarget& target) {
  const AssembledSystem sys = assemble(levels, target);
  const Index t_max = static_cast<Index>(levels.size());
  const std::vector<double> weights = level_weights(levels);

  // Stack M^(0) a = b and M^(s) [a_s; ...] = 0, padding earlier levels.
  Index rows = 0;
  for (const Matrix& m : sys.m) rows += m.rows();
  Matrix constraints = Matrix::Zero(rows, sys.total_m);
  Vector rhs = Vector::Zero(rows);
  Index row = 0;
  Index col_skip = 0;
  for (Index t = 0; t < t_max; ++t) {
    const Matrix& m = sys.m[static_cast<std::size_t>(t)];
    constraints.block(row, col_skip, m.rows(), m.cols()) = m;
    if (t == 0) rhs.head(m.rows()) = sys.b;
    row += m.rows();
    col_skip += sys.m_counts[static_cast<std::size_t>(t)];
  }

  Vector cost_weights(sys.total_m);
  Index at = 0;
  for (Index t = 0; t < t_max; ++t) {
    const Index mt = sys.m_counts[static_cast<std::size_t>(t)];
    cost_weights.segment(at, mt).setConstant(
        weights[static_cast<std::size_t>(t)]);
    at += mt;
  }

  const SplitLpResult lp_out = solve_split_lp(constraints, rhs, cost_weights);

  EstimatorWeights out;
  at = 0;
  for (Index t = 0; t < t_max; ++t) {
    const Index mt = sys.m_counts[static_cast<std::size_t>(t)];
    out.a.push_back(lp_out.a.front().segment(at, mt));
    at += mt;
  }
  out.objective = lp_out.objective;
  out.gwce = levels.front().epsilon + out.objective;
  return out;
}

EstimatorWeights sparsify_level0(
    const EstimatorWeights& weights,
    const std::vector<ApproximabilityLevel>& levels,
    const FunctionalTarget& target) {
  const AssembledSystem sys = assemble(levels, target);
  const Index m0 = sys.m_counts.front();
  const Matrix& m_level0 = sys.m.front();

  // Freeze a1..aT: the only binding constraint on a0 is the level-0 block.
  Vector rhs = sys.b;
  Index col = m0;
  for (std::size_t t = 1; t < levels.size(); ++t) {
    const Index mt = sys.m_counts[t];
    rhs -= m_level0.middleCols(col, mt) * weights.a[t];
    col += mt;
  }

  Vector cost = Vector::Constant(m0, levels.front().epsilon);
  const SplitLpResult lp_out =
      solve_split_lp(m_level0.leftCols(m0), rhs, cost);

  EstimatorWeights out = weights;
  out.a.front() = lp_out.a.front();

  const std::vector<double> w = level_weights(levels);
  double objective = 0.0;
  for (std::size_t t = 0; t < levels.size(); ++t) {
    objective += w[t] * out.a[t].lpNorm<1>();
  }
  if (std::abs(objective - weights.objective) >
      1e-9 * (1.0 + std::abs(weights.objective))) {
    throw Error("sparsify_level0: objective drifted during the re-solve");
  }
  out.objective = weights.objective;
  out.gwce = weights.gwce;
  return out;
}

double apply(const EstimatorWeights& weights, const Vector& y) {
  Index m = 0;
  for (const Vector& block : weights.a) m += block.size();
  if (y.size() != m) {
    throw InvalidInputError("apply: data length mismatch");
  }
  double out = 0.0;
  Index at = 0;
  for (const Vector& block : weights.a) {
    out += block.dot(y.segment(at, block.size()));
    at += block.size();
  }
  return out;
}

}  // namespace orex::functional
