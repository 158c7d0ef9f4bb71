#include "orex/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace orex::lp {

namespace {

constexpr double kPivotEps = 1e-9;

// Dense simplex tableau over the columns [original | artificial | rhs].
// Reduced costs are recomputed from the basis costs at every scan, which
// avoids cost-row drift at desk scale.
struct Tableau {
  Matrix t;                  // k x (n + k + 1)
  std::vector<Index> basis;  // basis variable per row
  Index n = 0, k = 0;

  double rhs(Index i) const { return t(i, n + k); }

  void pivot(Index row, Index col) {
    t.row(row) /= t(row, col);
    for (Index i = 0; i < k; ++i) {
      if (i == row) continue;
      const double factor = t(i, col);
      if (std::abs(factor) > 0.0) t.row(i) -= factor * t.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  }

  bool is_basic(Index j) const {
    for (Index i = 0; i < k; ++i) {
      if (basis[static_cast<std::size_t>(i)] == j) return true;
    }
    return false;
  }

  // Ratio-test row for a column, Bland tie-break on the basis index.
  // Pivot eligibility is relative to the column magnitude so that small
  // but clean columns stay usable while rounding noise does not. Returns
  // -1 when no entry can serve as a pivot.
  Index leaving_row(Index entering) const {
    double col_max = 0.0;
    for (Index i = 0; i < k; ++i) {
      col_max = std::max(col_max, std::abs(t(i, entering)));
    }
    const double eligible = std::max(kPivotEps * col_max, 1e-13);
    // Slightly negative basic values are rounding noise; their ratios act
    // as zero-length degenerate steps.
    bool found = false;
    double min_ratio = 0.0;
    for (Index i = 0; i < k; ++i) {
      if (t(i, entering) <= eligible) continue;
      const double ratio = std::max(0.0, rhs(i) / t(i, entering));
      if (!found || ratio < min_ratio) min_ratio = ratio;
      found = true;
    }
    if (!found) return -1;
    Index leaving = -1;
    for (Index i = 0; i < k; ++i) {
      if (t(i, entering) <= eligible) continue;
      const double ratio = std::max(0.0, rhs(i) / t(i, entering));
      if (ratio > min_ratio * (1.0 + 1e-9) + kPivotEps) continue;
      if (leaving < 0 || basis[static_cast<std::size_t>(i)] <
                             basis[static_cast<std::size_t>(leaving)]) {
        leaving = i;
      }
    }
    return leaving;
  }

  // One simplex phase under Bland's rule. cost covers all n + k columns;
  // enterable marks columns allowed to enter. An objective known to be
  // bounded below (phase 1) treats every unbounded signal as rounding
  // noise. Returns false on unbounded.
  bool run(const Vector& cost, const std::vector<bool>& enterable,
           bool bounded_below) {
    const Index max_iter = 2000 + 200 * (n + k);
    for (Index iter = 0; iter < max_iter; ++iter) {
      // Bland: smallest column with a certainly-negative reduced cost
      // r_j = c_j - c_B . column_j; the threshold tracks the rounding
      // scale of that inner product.
      bool pivoted = false;
      for (Index j = 0; j < n + k && !pivoted; ++j) {
        if (!enterable[static_cast<std::size_t>(j)] || is_basic(j)) continue;
        double reduced = cost(j);
        double scale = std::abs(cost(j));
        double col_max = 0.0;
        for (Index i = 0; i < k; ++i) {
          const double c_i = cost(basis[static_cast<std::size_t>(i)]);
          reduced -= c_i * t(i, j);
          scale += std::abs(c_i) * std::abs(t(i, j));
          col_max = std::max(col_max, std::abs(t(i, j)));
        }
        if (reduced >= -(kPivotEps + 1e-12 * scale)) continue;
        const Index leaving = leaving_row(j);
        if (leaving >= 0) {
          pivot(leaving, j);
          pivoted = true;
        } else if (!bounded_below && col_max > 1e-7 &&
                   reduced < -1e-6 * std::max(1.0, scale)) {
          return false;  // genuine unbounded ray
        }
        // Otherwise the column is pivotless rounding noise; move on.
      }
      if (!pivoted) return true;
    }
    throw Error("solve_lp: simplex failed to terminate");
  }
};

}  // namespace

Solution solve_lp(const StandardLP& p) {
  const Index k = p.constraint_matrix.rows();
  const Index n = p.constraint_matrix.cols();
  if (p.cost.size() != n || p.rhs.size() != k) {
    throw InvalidInputError("solve_lp: inconsistent dimensions");
  }
  if (!all_finite(p.constraint_matrix) || !p.cost.allFinite() ||
      !p.rhs.allFinite()) {
    throw InvalidInputError("solve_lp: non-finite entries");
  }

  Tableau tab;
  tab.n = n;
  tab.k = k;
  tab.t = Matrix::Zero(k, n + k + 1);
  Vector row_sign = Vector::Ones(k);
  for (Index i = 0; i < k; ++i) {
    const double s = p.rhs(i) < 0.0 ? -1.0 : 1.0;
    row_sign(i) = s;
    tab.t.block(i, 0, 1, n) = s * p.constraint_matrix.row(i);
    tab.t(i, n + i) = 1.0;
    tab.t(i, n + k) = s * p.rhs(i);
    tab.basis.push_back(n + i);
  }

  // Phase 1: minimize the sum of artificials.
  Vector phase1_cost = Vector::Zero(n + k);
  phase1_cost.tail(k).setOnes();
  std::vector<bool> enterable(static_cast<std::size_t>(n + k), true);
  tab.run(phase1_cost, enterable, /*bounded_below=*/true);

  double artificial_sum = 0.0;
  for (Index i = 0; i < k; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] >= n) {
      artificial_sum += tab.rhs(i);
    }
  }
  if (artificial_sum > 1e-8 * (1.0 + p.rhs.cwiseAbs().sum())) {
    Solution sol;
    sol.status = Status::infeasible;
    return sol;
  }

  // Drive residual artificials out of the basis where a pivot exists;
  // rows without one are redundant constraints.
  for (Index i = 0; i < k; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < n) continue;
    Index col = -1;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(tab.t(i, j)) > 1e-7) {
        col = j;
        break;
      }
    }
    if (col >= 0) tab.pivot(i, col);
  }

  // Phase 2 over the original costs; artificials barred from entering.
  Vector phase2_cost = Vector::Zero(n + k);
  phase2_cost.head(n) = p.cost;
  std::fill(enterable.begin() + n, enterable.end(), false);
  if (!tab.run(phase2_cost, enterable, /*bounded_below=*/false)) {
    Solution sol;
    sol.status = Status::unbounded;
    return sol;
  }

  // Refactorize: recompute the basic values against the original data,
  // discarding the noise accumulated by the tableau updates.
  Matrix basis_cols = Matrix::Zero(k, k);
  Vector basis_cost = Vector::Zero(k);
  for (Index i = 0; i < k; ++i) {
    const Index j = tab.basis[static_cast<std::size_t>(i)];
    if (j < n) {
      for (Index r = 0; r < k; ++r) {
        basis_cols(r, i) = row_sign(r) * p.constraint_matrix(r, j);
      }
      basis_cost(i) = p.cost(j);
    } else {
      basis_cols(j - n, i) = 1.0;
    }
  }
  Vector flipped_rhs(k);
  for (Index i = 0; i < k; ++i) flipped_rhs(i) = row_sign(i) * p.rhs(i);
  const Vector basic_values = least_squares_min_norm(basis_cols, flipped_rhs);

  Solution sol;
  sol.status = Status::optimal;
  sol.x = Vector::Zero(n);
  for (Index i = 0; i < k; ++i) {
    const Index j = tab.basis[static_cast<std::size_t>(i)];
    if (j < n) sol.x(j) = std::max(0.0, basic_values(i));
  }
  sol.value = p.cost.dot(sol.x);

  // Dual from the same basis, artificial columns contributing unit
  // vectors at cost 0.
  Vector y = least_squares_min_norm(basis_cols.transpose(), basis_cost);
  sol.dual = row_sign.asDiagonal() * y;
  return sol;
}

}  // namespace orex::lp
