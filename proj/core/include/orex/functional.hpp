#pragma once

#include <vector>

#include "orex/numerics.hpp"

namespace orex::functional {

/// One approximability level: basis values of V_t at the observation
/// points of levels t..T (n_t rows), the radius epsilon_t, and the number
/// of observations owned by this level.
struct ApproximabilityLevel {
  Matrix basis_eval;
  double epsilon = 0.0;
  Index m_t = 0;
};

/// Right-hand side of the interpolation constraint: b_j is the value of
/// the target functional on the j-th level-0 basis element.
struct FunctionalTarget {
  Vector b;
};

struct EstimatorWeights {
  std::vector<Vector> a;   // weight block per level
  double objective = 0.0;  // weighted l1 value
  double gwce = 0.0;       // epsilon_0 + objective
};

struct AssembledSystem {
  std::vector<Matrix> m;          // constraint matrices M^(s)
  Vector b;
  std::vector<Index> m_counts;    // observations per level
  Index total_m = 0;
};

/// Validates dimensions and the level-0 full-rank condition, then packages
/// the constraint matrices. Throws ModelDegeneracyError when V0 is rank
/// deficient on the level-0 points.
AssembledSystem assemble(const std::vector<ApproximabilityLevel>& levels,
                         const FunctionalTarget& target);

/// Weighted l1-minimal estimator weights through the split linear program;
/// the reported gwce includes the constant epsilon_0 of the dual norm.
EstimatorWeights estimate_weights(
    const std::vector<ApproximabilityLevel>& levels,
    const FunctionalTarget& target);

/// Re-solves the level-0 block with the other levels frozen, yielding an
/// n0-sparse a0 at unchanged objective.
EstimatorWeights sparsify_level0(const EstimatorWeights& weights,
                                 const std::vector<ApproximabilityLevel>& levels,
                                 const FunctionalTarget& target);

/// Applies the estimator to stacked data.
double apply(const EstimatorWeights& weights, const Vector& y);

}  // namespace orex::functional
