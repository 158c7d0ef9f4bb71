#pragma once

#include <cstdint>
#include <vector>

#include "orex/model.hpp"

namespace orex::oracle {

struct SampleBudget {
  std::int64_t count = 10000;
  std::uint64_t seed = 0;
};

/// Feasible points of {|Rf| <= 1, |Sf| <= 1, lambda f = y}: a balanced
/// anchor plus kernel directions scaled to the largest feasible step, then
/// sampled radially. Deterministic per seed; sample j depends only on
/// (seed, j), so enlarging the budget extends the stream. Returns an empty
/// list when the anchor itself is infeasible.
std::vector<Vector> sample_feasible(const CompoundOperators& ops,
                                    const Vector& y,
                                    const SampleBudget& budget);

/// Sampled lower bound on the local worst-case error at z.
double sampled_lwce(const CompoundOperators& ops, const Vector& y,
                    const Vector& z, const SampleBudget& budget);

/// Sampled lower bound on the global worst-case error of a linear map:
/// max over model-consistent f of |q_tilde f - map lambda f|.
double sampled_gwce(const Matrix& map_matrix, const CompoundOperators& ops,
                    const SampleBudget& budget);

/// Lower bound on the diameter of the image set, halved: a few farthest-
/// point passes over the sampled feasible points.
double sampled_half_diameter(const CompoundOperators& ops, const Vector& y,
                             const SampleBudget& budget);

}  // namespace orex::oracle
