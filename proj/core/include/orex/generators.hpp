#pragma once

#include <cstdint>

#include "orex/model.hpp"

namespace orex::gen {

/// Random orthogonal matrix (Householder QR of a Gaussian sample).
Matrix random_orthogonal(Index n, std::uint64_t seed);

/// Random dense operator with singular values in [smin, smax].
Matrix random_operator(Index rows, Index cols, std::uint64_t seed,
                       double smin = 0.5, double smax = 1.5);

struct TwinConfig {
  Index n = 6;
  Index m0 = 4;
  Index m1 = 2;   // rows drawn from lambda0, so ker(L0) is inside ker(L1)
  Index z = 2;
  double eps0 = 1.0;
  double eps1 = 0.5;
  std::uint64_t seed = 0;
};

/// Digital-twin instance: the low-fidelity observations reuse rows of the
/// high-fidelity observation map, which certifies local optimality.
MultiFidelityProblem digital_twin(const TwinConfig& cfg);

struct GraphConfig {
  Index n = 8;
  Index m0 = 5;
  Index m1 = 3;
  double eps0 = 2.0;
  double eps1 = 0.5;
  std::uint64_t seed = 0;
};

/// Graph-signal instance on a path graph: P0 is the square root of the
/// graph Laplacian, P1 the identity (destructive observation), and both
/// observation maps sample vertices.
MultiFidelityProblem graph_signal(const GraphConfig& cfg);

/// Same construction on a supplied graph Laplacian (symmetric PSD).
MultiFidelityProblem graph_signal_from(const Matrix& laplacian,
                                       const GraphConfig& cfg);

/// Model-consistent data pair: f0 strictly inside K0 and f0 - f1 strictly
/// inside K1 at the given margin in (0, 1).
Observation consistent_data(const MultiFidelityProblem& p, std::uint64_t seed,
                            double margin = 0.9);

/// Generic compound-space instance with well-conditioned blocks; q_identity
/// selects q_tilde = Id (the case with an analytic path derivative).
CompoundOperators random_compound(Index dim, Index rows_r, Index rows_s,
                                  Index rows_lambda, Index rows_q,
                                  std::uint64_t seed, bool q_identity = false);

/// Data vector reachable by lambda with the feasible set nonempty at the
/// given margin: y = lambda f for f with |Rf|, |Sf| <= margin.
Vector consistent_compound_data(const CompoundOperators& ops,
                                std::uint64_t seed, double margin = 0.8);

}  // namespace orex::gen
