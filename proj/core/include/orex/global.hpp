#pragma once

#include "orex/chebyshev.hpp"

namespace orex {

/// Kernel-restricted LMI blocks of the global program: the constraint
/// c0 |P0 f0|^2 + c1 |P1(f0-f1)|^2 >= |Q f0|^2 over ker(lambda0) x
/// ker(lambda1) reads c0 A + c1 B >= C on R^{k0+k1}.
struct KernelLmi {
  Matrix a;
  Matrix b;
  Matrix c;
  Index k0 = 0;
  Index k1 = 0;
};

KernelLmi assemble_kernel_lmi(const MultiFidelityProblem& p);

struct GlobalSolution {
  double c0 = 0.0;
  double c1 = 0.0;
  double tau_sharp = 0.5;       // c1 / (c0 + c1), original parameterization
  double sigma_compound = 0.5;  // mixing weight on the compound operators
  double gwce_sq = 0.0;
  Matrix map_matrix;            // z x (m0 + m1)
};

/// Globally optimal recovery: minimal c0 e0^2 + c1 e1^2 subject to the
/// kernel LMI, solved through the one-dimensional eigenvalue reduction on
/// the compound space. The two mixing parameters are distinct:
/// sigma_compound weights |Rf|^2 vs |Sf|^2, tau_sharp weights the original
/// |P0 f0|^2 vs |P1(f0-f1)|^2 objective.
GlobalSolution solve_global(const MultiFidelityProblem& p);

struct GlobalEstimate {
  Vector estimate;
  double bound = 0.0;
};

/// Applies the optimal map to data: estimate = q_tilde f^{sigma}, equal to
/// map_matrix * y within solver tolerance.
GlobalEstimate global_recover(const GlobalSolution& sol,
                              const CompoundOperators& ops, const Vector& y);

}  // namespace orex
