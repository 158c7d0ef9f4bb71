#pragma once

#include "orex/global.hpp"
#include "orex/oracle.hpp"

namespace orex {

struct LocalReport {
  Vector estimate;       // Q f0^{tau_y}
  double tau_y = 0.0;    // data-dependent parameter, original weighting
  double c0 = 0.0;       // ratio-normalized, c0 + c1 = 1
  double c1 = 0.0;
  double radius = 0.0;   // sqrt of the Chebyshev bound; exact when certified
  bool certified = false;
  KernelCase kernel_case = KernelCase::none;
  ChebyshevReport cheb;
};

/// Locally optimal recovery through the compound Chebyshev-center solve;
/// certified when a kernel inclusion holds and the orthogonality
/// certificate is met at tau_y. Otherwise the report still carries the
/// unconditional upper bound.
LocalReport local_recover(const MultiFidelityProblem& p, const Observation& y,
                          double cert_tol = 1e-7);

/// Data of the local semidefinite program: the first LMI is the kernel LMI
/// of the global program; the second one bordered by w(c0, c1) and b.
struct LocalSdp {
  Vector u0;  // P0 pinv(lambda0) y0
  Vector u1;  // P1 (pinv(lambda0) y0 - pinv(lambda1) y1)
  KernelLmi lmi;
  Vector w_c0;  // border column multiplying c0
  Vector w_c1;  // border column multiplying c1
  double const0 = 0.0;  // e0^2 - |u0|^2
  double const1 = 0.0;  // e1^2 - |u1|^2
};

LocalSdp assemble_local_sdp(const MultiFidelityProblem& p,
                            const Observation& y);

struct LocalSdpSolve {
  double value = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double b = 0.0;
};

/// Grid-refined solve of the local SDP; cross-check oracle for the radius.
LocalSdpSolve solve_local_sdp(const LocalSdp& sdp);

struct RadiusBound {
  double upper = 0.0;
  double lower = 0.0;
};

/// Certified two-sided enclosure: the Chebyshev upper bound against the
/// best feasible-pair lower bound (witnesses first, then sampling).
RadiusBound local_radius_bound(const MultiFidelityProblem& p,
                               const Observation& y,
                               const oracle::SampleBudget& budget = {});

}  // namespace orex
