#pragma once

#include "orex/numerics.hpp"

namespace orex::lp {

/// min cost . x  s.to  constraint_matrix x = rhs, x >= 0.
struct StandardLP {
  Vector cost;
  Matrix constraint_matrix;  // k x n, k <= n expected
  Vector rhs;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
  Status status = Status::infeasible;
  Vector x;      // basic feasible solution on optimal (at most k nonzeros)
  double value = 0.0;
  Vector dual;   // one multiplier per constraint row; 0 on redundant rows
};

/// Two-phase dense simplex with Bland's anti-cycling pivot rule.
Solution solve_lp(const StandardLP& p);

}  // namespace orex::lp
