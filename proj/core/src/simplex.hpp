#pragma once

#include "estkit/types.hpp"

namespace estkit {

struct LpSolution {
  Vector x;
  double objective = 0.0;
  bool feasible = false;
  bool bounded = true;
  long pivots = 0;
};

// min c^T x  s.t.  A x = b, x >= 0   (dense two-phase simplex, Bland's rule)
LpSolution lp_solve_eq(const Matrix& A, const Vector& b, const Vector& c);

// exhaustive basic-solution enumeration; test oracle for tiny instances
LpSolution lp_brute_force_eq(const Matrix& A, const Vector& b, const Vector& c);

}  // namespace estkit
