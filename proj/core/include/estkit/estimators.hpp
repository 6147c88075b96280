#pragma once

#include <optional>

#include "estkit/observations.hpp"
#include "estkit/solvers.hpp"

namespace estkit {

struct EstimateReport {
  Vector estimate;
  std::optional<Vector> auxiliary;      // alpha-hat (dictionary) or x-hat-lin (single index)
  SolveDiagnostics diagnostics;
  std::optional<double> error_l2;       // ||estimate - truth||_2 when truth known
  std::optional<Vector> scaled_target;  // lambda * xbar for non-linear models
  std::optional<double> agreement;      // sign-pattern agreement (one-bit feasibility)
};

// Any point of K within the l1 tube around y (alternating projections).
EstimateReport estimate_linear_feasibility(const FeasibleSet& set, const Matrix& A,
                                           const Vector& y, double eps,
                                           const std::optional<Vector>& truth = {});

// minimize ||x'||_K subject to (1/m)||A x' - y||_1 <= eps.
EstimateReport estimate_linear_gauge(const FeasibleSet& set, const Matrix& A, const Vector& y,
                                     double eps, const std::optional<Vector>& truth = {},
                                     SolverPath path = SolverPath::Auto);

// minimize ||alpha'||_1 with x' = D alpha' inside the tube; returns alpha-hat
// as auxiliary and x-hat = D alpha-hat as the estimate.
EstimateReport estimate_sparse_dictionary(const Matrix& D, const Matrix& A, const Vector& y,
                                          double eps, const std::optional<Vector>& truth = {});

// Nuclear-norm minimization over the tube; A senses flattened d1 x d2 matrices.
EstimateReport estimate_lowrank(const Matrix& A, const Vector& y, Index d1, Index d2,
                                double eps = 0.0, const std::optional<Vector>& truth = {});

// Best rank-r approximation of p^{-1} Y; error reported per entry when truth
// is supplied.
EstimateReport complete_matrix(const Matrix& Y, const BoolMatrix& mask, double p, Index r,
                               const std::optional<Matrix>& truth = {});

// maximize <A x', y> over x' in K (one support-oracle call on the hull).
EstimateReport estimate_onebit(const FeasibleSet& set, const Matrix& A, const Vector& y,
                               const std::optional<Vector>& truth = {});

// Best-effort search for x-hat in K with sign(A x-hat) = y; reports achieved
// agreement (the program is not convex, feasibility is not guaranteed).
EstimateReport estimate_onebit_feasible(const FeasibleSet& set, const Matrix& A,
                                        const Vector& y, int restarts,
                                        std::uint64_t seed = 0,
                                        const std::optional<Vector>& truth = {});

// Two-step single-index estimator: x-lin = (1/m) A^T y, then metric
// projection onto the cone. With link constants and truth supplied, reports
// the error against lambda * xbar.
EstimateReport estimate_single_index(const FeasibleSet& cone, const Matrix& A, const Vector& y,
                                     const std::optional<LinkConstants>& constants = {},
                                     const std::optional<Vector>& truth = {});

}  // namespace estkit
