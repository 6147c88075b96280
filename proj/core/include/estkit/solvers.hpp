#pragma once

#include <string>
#include <utility>

#include "estkit/sets.hpp"

namespace estkit {

struct SolveDiagnostics {
  long iterations = 0;
  double primal_residual = 0.0;
  double feasibility_gap = 0.0;  // max(0, (1/m)||A xhat - y||_1 - eps)
  double objective = 0.0;
  bool converged = false;
  std::string method;
};

enum class SolverPath { Auto, Lp, Splitting };

std::string to_string(SolverPath path);
SolverPath solver_path_from_string(const std::string& name);

// Projector onto the tube T = {x : (1/m)||A x - y||_1 <= eps}. Splits
// z = A x - y, projects z onto the l1 ball of radius m*eps, and restores
// consistency with min-norm least-squares steps. Precomputes a decomposition
// of A, so repeated projections are cheap.
class L1TubeProjector {
 public:
  L1TubeProjector(Matrix A, Vector y, double eps);

  Vector project(const Vector& x0, long iters = 64) const;
  double gap(const Vector& x) const;
  const Matrix& A() const { return A_; }
  const Vector& y() const { return y_; }
  double eps() const { return eps_; }

 private:
  Matrix A_;
  Vector y_;
  double eps_;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod_;
};

Vector project_l1_tube(const Matrix& A, const Vector& y, double eps, const Vector& x0,
                       long iters = 64);

struct PocsOptions {
  long max_iters = 5000;
  double tol = 1e-8;
  long plateau_window = 50;
  bool throw_on_empty = true;
};

// Alternating projections between the (convexified) set and the l1 tube.
// Diagnoses an empty intersection when the residual plateaus above tol.
std::pair<Vector, SolveDiagnostics> pocs_intersect(const FeasibleSet& set, const Matrix& A,
                                                   const Vector& y, double eps,
                                                   const PocsOptions& opts = {});

struct GaugeMinOptions {
  int bisection_steps = 40;
  PocsOptions pocs{.max_iters = 1200, .tol = 1e-8, .plateau_window = 50, .throw_on_empty = false};
};

// minimize ||x||_K subject to (1/m)||A x - y||_1 <= eps, by bisection on the
// dilation t of K with POCS feasibility probes of (tK) intersect tube.
std::pair<Vector, SolveDiagnostics> gauge_min(const FeasibleSet& set, const Matrix& A,
                                              const Vector& y, double eps,
                                              const GaugeMinOptions& opts = {});

// minimize ||x||_1 subject to (1/m)||A x - y||_1 <= eps. Exact dense-simplex
// LP when n + m <= 1024 (reformulated with split signs and residual slacks),
// splitting fallback above that. diagnostics.method records which path ran.
std::pair<Vector, SolveDiagnostics> l1_min(const Matrix& A, const Vector& y, double eps,
                                           SolverPath path = SolverPath::Auto);

// Best rank-r approximation (thin SVD, leading r triplets) plus the full
// singular value vector of Y.
std::pair<Matrix, Vector> truncated_svd(const Matrix& Y, Index r);

}  // namespace estkit
