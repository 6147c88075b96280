#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace estkit {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

// Tableau simplex on T = [A | b] with basis tracking. cost holds reduced
// costs, costRhs the negated objective value. Bland's rule throughout.
struct Tableau {
  Matrix T;            // m x (n+1)
  Eigen::RowVectorXd cost;  // 1 x (n+1), last entry = -objective
  std::vector<Index> basis;
  long pivots = 0;

  Index rows() const { return T.rows(); }
  Index cols() const { return T.cols() - 1; }

  void pivot(Index r, Index col) {
    T.row(r) /= T(r, col);
    for (Index i = 0; i < T.rows(); ++i) {
      if (i == r) continue;
      double f = T(i, col);
      if (f != 0.0) T.row(i) -= f * T.row(r);
    }
    double f = cost[col];
    if (f != 0.0) cost -= f * T.row(r);
    basis[static_cast<size_t>(r)] = col;
    ++pivots;
  }

  // returns false when optimal, throws nothing; unbounded flagged via out-param
  bool step(bool* unbounded) {
    Index enter = -1;
    for (Index j = 0; j < cols(); ++j) {
      if (cost[j] < -kCostTol) {
        enter = j;
        break;  // Bland: lowest index
      }
    }
    if (enter < 0) return false;
    Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < rows(); ++i) {
      double a = T(i, enter);
      if (a > kPivotTol) {
        double ratio = T(i, cols()) / a;
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 &&
             (leave < 0 || basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)]))) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      *unbounded = true;
      return false;
    }
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

LpSolution lp_solve_eq(const Matrix& A, const Vector& b, const Vector& c) {
  const Index m = A.rows(), n = A.cols();
  if (b.size() != m || c.size() != n) throw InvalidParamError("lp_solve_eq: shape mismatch");

  Tableau tab;
  tab.T.resize(m, n + m + 1);
  tab.T.leftCols(n) = A;
  tab.T.middleCols(n, m) = Matrix::Identity(m, m);
  tab.T.col(n + m) = b;
  for (Index i = 0; i < m; ++i) {
    if (tab.T(i, n + m) < 0) tab.T.row(i) *= -1.0;
    tab.T(i, n + i) = 1.0;  // re-assert after possible row negation
  }
  tab.basis.resize(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) tab.basis[static_cast<size_t>(i)] = n + i;

  // phase 1: minimize sum of artificials
  tab.cost = Eigen::RowVectorXd::Zero(n + m + 1);
  tab.cost.segment(n, m).setOnes();
  for (Index i = 0; i < m; ++i) tab.cost -= tab.T.row(i);  // price out the basis

  LpSolution sol;
  bool unbounded = false;
  while (tab.step(&unbounded)) {
  }
  double phase1 = -tab.cost[n + m];
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (phase1 > 1e-7 * scale) {
    sol.feasible = false;
    sol.pivots = tab.pivots;
    return sol;
  }

  // drive artificials out of the basis where possible; redundant rows keep a
  // zero-valued artificial which is then frozen
  std::vector<bool> frozen_row(static_cast<size_t>(m), false);
  for (Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<size_t>(i)] >= n) {
      Index piv = -1;
      for (Index j = 0; j < n; ++j) {
        if (std::abs(tab.T(i, j)) > 1e-9) {
          piv = j;
          break;
        }
      }
      if (piv >= 0) tab.pivot(i, piv);
      else frozen_row[static_cast<size_t>(i)] = true;
    }
  }

  // phase 2 over the original columns only
  tab.cost.setZero();
  tab.cost.head(n) = c.transpose();
  for (Index i = 0; i < m; ++i) {
    Index bi = tab.basis[static_cast<size_t>(i)];
    if (bi < n && tab.cost[bi] != 0.0) tab.cost -= tab.cost[bi] * tab.T.row(i);
  }
  // forbid artificials from re-entering
  for (Index j = n; j < n + m; ++j) tab.cost[j] = 1.0;

  unbounded = false;
  while (tab.step(&unbounded)) {
  }

  sol.feasible = true;
  sol.bounded = !unbounded;
  sol.pivots = tab.pivots;
  sol.x = Vector::Zero(n);
  if (sol.bounded) {
    for (Index i = 0; i < m; ++i) {
      Index bi = tab.basis[static_cast<size_t>(i)];
      if (bi < n) sol.x[bi] = tab.T(i, n + m);
    }
    sol.objective = c.dot(sol.x);
  }
  return sol;
}

LpSolution lp_brute_force_eq(const Matrix& A, const Vector& b, const Vector& c) {
  const Index m = A.rows(), n = A.cols();
  if (n > 24) throw InvalidParamError("lp_brute_force_eq: instance too large");
  LpSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<Index> comb;
  std::vector<Index> stack;
  // enumerate all column subsets of size <= m and solve the square systems
  std::function<void(Index, Index)> rec = [&](Index start, Index want) {
    if (want == 0) {
      Matrix B(m, static_cast<Index>(stack.size()));
      for (size_t k = 0; k < stack.size(); ++k) B.col(static_cast<Index>(k)) = A.col(stack[k]);
      Vector xb = B.completeOrthogonalDecomposition().solve(b);
      if ((B * xb - b).norm() > 1e-8 * (1.0 + b.norm())) return;
      if (xb.minCoeff() < -1e-9) return;
      Vector x = Vector::Zero(n);
      for (size_t k = 0; k < stack.size(); ++k) x[stack[k]] = std::max(xb[static_cast<Index>(k)], 0.0);
      double obj = c.dot(x);
      if (obj < best.objective - 1e-12) {
        best.objective = obj;
        best.x = x;
        best.feasible = true;
      }
      return;
    }
    for (Index j = start; j <= n - want; ++j) {
      stack.push_back(j);
      rec(j + 1, want - 1);
      stack.pop_back();
    }
  };
  for (Index k = std::min(m, n); k >= 0; --k) {
    stack.clear();
    rec(0, k);
    if (k == 0) break;
  }
  return best;
}

}  // namespace estkit
