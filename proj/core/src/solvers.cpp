#include "estkit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "simplex.hpp"

namespace estkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// descriptor dilated by t (t K); valid for bounded star-shaped kinds
SetDescriptor scaled_descriptor(const SetDescriptor& d, double t) {
  SetDescriptor out = d;
  switch (d.kind) {
    case SetKind::EuclideanBall:
    case SetKind::L1Ball:
    case SetKind::ConvexSparse:
    case SetKind::DictionaryHull:
    case SetKind::NuclearBall:
      out.radius = d.radius * t;
      return out;
    case SetKind::Hypercube:
      out.halfwidth = d.halfwidth * t;
      return out;
    default:
      throw InvalidParamError("gauge_min: set kind has no dilation parameter");
  }
}
}  // namespace

std::string to_string(SolverPath path) {
  switch (path) {
    case SolverPath::Auto: return "auto";
    case SolverPath::Lp: return "lp";
    case SolverPath::Splitting: return "splitting";
  }
  return "auto";
}

SolverPath solver_path_from_string(const std::string& name) {
  if (name == "auto") return SolverPath::Auto;
  if (name == "lp") return SolverPath::Lp;
  if (name == "splitting") return SolverPath::Splitting;
  throw ConfigError("unknown solver path: " + name);
}

L1TubeProjector::L1TubeProjector(Matrix A, Vector y, double eps)
    : A_(std::move(A)), y_(std::move(y)), eps_(eps), cod_(A_) {
  if (eps_ < 0) throw InvalidParamError("l1 tube: eps must be >= 0");
  if (A_.rows() != y_.size()) throw InvalidParamError("l1 tube: shape mismatch");
}

double L1TubeProjector::gap(const Vector& x) const {
  double r = (A_ * x - y_).lpNorm<1>() / static_cast<double>(A_.rows());
  return std::max(0.0, r - eps_);
}

Vector L1TubeProjector::project(const Vector& x0, long iters) const {
  const double budget = eps_ * static_cast<double>(A_.rows());
  Vector x = x0;
  for (long k = 0; k < iters; ++k) {
    Vector r = A_ * x - y_;
    if (r.lpNorm<1>() <= budget + 1e-13 * (1.0 + budget)) return x;
    Vector z = budget > 0 ? project_l1_ball(r, budget) : Vector(Vector::Zero(r.size()));
    x += cod_.solve(z - r);
    // full row rank: one consistency step lands exactly on the tube boundary
    if (A_.rows() <= A_.cols()) return x;
  }
  return x;
}

Vector project_l1_tube(const Matrix& A, const Vector& y, double eps, const Vector& x0,
                       long iters) {
  return L1TubeProjector(A, y, eps).project(x0, iters);
}

namespace {

struct PocsOutcome {
  Vector x;
  SolveDiagnostics diag;
  bool empty = false;
};

PocsOutcome pocs_run(const FeasibleSet& set, const L1TubeProjector& tube,
                     const PocsOptions& opts, const Vector& start) {
  PocsOutcome out;
  Vector x = start;
  double best_res = kInf;
  long since_best = 0;
  long it = 0;
  for (; it < opts.max_iters; ++it) {
    Vector xs = set.project(x);
    Vector xt = tube.project(xs);
    double d_set = (xt - set.project(xt)).norm();
    double g = tube.gap(xt);
    double res = std::max(d_set, g);
    x = xt;
    if (res <= opts.tol) {
      out.x = x;
      out.diag.iterations = it + 1;
      out.diag.primal_residual = res;
      out.diag.feasibility_gap = g;
      out.diag.converged = true;
      out.diag.method = "pocs";
      return out;
    }
    if (res < best_res - 0.01 * opts.tol) {
      best_res = res;
      since_best = 0;
    } else if (++since_best >= opts.plateau_window) {
      break;
    }
  }
  out.x = x;
  out.diag.iterations = it;
  out.diag.primal_residual = best_res;
  out.diag.feasibility_gap = tube.gap(x);
  out.diag.converged = false;
  out.diag.method = "pocs";
  out.empty = true;
  return out;
}

}  // namespace

std::pair<Vector, SolveDiagnostics> pocs_intersect(const FeasibleSet& set, const Matrix& A,
                                                   const Vector& y, double eps,
                                                   const PocsOptions& opts) {
  const FeasibleSet work = set.is_convex() ? set : set.convex_hull();
  L1TubeProjector tube(A, y, eps);
  Vector start = tube.project(Vector::Zero(A.cols()));
  auto out = pocs_run(work, tube, opts, start);
  if (out.empty && opts.throw_on_empty)
    throw EmptyIntersectionError("pocs_intersect: residual plateaued at " +
                                 std::to_string(out.diag.primal_residual));
  out.diag.objective = work.is_bounded() ? work.gauge(out.x) : 0.0;
  return {out.x, out.diag};
}

std::pair<Vector, SolveDiagnostics> gauge_min(const FeasibleSet& set, const Matrix& A,
                                              const Vector& y, double eps,
                                              const GaugeMinOptions& opts) {
  if (!set.is_bounded()) throw InvalidParamError("gauge_min: set must be bounded");
  const FeasibleSet work = set.is_convex() ? set : set.convex_hull();
  const Index m = A.rows(), n = A.cols();
  L1TubeProjector tube(A, y, eps);

  SolveDiagnostics diag;
  diag.method = "bisection-pocs";

  // 0 feasible <=> minimum gauge is 0
  if (y.lpNorm<1>() / static_cast<double>(m) <= eps + 1e-15) {
    diag.converged = true;
    diag.objective = 0.0;
    return {Vector::Zero(n), diag};
  }

  Vector x_ls = tube.project(Vector::Zero(n), 256);
  if (eps == 0.0 && m >= n) {  // a single feasible point (or none)
    if (tube.gap(x_ls) > 1e-7)
      throw EmptyIntersectionError("gauge_min: overdetermined system has no solution");
    diag.converged = true;
    diag.feasibility_gap = tube.gap(x_ls);
    diag.objective = work.gauge(x_ls);
    return {x_ls, diag};
  }
  if (tube.gap(x_ls) > 1e-9) {
    auto probe = pocs_run(work, tube, opts.pocs, x_ls);
    if (probe.empty)
      throw EmptyIntersectionError("gauge_min: tube appears empty");
    x_ls = probe.x;
  }

  double t_hi = work.gauge(x_ls);
  if (!std::isfinite(t_hi))
    throw NoRepresentationError("gauge_min: feasible point has infinite gauge");
  if (t_hi <= 0) {
    diag.converged = true;
    diag.objective = 0.0;
    return {Vector::Zero(n), diag};
  }

  Vector witness = x_ls;
  double t_lo = 0.0;
  long total_iters = 0;
  for (int step = 0; step < opts.bisection_steps; ++step) {
    double t = 0.5 * (t_lo + t_hi);
    FeasibleSet scaled(scaled_descriptor(work.descriptor(), t));
    auto probe = pocs_run(scaled, tube, opts.pocs, witness);
    total_iters += probe.diag.iterations;
    if (probe.diag.converged) {
      t_hi = t;
      witness = probe.x;
    } else {
      t_lo = t;
    }
  }

  diag.iterations = total_iters;
  diag.converged = true;
  diag.feasibility_gap = tube.gap(witness);
  diag.primal_residual = diag.feasibility_gap;
  diag.objective = work.gauge(witness);
  return {witness, diag};
}

std::pair<Vector, SolveDiagnostics> l1_min(const Matrix& A, const Vector& y, double eps,
                                           SolverPath path) {
  if (eps < 0) throw InvalidParamError("l1_min: eps must be >= 0");
  const Index m = A.rows(), n = A.cols();
  SolveDiagnostics diag;

  if (eps == 0.0 && m >= n && path != SolverPath::Splitting) {
    Vector x = A.completeOrthogonalDecomposition().solve(y);
    if ((A * x - y).lpNorm<1>() / static_cast<double>(m) > 1e-8 * (1.0 + y.norm()))
      throw EmptyIntersectionError("l1_min: overdetermined system has no solution");
    diag.converged = true;
    diag.method = "direct";
    diag.objective = x.lpNorm<1>();
    return {x, diag};
  }

  const bool lp_ok = (n + m) <= 1024;
  const bool use_lp = path == SolverPath::Lp || (path == SolverPath::Auto && lp_ok);

  if (use_lp) {
    LpSolution sol;
    if (eps == 0.0) {
      Matrix Aeq(m, 2 * n);
      Aeq << A, -A;
      sol = lp_solve_eq(Aeq, y, Vector::Ones(2 * n));
    } else {
      // vars [p; q; r; s; t]: A(p-q) - r + s = y,  sum(r+s) + t = m*eps
      const Index nv = 2 * n + 2 * m + 1;
      Matrix Aeq = Matrix::Zero(m + 1, nv);
      Aeq.block(0, 0, m, n) = A;
      Aeq.block(0, n, m, n) = -A;
      Aeq.block(0, 2 * n, m, m) = -Matrix::Identity(m, m);
      Aeq.block(0, 2 * n + m, m, m) = Matrix::Identity(m, m);
      Aeq.row(m).segment(2 * n, 2 * m).setOnes();
      Aeq(m, nv - 1) = 1.0;
      Vector b(m + 1);
      b.head(m) = y;
      b[m] = eps * static_cast<double>(m);
      Vector c = Vector::Zero(nv);
      c.head(2 * n).setOnes();
      sol = lp_solve_eq(Aeq, b, c);
    }
    if (!sol.feasible)
      throw EmptyIntersectionError("l1_min: LP infeasible (tube is empty)");
    if (!sol.bounded) throw NotConvergedError("l1_min: LP unbounded");
    Vector x = sol.x.head(n) - sol.x.segment(n, n);
    diag.converged = true;
    diag.method = "lp";
    diag.iterations = sol.pivots;
    diag.objective = x.lpNorm<1>();
    diag.feasibility_gap =
        std::max(0.0, (A * x - y).lpNorm<1>() / static_cast<double>(m) - eps);
    return {x, diag};
  }

  auto [x, gdiag] = gauge_min(FeasibleSet(SetDescriptor::l1_ball(n, 1.0)), A, y, eps);
  gdiag.method = "splitting";
  gdiag.objective = x.lpNorm<1>();
  if (!gdiag.converged) throw NotConvergedError("l1_min: splitting path did not converge");
  return {x, gdiag};
}

std::pair<Matrix, Vector> truncated_svd(const Matrix& Y, Index r) {
  if (r < 1 || r > std::min(Y.rows(), Y.cols()))
    throw InvalidParamError("truncated_svd: need 1 <= r <= min(d1, d2)");
  Matrix U, V;
  Vector s;
  if (std::min(Y.rows(), Y.cols()) <= 32) {
    Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    U = svd.matrixU();
    V = svd.matrixV();
    s = svd.singularValues();
  } else {
    Eigen::BDCSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    U = svd.matrixU();
    V = svd.matrixV();
    s = svd.singularValues();
  }
  Matrix Xr = U.leftCols(r) * s.head(r).asDiagonal() * V.leftCols(r).transpose();
  return {Xr, s};
}

}  // namespace estkit
