#include "estkit/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "estkit/rng.hpp"
#include "simplex.hpp"

namespace estkit {

namespace {

void attach_error(EstimateReport& rep, const std::optional<Vector>& truth) {
  if (truth) rep.error_l2 = (rep.estimate - *truth).norm();
}

double sign_agreement(const Matrix& A, const Vector& xhat, const Vector& y) {
  Vector z = A * xhat;
  long ok = 0;
  for (Index i = 0; i < z.size(); ++i) {
    double s = z[i] < 0 ? -1.0 : 1.0;
    if (s == y[i]) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(z.size());
}

void check_pm_one(const Vector& y) {
  for (Index i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw InvalidParamError("one-bit estimators need y in {-1, +1}");
}

}  // namespace

EstimateReport estimate_linear_feasibility(const FeasibleSet& set, const Matrix& A,
                                           const Vector& y, double eps,
                                           const std::optional<Vector>& truth) {
  if (eps < 0) throw InvalidParamError("estimate_linear_feasibility: eps must be >= 0");
  EstimateReport rep;
  auto [x, diag] = pocs_intersect(set, A, y, eps);
  rep.estimate = std::move(x);
  rep.diagnostics = std::move(diag);
  attach_error(rep, truth);
  return rep;
}

EstimateReport estimate_linear_gauge(const FeasibleSet& set, const Matrix& A, const Vector& y,
                                     double eps, const std::optional<Vector>& truth,
                                     SolverPath path) {
  EstimateReport rep;
  if (set.kind() == SetKind::L1Ball && path != SolverPath::Splitting) {
    // gauge minimization over an l1 ball is plain l1 minimization (the radius
    // scales the objective, not the minimizer)
    auto [x, diag] = l1_min(A, y, eps, path);
    diag.objective = x.lpNorm<1>() / set.descriptor().radius;
    rep.estimate = std::move(x);
    rep.diagnostics = std::move(diag);
  } else {
    auto [x, diag] = gauge_min(set.is_convex() ? set : set.convex_hull(), A, y, eps);
    rep.estimate = std::move(x);
    rep.diagnostics = std::move(diag);
  }
  attach_error(rep, truth);
  return rep;
}

EstimateReport estimate_sparse_dictionary(const Matrix& D, const Matrix& A, const Vector& y,
                                          double eps, const std::optional<Vector>& truth) {
  if (eps < 0) throw InvalidParamError("estimate_sparse_dictionary: eps must be >= 0");
  if (D.rows() != A.cols()) throw InvalidParamError("estimate_sparse_dictionary: shapes");
  for (Index j = 0; j < D.cols(); ++j)
    if (D.col(j).norm() > 1.0 + 1e-9)
      throw InvalidParamError("estimate_sparse_dictionary: dictionary columns need norm <= 1");
  Matrix AD = A * D;
  auto [alpha, diag] = l1_min(AD, y, eps);
  EstimateReport rep;
  rep.estimate = D * alpha;
  rep.auxiliary = std::move(alpha);
  rep.diagnostics = std::move(diag);
  rep.diagnostics.feasibility_gap = std::max(
      0.0, (A * rep.estimate - y).lpNorm<1>() / static_cast<double>(A.rows()) - eps);
  attach_error(rep, truth);
  return rep;
}

EstimateReport estimate_lowrank(const Matrix& A, const Vector& y, Index d1, Index d2,
                                double eps, const std::optional<Vector>& truth) {
  if (A.cols() != d1 * d2) throw InvalidParamError("estimate_lowrank: A must sense d1*d2");
  FeasibleSet ball(SetDescriptor::nuclear_ball(1.0, d1, d2));
  auto [x, diag] = gauge_min(ball, A, y, eps);
  EstimateReport rep;
  rep.estimate = std::move(x);
  rep.diagnostics = std::move(diag);
  attach_error(rep, truth);
  return rep;
}

EstimateReport complete_matrix(const Matrix& Y, const BoolMatrix& mask, double p, Index r,
                               const std::optional<Matrix>& truth) {
  if (!(p > 0) || p > 1) throw InvalidParamError("complete_matrix: need 0 < p <= 1");
  if (r < 1) throw InvalidParamError("complete_matrix: need r >= 1");
  if (Y.rows() != mask.rows() || Y.cols() != mask.cols())
    throw InvalidParamError("complete_matrix: mask shape mismatch");
  Matrix scaled = Y / p;
  // entries outside the mask are unobserved and enter as zeros
  for (Index j = 0; j < Y.cols(); ++j)
    for (Index i = 0; i < Y.rows(); ++i)
      if (!mask(i, j)) scaled(i, j) = 0.0;
  auto [Xr, svals] = truncated_svd(scaled, std::min<Index>(r, std::min(Y.rows(), Y.cols())));
  EstimateReport rep;
  rep.estimate = flatten(Xr);
  rep.diagnostics.converged = true;
  rep.diagnostics.method = "truncated-svd";
  rep.diagnostics.objective = svals.head(std::min<Index>(r, svals.size())).sum();
  if (truth) {
    double scale = std::sqrt(static_cast<double>(Y.rows()) * static_cast<double>(Y.cols()));
    rep.error_l2 = (Xr - *truth).norm() / scale;  // per-entry error
  }
  return rep;
}

EstimateReport estimate_onebit(const FeasibleSet& set, const Matrix& A, const Vector& y,
                               const std::optional<Vector>& truth) {
  check_pm_one(y);
  if (set.outer_radius() > 1.0 + 1e-9)
    throw InvalidParamError("estimate_onebit: the feasible set must sit inside the unit ball");
  const FeasibleSet hull = set.is_convex() ? set : set.convex_hull();
  Vector eta = A.transpose() * y;
  SupportResult sup = hull.support(eta);
  EstimateReport rep;
  rep.estimate = sup.argmax;
  rep.diagnostics.converged = true;
  rep.diagnostics.method = "support-argmax";
  rep.diagnostics.objective = sup.value;
  attach_error(rep, truth);
  return rep;
}

EstimateReport estimate_onebit_feasible(const FeasibleSet& set, const Matrix& A,
                                        const Vector& y, int restarts, std::uint64_t seed,
                                        const std::optional<Vector>& truth) {
  check_pm_one(y);
  if (restarts < 1) throw InvalidParamError("estimate_onebit_feasible: restarts >= 1");
  EstimateReport base = estimate_onebit(set, A, y);
  auto to_sphere_member = [&](Vector v) {
    Vector u = set.project(v);
    double nn = u.norm();
    if (nn > 0) u /= nn;
    return u;
  };
  Vector best = to_sphere_member(base.estimate);
  double best_agree = sign_agreement(A, best, y);
  const double m = static_cast<double>(A.rows());
  for (int rs = 0; rs < restarts && best_agree < 1.0; ++rs) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(rs), 0x0b17ULL}));
    Vector x = best;
    for (int it = 0; it < 200; ++it) {
      // nudge toward violated half-spaces, stay on the set
      Vector z = A * x;
      Vector push = Vector::Zero(x.size());
      for (Index i = 0; i < z.size(); ++i) {
        double s = z[i] < 0 ? -1.0 : 1.0;
        if (s != y[i]) push += y[i] * A.row(i).transpose();
      }
      if (push.norm() == 0.0) break;
      double step = (0.5 + rng.uniform()) / m;
      x = to_sphere_member(x + step * push);
      double agree = sign_agreement(A, x, y);
      if (agree > best_agree) {
        best_agree = agree;
        best = x;
        if (agree == 1.0) break;
      }
    }
  }
  EstimateReport rep;
  rep.estimate = best;
  rep.agreement = best_agree;
  rep.diagnostics.converged = best_agree == 1.0;
  rep.diagnostics.method = "onebit-feasibility-heuristic";
  rep.diagnostics.objective = best_agree;
  attach_error(rep, truth);
  return rep;
}

EstimateReport estimate_single_index(const FeasibleSet& cone, const Matrix& A, const Vector& y,
                                     const std::optional<LinkConstants>& constants,
                                     const std::optional<Vector>& truth) {
  if (!cone.is_cone())
    throw InvalidParamError("estimate_single_index: supported for cone kinds only");
  if (A.rows() != y.size()) throw InvalidParamError("estimate_single_index: shapes");
  Vector xlin = (A.transpose() * y) / static_cast<double>(A.rows());
  EstimateReport rep;
  rep.estimate = cone.project(xlin);
  rep.auxiliary = std::move(xlin);
  rep.diagnostics.converged = true;
  rep.diagnostics.method = "project-linear-estimate";
  if (constants && truth) {
    Vector xbar = *truth / truth->norm();
    rep.scaled_target = constants->lambda * xbar;
    rep.error_l2 = (rep.estimate - *rep.scaled_target).norm();
  } else {
    attach_error(rep, truth);
  }
  return rep;
}

}  // namespace estkit
