#include "estkit/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "simplex.hpp"

namespace estkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// indices of the k largest |v| entries, lowest index first among ties
std::vector<Index> top_k_indices(const Vector& v, Index k) {
  std::vector<Index> idx(v.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return std::abs(v[a]) > std::abs(v[b]); });
  idx.resize(static_cast<size_t>(std::min<Index>(k, v.size())));
  return idx;
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

Eigen::JacobiSVD<Matrix> small_svd(const Matrix& X, unsigned options) {
  return Eigen::JacobiSVD<Matrix>(X, options);
}

struct Svd {
  Matrix U, V;
  Vector s;
};

Svd svd_of(const Matrix& X) {
  Svd out;
  if (std::min(X.rows(), X.cols()) <= 32) {
    auto svd = small_svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.s = svd.singularValues();
  } else {
    Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.s = svd.singularValues();
  }
  return out;
}

Vector singular_values_of(const Matrix& X) {
  if (std::min(X.rows(), X.cols()) <= 32) return small_svd(X, 0).singularValues();
  return Eigen::BDCSVD<Matrix>(X).singularValues();
}

// Euclidean projection onto the probability simplex {a >= 0, sum a = 1}
Vector project_simplex(const Vector& v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    cum += u[static_cast<size_t>(i)];
    double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<size_t>(i)] - t > 0.0) {
      k = i + 1;
      theta = t;
    }
  }
  (void)k;
  return (v.array() - theta).max(0.0);
}

}  // namespace

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::EuclideanBall: return "EuclideanBall";
    case SetKind::L1Ball: return "L1Ball";
    case SetKind::Hypercube: return "Hypercube";
    case SetKind::SparseCone: return "SparseCone";
    case SetKind::SparseUnitSet: return "SparseUnitSet";
    case SetKind::ConvexSparse: return "ConvexSparse";
    case SetKind::DictionaryHull: return "DictionaryHull";
    case SetKind::FiniteSet: return "FiniteSet";
    case SetKind::LowRankCone: return "LowRankCone";
    case SetKind::NuclearBall: return "NuclearBall";
  }
  throw InvalidParamError("unknown set kind");
}

SetKind set_kind_from_string(const std::string& name) {
  for (auto k : {SetKind::EuclideanBall, SetKind::L1Ball, SetKind::Hypercube,
                 SetKind::SparseCone, SetKind::SparseUnitSet, SetKind::ConvexSparse,
                 SetKind::DictionaryHull, SetKind::FiniteSet, SetKind::LowRankCone,
                 SetKind::NuclearBall}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidParamError("unknown set kind: " + name);
}

// ---------------------------------------------------------------------------
// descriptor factories

SetDescriptor SetDescriptor::euclidean_ball(Index n, double radius) {
  if (n < 1) throw InvalidParamError("EuclideanBall: n must be >= 1");
  if (!(radius > 0)) throw InvalidParamError("EuclideanBall: radius must be positive");
  SetDescriptor d;
  d.kind = SetKind::EuclideanBall;
  d.n = n;
  d.radius = radius;
  return d;
}

SetDescriptor SetDescriptor::l1_ball(Index n, double radius) {
  if (n < 1) throw InvalidParamError("L1Ball: n must be >= 1");
  if (!(radius > 0)) throw InvalidParamError("L1Ball: radius must be positive");
  SetDescriptor d;
  d.kind = SetKind::L1Ball;
  d.n = n;
  d.radius = radius;
  return d;
}

SetDescriptor SetDescriptor::hypercube(Index n, double halfwidth) {
  if (n < 1) throw InvalidParamError("Hypercube: n must be >= 1");
  if (!(halfwidth > 0)) throw InvalidParamError("Hypercube: halfwidth must be positive");
  SetDescriptor d;
  d.kind = SetKind::Hypercube;
  d.n = n;
  d.halfwidth = halfwidth;
  return d;
}

SetDescriptor SetDescriptor::sparse_cone(Index n, Index s) {
  if (n < 1) throw InvalidParamError("SparseCone: n must be >= 1");
  if (s < 1 || s > n) throw InvalidParamError("SparseCone: need 1 <= s <= n");
  SetDescriptor d;
  d.kind = SetKind::SparseCone;
  d.n = n;
  d.s = s;
  return d;
}

SetDescriptor SetDescriptor::sparse_unit(Index n, Index s) {
  if (n < 1) throw InvalidParamError("SparseUnitSet: n must be >= 1");
  if (s < 1 || s > n) throw InvalidParamError("SparseUnitSet: need 1 <= s <= n");
  SetDescriptor d;
  d.kind = SetKind::SparseUnitSet;
  d.n = n;
  d.s = s;
  return d;
}

SetDescriptor SetDescriptor::convex_sparse(Index n, Index s, double radius) {
  if (n < 1) throw InvalidParamError("ConvexSparse: n must be >= 1");
  if (s < 1 || s > n) throw InvalidParamError("ConvexSparse: need 1 <= s <= n");
  if (!(radius > 0)) throw InvalidParamError("ConvexSparse: radius must be positive");
  SetDescriptor d;
  d.kind = SetKind::ConvexSparse;
  d.n = n;
  d.s = s;
  d.radius = radius;
  return d;
}

SetDescriptor SetDescriptor::dictionary_hull(Matrix dictionary, double radius) {
  if (dictionary.rows() < 1 || dictionary.cols() < 1)
    throw InvalidParamError("DictionaryHull: empty dictionary");
  if (!(radius > 0)) throw InvalidParamError("DictionaryHull: radius must be positive");
  for (Index j = 0; j < dictionary.cols(); ++j) {
    if (dictionary.col(j).norm() > 1.0 + 1e-9)
      throw InvalidParamError("DictionaryHull: column " + std::to_string(j) +
                              " has norm > 1");
  }
  SetDescriptor d;
  d.kind = SetKind::DictionaryHull;
  d.n = dictionary.rows();
  d.radius = radius;
  d.dictionary = std::move(dictionary);
  return d;
}

SetDescriptor SetDescriptor::finite_set(Matrix points) {
  if (points.rows() < 1 || points.cols() < 1)
    throw InvalidParamError("FiniteSet: needs at least one point");
  SetDescriptor d;
  d.kind = SetKind::FiniteSet;
  d.n = points.rows();
  d.points = std::move(points);
  return d;
}

SetDescriptor SetDescriptor::low_rank_cone(Index rank, Index d1, Index d2) {
  if (d1 < 1 || d2 < 1) throw InvalidParamError("LowRankCone: dims must be >= 1");
  if (rank < 1 || rank > std::min(d1, d2))
    throw InvalidParamError("LowRankCone: need 1 <= rank <= min(d1, d2)");
  SetDescriptor d;
  d.kind = SetKind::LowRankCone;
  d.rank = rank;
  d.d1 = d1;
  d.d2 = d2;
  d.n = d1 * d2;
  return d;
}

SetDescriptor SetDescriptor::nuclear_ball(double radius, Index d1, Index d2) {
  if (d1 < 1 || d2 < 1) throw InvalidParamError("NuclearBall: dims must be >= 1");
  if (!(radius > 0)) throw InvalidParamError("NuclearBall: radius must be positive");
  SetDescriptor d;
  d.kind = SetKind::NuclearBall;
  d.radius = radius;
  d.d1 = d1;
  d.d2 = d2;
  d.n = d1 * d2;
  return d;
}

// ---------------------------------------------------------------------------
// free-standing primitives

Vector project_l1_ball(const Vector& v, double radius) {
  if (!(radius > 0)) throw InvalidParamError("project_l1_ball: radius must be positive");
  if (v.lpNorm<1>() <= radius) return v;
  const Index n = v.size();
  std::vector<double> u(n);
  for (Index i = 0; i < n; ++i) u[static_cast<size_t>(i)] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (Index i = 0; i < n; ++i) {
    cum += u[static_cast<size_t>(i)];
    double t = (cum - radius) / static_cast<double>(i + 1);
    if (u[static_cast<size_t>(i)] - t > 0.0) theta = t;
  }
  Vector out(n);
  for (Index i = 0; i < n; ++i)
    out[i] = sign_of(v[i]) * std::max(std::abs(v[i]) - theta, 0.0);
  return out;
}

SupportResult l1l2_support(const Vector& eta, double l1, double l2) {
  SupportResult res;
  res.argmax = Vector::Zero(eta.size());
  if (!(l1 > 0) || !(l2 > 0)) return res;
  const double n2 = eta.norm();
  if (n2 == 0.0) return res;
  const double n1 = eta.lpNorm<1>();
  const double t = l1 / l2;
  if (n1 / n2 <= t) {  // l2 constraint alone is binding
    res.argmax = (l2 / n2) * eta;
    res.value = l2 * n2;
    return res;
  }
  const double amax = eta.cwiseAbs().maxCoeff();
  // count near-maximal entries; if the target ratio is below sqrt(k) the
  // optimum sits on the l1 face spanned by the maxima
  Index k = 0;
  for (Index i = 0; i < eta.size(); ++i)
    if (std::abs(eta[i]) >= amax * (1.0 - 1e-14)) ++k;
  if (t * t <= static_cast<double>(k) + 1e-12) {
    double mass = l1 / static_cast<double>(k);
    for (Index i = 0; i < eta.size(); ++i)
      if (std::abs(eta[i]) >= amax * (1.0 - 1e-14)) res.argmax[i] = sign_of(eta[i]) * mass;
    double nn = res.argmax.norm();
    if (nn > l2) res.argmax *= l2 / nn;  // also shrink if l2 still binds
    res.value = eta.dot(res.argmax);
    return res;
  }
  // soft-threshold level with ||S_lam||_1 / ||S_lam||_2 = t (ratio decreasing)
  double lo = 0.0, hi = amax;
  for (int it = 0; it < 200; ++it) {
    double lam = 0.5 * (lo + hi);
    double s1 = 0.0, s2 = 0.0;
    for (Index i = 0; i < eta.size(); ++i) {
      double z = std::abs(eta[i]) - lam;
      if (z > 0) {
        s1 += z;
        s2 += z * z;
      }
    }
    if (s2 == 0.0) {
      hi = lam;
      continue;
    }
    if (s1 / std::sqrt(s2) > t) lo = lam;
    else hi = lam;
  }
  double lam = 0.5 * (lo + hi), s2 = 0.0;
  Vector z(eta.size());
  for (Index i = 0; i < eta.size(); ++i) {
    double w = std::max(std::abs(eta[i]) - lam, 0.0);
    z[i] = sign_of(eta[i]) * w;
    s2 += w * w;
  }
  res.argmax = (l2 / std::sqrt(s2)) * z;
  res.value = eta.dot(res.argmax);
  return res;
}

namespace {

// water-filling weights for the variational form of the k-support norm:
// theta_i = clip(|v_i| / sqrt(nu) - mu, 0, 1) with sum theta = s
Vector ksupport_theta(const Vector& absv, Index s, double mu) {
  const Index n = absv.size();
  Index nnz = 0;
  double minpos = kInf, l1 = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (absv[i] > 0) {
      ++nnz;
      minpos = std::min(minpos, absv[i]);
      l1 += absv[i];
    }
  }
  Vector theta = Vector::Zero(n);
  if (nnz == 0) return theta;
  if (nnz <= s) {
    for (Index i = 0; i < n; ++i) theta[i] = absv[i] > 0 ? 1.0 : 0.0;
    return theta;
  }
  double sqlo = minpos / (2.0 * (1.0 + mu));
  double sqhi = 2.0 * l1 / static_cast<double>(s) + 2.0 * mu * absv.maxCoeff() + 1.0;
  double lo = sqlo * sqlo, hi = sqhi * sqhi;
  auto total = [&](double nu) {
    double sq = std::sqrt(nu), tot = 0.0;
    for (Index i = 0; i < n; ++i) {
      double th = absv[i] / sq - mu;
      if (th > 0) tot += std::min(th, 1.0);
    }
    return tot;
  };
  for (int it = 0; it < 200; ++it) {
    double nu = 0.5 * (lo + hi);
    if (total(nu) > static_cast<double>(s)) lo = nu;
    else hi = nu;
  }
  double sq = std::sqrt(0.5 * (lo + hi));
  for (Index i = 0; i < n; ++i) {
    double th = absv[i] / sq - mu;
    theta[i] = th > 0 ? std::min(th, 1.0) : 0.0;
  }
  return theta;
}

}  // namespace

double ksupport_norm(const Vector& x, Index s) {
  if (s < 1) throw InvalidParamError("ksupport_norm: s must be >= 1");
  const Vector a = x.cwiseAbs();
  Index nnz = 0;
  for (Index i = 0; i < a.size(); ++i)
    if (a[i] > 0) ++nnz;
  if (nnz == 0) return 0.0;
  if (nnz <= s) return x.norm();
  Vector theta = ksupport_theta(a, s, 0.0);
  double total = 0.0;
  for (Index i = 0; i < a.size(); ++i)
    if (theta[i] > 0) total += a[i] * a[i] / theta[i];
  return std::sqrt(total);
}

Vector ksupport_prox(const Vector& v, Index s, double mu) {
  if (mu <= 0.0) return v;
  Vector theta = ksupport_theta(v.cwiseAbs(), s, mu);
  Vector z(v.size());
  for (Index i = 0; i < v.size(); ++i)
    z[i] = theta[i] > 0 ? v[i] * theta[i] / (theta[i] + mu) : 0.0;
  return z;
}

Vector ksupport_ball_project(const Vector& v, Index s, double rho) {
  if (!(rho > 0)) throw InvalidParamError("ksupport_ball_project: rho must be positive");
  if (ksupport_norm(v, s) <= rho) return v;
  double hi = 1.0;
  while (ksupport_norm(ksupport_prox(v, s, hi), s) > rho) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mu = 0.5 * (lo + hi);
    if (ksupport_norm(ksupport_prox(v, s, mu), s) > rho) lo = mu;
    else hi = mu;
  }
  return ksupport_prox(v, s, hi);
}

SupportResult ksupport_support(const Vector& eta, Index s) {
  SupportResult res;
  res.argmax = Vector::Zero(eta.size());
  auto idx = top_k_indices(eta, s);
  double nrm = 0.0;
  for (auto i : idx) nrm += eta[i] * eta[i];
  nrm = std::sqrt(nrm);
  res.value = nrm;
  if (nrm > 0) {
    for (auto i : idx) res.argmax[i] = eta[i] / nrm;
  }
  return res;
}

// ---------------------------------------------------------------------------
// FeasibleSet

FeasibleSet::FeasibleSet(SetDescriptor desc) : desc_(std::move(desc)) {}

FeasibleSet make_set(SetDescriptor desc) { return FeasibleSet(std::move(desc)); }

bool FeasibleSet::is_cone() const {
  return desc_.kind == SetKind::SparseCone || desc_.kind == SetKind::LowRankCone;
}

bool FeasibleSet::is_convex() const {
  switch (desc_.kind) {
    case SetKind::EuclideanBall:
    case SetKind::L1Ball:
    case SetKind::Hypercube:
    case SetKind::ConvexSparse:
    case SetKind::DictionaryHull:
    case SetKind::NuclearBall:
      return true;
    default:
      return false;
  }
}

bool FeasibleSet::is_bounded() const { return !is_cone(); }

bool FeasibleSet::is_origin_symmetric() const {
  switch (desc_.kind) {
    case SetKind::EuclideanBall:
    case SetKind::L1Ball:
    case SetKind::Hypercube:
    case SetKind::ConvexSparse:
    case SetKind::DictionaryHull:
    case SetKind::NuclearBall:
    case SetKind::SparseUnitSet:
    case SetKind::SparseCone:
    case SetKind::LowRankCone:
      return true;
    case SetKind::FiniteSet: {
      const Matrix& P = desc_.points;
      if (P.cols() > 512) return false;
      for (Index j = 0; j < P.cols(); ++j) {
        bool found = false;
        for (Index k = 0; k < P.cols() && !found; ++k)
          found = (P.col(j) + P.col(k)).norm() <= 1e-12 * (1.0 + P.col(j).norm());
        if (!found) return false;
      }
      return true;
    }
  }
  return false;
}

double FeasibleSet::outer_radius() const {
  switch (desc_.kind) {
    case SetKind::EuclideanBall: return desc_.radius;
    case SetKind::L1Ball: return desc_.radius;
    case SetKind::Hypercube: return desc_.halfwidth * std::sqrt(static_cast<double>(desc_.n));
    case SetKind::SparseUnitSet: return 1.0;
    case SetKind::ConvexSparse: return desc_.radius;
    case SetKind::NuclearBall: return desc_.radius;
    case SetKind::DictionaryHull: {
      double mx = 0.0;
      for (Index j = 0; j < desc_.dictionary.cols(); ++j)
        mx = std::max(mx, desc_.dictionary.col(j).norm());
      return desc_.radius * mx;
    }
    case SetKind::FiniteSet: {
      double mx = 0.0;
      for (Index j = 0; j < desc_.points.cols(); ++j)
        mx = std::max(mx, desc_.points.col(j).norm());
      return mx;
    }
    default: return kInf;
  }
}

SupportResult FeasibleSet::support(const Vector& eta) const {
  if (eta.size() != desc_.n) throw InvalidParamError("support: dimension mismatch");
  SupportResult res;
  res.argmax = Vector::Zero(desc_.n);
  switch (desc_.kind) {
    case SetKind::EuclideanBall: {
      double nn = eta.norm();
      if (nn > 0) res.argmax = (desc_.radius / nn) * eta;
      res.value = desc_.radius * nn;
      return res;
    }
    case SetKind::L1Ball: {
      Index j = 0;
      double best = -1.0;
      for (Index i = 0; i < eta.size(); ++i)
        if (std::abs(eta[i]) > best) {
          best = std::abs(eta[i]);
          j = i;
        }
      res.argmax[j] = desc_.radius * sign_of(eta[j]);
      res.value = desc_.radius * best;
      return res;
    }
    case SetKind::Hypercube: {
      for (Index i = 0; i < eta.size(); ++i) res.argmax[i] = desc_.halfwidth * sign_of(eta[i]);
      res.value = desc_.halfwidth * eta.lpNorm<1>();
      return res;
    }
    case SetKind::SparseCone:
    case SetKind::LowRankCone: {
      if (eta.norm() == 0.0) return res;
      throw UnboundedError("support: cone support is finite only in the polar cone");
    }
    case SetKind::SparseUnitSet: {
      res = ksupport_support(eta, desc_.s);
      if (res.value == 0.0) res.argmax[0] = 1.0;  // any unit s-sparse vector attains 0
      return res;
    }
    case SetKind::ConvexSparse: {
      res = ksupport_support(eta, desc_.s);
      res.value *= desc_.radius;
      res.argmax *= desc_.radius;
      return res;
    }
    case SetKind::DictionaryHull: {
      const Matrix& D = desc_.dictionary;
      Index j = 0;
      double best = -1.0;
      Vector dots = D.transpose() * eta;
      for (Index i = 0; i < dots.size(); ++i)
        if (std::abs(dots[i]) > best) {
          best = std::abs(dots[i]);
          j = i;
        }
      res.argmax = desc_.radius * sign_of(dots[j]) * D.col(j);
      res.value = desc_.radius * best;
      return res;
    }
    case SetKind::FiniteSet: {
      const Matrix& P = desc_.points;
      Index j = 0;
      double best = -kInf;
      for (Index i = 0; i < P.cols(); ++i) {
        double v = P.col(i).dot(eta);
        if (v > best) {
          best = v;
          j = i;
        }
      }
      res.argmax = P.col(j);
      res.value = best;
      return res;
    }
    case SetKind::NuclearBall: {
      auto svd = svd_of(Matrix(as_matrix(eta, desc_.d1, desc_.d2)));
      res.value = desc_.radius * svd.s[0];
      Matrix top = desc_.radius * svd.U.col(0) * svd.V.col(0).transpose();
      res.argmax = flatten(top);
      return res;
    }
  }
  throw InvalidParamError("support: unhandled kind");
}

double FeasibleSet::gauge(const Vector& x) const {
  if (x.size() != desc_.n) throw InvalidParamError("gauge: dimension mismatch");
  switch (desc_.kind) {
    case SetKind::EuclideanBall: return x.norm() / desc_.radius;
    case SetKind::L1Ball: return x.lpNorm<1>() / desc_.radius;
    case SetKind::Hypercube: return x.lpNorm<Eigen::Infinity>() / desc_.halfwidth;
    case SetKind::ConvexSparse: return ksupport_norm(x, desc_.s) / desc_.radius;
    case SetKind::NuclearBall: {
      Vector s = singular_values_of(Matrix(as_matrix(x, desc_.d1, desc_.d2)));
      return s.sum() / desc_.radius;
    }
    case SetKind::SparseCone:
    case SetKind::LowRankCone:
      return contains(x, 1e-9) ? 0.0 : kInf;
    case SetKind::SparseUnitSet: {
      Index nnz = 0;
      for (Index i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) ++nnz;
      if (nnz == 0 || nnz > desc_.s) return kInf;
      return x.norm();
    }
    case SetKind::FiniteSet: {
      double best = kInf;
      const Matrix& P = desc_.points;
      for (Index j = 0; j < P.cols(); ++j) {
        double pp = P.col(j).squaredNorm();
        if (pp == 0.0) continue;
        double t = x.dot(P.col(j)) / pp;
        if (t > 0 && (x - t * P.col(j)).norm() <= 1e-9 * (1.0 + x.norm()))
          best = std::min(best, t);
      }
      if (x.norm() == 0.0) return 0.0;
      return best;
    }
    case SetKind::DictionaryHull: {
      const Matrix& D = desc_.dictionary;
      // representability first
      Vector alpha_ls = D.completeOrthogonalDecomposition().solve(x);
      if ((D * alpha_ls - x).norm() > 1e-9 * (1.0 + x.norm()))
        throw NoRepresentationError("gauge: x outside the span of the dictionary");
      if (x.norm() == 0.0) return 0.0;
      // min ||alpha||_1 s.t. D alpha = x, as an LP over split signs
      const Index N = D.cols();
      Matrix A(D.rows(), 2 * N);
      A << D, -D;
      Vector c = Vector::Ones(2 * N);
      auto sol = lp_solve_eq(A, x, c);
      if (!sol.feasible)
        throw NoRepresentationError("gauge: dictionary LP infeasible");
      return sol.objective / desc_.radius;
    }
  }
  throw InvalidParamError("gauge: unhandled kind");
}

Vector FeasibleSet::project(const Vector& x) const {
  if (x.size() != desc_.n) throw InvalidParamError("project: dimension mismatch");
  switch (desc_.kind) {
    case SetKind::EuclideanBall: {
      double nn = x.norm();
      if (nn <= desc_.radius) return x;
      return (desc_.radius / nn) * x;
    }
    case SetKind::L1Ball: return project_l1_ball(x, desc_.radius);
    case SetKind::Hypercube:
      return x.cwiseMin(desc_.halfwidth).cwiseMax(-desc_.halfwidth);
    case SetKind::SparseCone: {
      Vector out = Vector::Zero(x.size());
      for (auto i : top_k_indices(x, desc_.s)) out[i] = x[i];
      return out;
    }
    case SetKind::SparseUnitSet: {
      Vector out = Vector::Zero(x.size());
      double nrm = 0.0;
      for (auto i : top_k_indices(x, desc_.s)) {
        out[i] = x[i];
        nrm += x[i] * x[i];
      }
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) {
        out.setZero();
        out[0] = 1.0;
        return out;
      }
      return out / nrm;
    }
    case SetKind::ConvexSparse:
      return ksupport_ball_project(x, desc_.s, desc_.radius);
    case SetKind::LowRankCone: {
      auto svd = svd_of(Matrix(as_matrix(x, desc_.d1, desc_.d2)));
      Index r = std::min<Index>(desc_.rank, svd.s.size());
      Matrix out = svd.U.leftCols(r) * svd.s.head(r).asDiagonal() *
                   svd.V.leftCols(r).transpose();
      return flatten(out);
    }
    case SetKind::NuclearBall: {
      auto svd = svd_of(Matrix(as_matrix(x, desc_.d1, desc_.d2)));
      if (svd.s.sum() <= desc_.radius) return x;
      Vector sp = project_l1_ball(svd.s, desc_.radius);
      Matrix out = svd.U * sp.asDiagonal() * svd.V.transpose();
      return flatten(out);
    }
    case SetKind::FiniteSet: {
      const Matrix& P = desc_.points;
      Index j = 0;
      double best = kInf;
      for (Index i = 0; i < P.cols(); ++i) {
        double d = (x - P.col(i)).norm();
        if (d < best) {
          best = d;
          j = i;
        }
      }
      return P.col(j);
    }
    case SetKind::DictionaryHull: {
      // members project to themselves (keeps projection exactly idempotent)
      try {
        if (gauge(x) <= 1.0 + 1e-11) return x;
      } catch (const NoRepresentationError&) {
      }
      const Matrix& D = desc_.dictionary;
      const Index N = D.cols();
      Matrix V(D.rows(), 2 * N);
      V << desc_.radius * D, -desc_.radius * D;
      double L = 2.0 * desc_.radius * desc_.radius *
                 singular_values_of(D)[0] * singular_values_of(D)[0];
      if (L <= 0) return Vector::Zero(x.size());
      Vector alpha = Vector::Constant(2 * N, 1.0 / static_cast<double>(2 * N));
      Vector momentum = alpha;
      double tk = 1.0;
      for (int it = 0; it < 8000; ++it) {
        Vector grad = V.transpose() * (V * momentum - x);
        Vector next = project_simplex(momentum - grad / L);
        double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        momentum = next + ((tk - 1.0) / tnext) * (next - alpha);
        if ((next - alpha).norm() <= 1e-15 * (1.0 + alpha.norm())) {
          alpha = next;
          break;
        }
        alpha = next;
        tk = tnext;
      }
      // polish on the active face: least squares with sum(alpha) = 1
      std::vector<Index> act;
      for (Index i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 1e-10) act.push_back(i);
      if (!act.empty() && act.size() <= 64) {
        Matrix Va(D.rows(), static_cast<Index>(act.size()));
        for (size_t k = 0; k < act.size(); ++k) Va.col(static_cast<Index>(k)) = V.col(act[k]);
        Index na = Va.cols();
        Matrix KKT(na + 1, na + 1);
        KKT.topLeftCorner(na, na) = Va.transpose() * Va;
        KKT.topRightCorner(na, 1) = Vector::Ones(na);
        KKT.bottomLeftCorner(1, na) = Vector::Ones(na).transpose();
        KKT(na, na) = 0.0;
        Vector rhs(na + 1);
        rhs.head(na) = Va.transpose() * x;
        rhs[na] = 1.0;
        Vector sol = KKT.completeOrthogonalDecomposition().solve(rhs);
        Vector cand = sol.head(na);
        if (cand.minCoeff() >= -1e-12) {
          cand = cand.cwiseMax(0.0);
          double ssum = cand.sum();
          if (ssum > 0) cand /= ssum;
          Vector polished = Va * cand;
          if ((x - polished).norm() <= (x - V * alpha).norm() + 1e-12) return polished;
        }
      }
      return V * alpha;
    }
  }
  throw InvalidParamError("project: unhandled kind");
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  if (x.size() != desc_.n) throw InvalidParamError("contains: dimension mismatch");
  if (tol < 0) throw InvalidParamError("contains: tol must be >= 0");
  switch (desc_.kind) {
    case SetKind::SparseCone: {
      Index nnz = 0;
      for (Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) > tol) ++nnz;
      return nnz <= desc_.s;
    }
    case SetKind::LowRankCone: {
      Vector s = singular_values_of(Matrix(as_matrix(x, desc_.d1, desc_.d2)));
      double thr = std::max(tol, 1e-9 * s[0]);
      Index r = 0;
      for (Index i = 0; i < s.size(); ++i)
        if (s[i] > thr) ++r;
      return r <= desc_.rank;
    }
    case SetKind::SparseUnitSet: {
      Index nnz = 0;
      for (Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) > tol) ++nnz;
      return nnz <= desc_.s && std::abs(x.norm() - 1.0) <= tol + 1e-12;
    }
    case SetKind::FiniteSet: {
      const Matrix& P = desc_.points;
      for (Index j = 0; j < P.cols(); ++j)
        if ((x - P.col(j)).norm() <= tol + 1e-12) return true;
      return false;
    }
    default:
      return gauge(x) <= 1.0 + tol;
  }
}

FeasibleSet FeasibleSet::convex_hull() const {
  switch (desc_.kind) {
    case SetKind::EuclideanBall:
    case SetKind::L1Ball:
    case SetKind::Hypercube:
    case SetKind::ConvexSparse:
    case SetKind::DictionaryHull:
    case SetKind::NuclearBall:
      return *this;
    case SetKind::SparseUnitSet:
      return FeasibleSet(SetDescriptor::convex_sparse(desc_.n, desc_.s, 1.0));
    case SetKind::FiniteSet: {
      // symmetric hull conv{+-p_i}; columns rescaled to satisfy the
      // dictionary normalization
      double mx = 0.0;
      for (Index j = 0; j < desc_.points.cols(); ++j)
        mx = std::max(mx, desc_.points.col(j).norm());
      if (mx == 0.0) mx = 1.0;
      return FeasibleSet(SetDescriptor::dictionary_hull(desc_.points / mx, mx));
    }
    case SetKind::SparseCone:
    case SetKind::LowRankCone:
      throw NoClosedFormError("convex_hull: cone hulls are not representable here");
  }
  throw InvalidParamError("convex_hull: unhandled kind");
}

double FeasibleSet::difference_gauge(const Vector& d) const {
  if (d.size() != desc_.n) throw InvalidParamError("difference_gauge: dimension mismatch");
  if (d.norm() == 0.0) throw InvalidParamError("difference_gauge: d must be nonzero");
  switch (desc_.kind) {
    case SetKind::EuclideanBall:
    case SetKind::L1Ball:
    case SetKind::Hypercube:
    case SetKind::ConvexSparse:
    case SetKind::DictionaryHull:
    case SetKind::NuclearBall:
      return gauge(d) / 2.0;  // K - K = 2K for origin-symmetric convex K
    case SetKind::SparseUnitSet: {
      Index s2 = std::min<Index>(2 * desc_.s, desc_.n);
      return ksupport_norm(d, s2) / 2.0;  // superset conv hull of K-K
    }
    case SetKind::SparseCone: {
      Index nnz = 0;
      for (Index i = 0; i < d.size(); ++i)
        if (std::abs(d[i]) > 1e-12 * d.norm()) ++nnz;
      return nnz <= std::min<Index>(2 * desc_.s, desc_.n) ? 0.0 : kInf;
    }
    case SetKind::LowRankCone: {
      Vector s = singular_values_of(Matrix(as_matrix(d, desc_.d1, desc_.d2)));
      double thr = 1e-9 * s[0];
      Index r = 0;
      for (Index i = 0; i < s.size(); ++i)
        if (s[i] > thr) ++r;
      return r <= std::min<Index>(2 * desc_.rank, std::min(desc_.d1, desc_.d2)) ? 0.0 : kInf;
    }
    case SetKind::FiniteSet:
      throw NoClosedFormError("difference_gauge: no closed form for finite sets");
  }
  throw InvalidParamError("difference_gauge: unhandled kind");
}

}  // namespace estkit
