#include "estkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "estkit/parallel.hpp"
#include "estkit/rng.hpp"

namespace estkit {

namespace {

WidthEstimate reduce_trials(const std::vector<double>& vals, WidthKind kind, double radius) {
  WidthEstimate w;
  w.trials = static_cast<long>(vals.size());
  w.kind = kind;
  w.local_radius = radius;
  double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  w.mean = mean;
  w.stderr_ = std::sqrt(ss / static_cast<double>(vals.size() - 1)) /
              std::sqrt(static_cast<double>(vals.size()));
  return w;
}

Vector singular_values_flat(const Vector& x, Index d1, Index d2) {
  Matrix X = as_matrix(x, d1, d2);
  if (std::min(d1, d2) <= 32) return Eigen::JacobiSVD<Matrix>(X).singularValues();
  return Eigen::BDCSVD<Matrix>(X).singularValues();
}

double top_k_norm(const Vector& v, Index k) {
  std::vector<double> a(v.size());
  for (Index i = 0; i < v.size(); ++i) a[static_cast<size_t>(i)] = std::abs(v[i]);
  std::nth_element(a.begin(), a.begin() + static_cast<long>(std::min<Index>(k, v.size())) - 1,
                   a.end(), std::greater<double>());
  double ss = 0.0;
  for (Index i = 0; i < std::min<Index>(k, v.size()); ++i)
    ss += a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
  return std::sqrt(ss);
}

// alternating Dykstra projection onto C1 cap C2
template <typename P1, typename P2>
Vector dykstra(Vector x, const P1& proj1, const P2& proj2, int rounds = 60) {
  Vector p = Vector::Zero(x.size()), q = Vector::Zero(x.size());
  for (int k = 0; k < rounds; ++k) {
    Vector y = proj1(x + p);
    p = x + p - y;
    x = proj2(y + q);
    q = y + q - x;
  }
  return x;
}

// sup <g, u> over (K - K) cap r B_2 for kinds without a closed form: scale
// the unconstrained maximizer into the ball, then run projected ascent with
// Dykstra projections onto (2 * hull) cap r B_2.
double local_sup_fallback(const FeasibleSet& diff_hull, double r, const Vector& g) {
  SupportResult sup = diff_hull.support(g);
  if (sup.argmax.norm() <= r) return sup.value;
  auto pK = [&](const Vector& v) { return diff_hull.project(v); };
  auto pB = [&](const Vector& v) {
    double nn = v.norm();
    return nn <= r ? v : Vector((r / nn) * v);
  };
  Vector u = pB(sup.argmax);
  u = dykstra(u, pK, pB);
  double best = g.dot(u);
  double gn = g.norm();
  if (gn == 0) return 0.0;
  double step0 = r / gn;
  for (int k = 1; k <= 200; ++k) {
    Vector cand = dykstra(u + (step0 / std::sqrt(static_cast<double>(k))) * g, pK, pB, 25);
    double v = g.dot(cand);
    if (v > best) {
      best = v;
      u = cand;
    }
  }
  // per-draw sanity clamps
  best = std::min(best, r * gn);
  return std::max(best, 0.0);
}

double local_sup(const FeasibleSet& set, double r, const Vector& g) {
  const SetDescriptor& d = set.descriptor();
  switch (d.kind) {
    case SetKind::EuclideanBall:
      return std::min(2.0 * d.radius, r) * g.norm();
    case SetKind::L1Ball:
      return l1l2_support(g, 2.0 * d.radius, r).value;
    case SetKind::NuclearBall: {
      Vector s = singular_values_flat(g, d.d1, d.d2);
      return l1l2_support(s, 2.0 * d.radius, r).value;
    }
    case SetKind::Hypercube: {
      double h2 = 2.0 * d.halfwidth;
      double full = h2 * std::sqrt(static_cast<double>(d.n));
      if (full <= r) return h2 * g.lpNorm<1>();
      // ||u(mu)||_2 = r with u_i = sign(g_i) min(h2, |g_i| / mu)
      double lo = 0.0, hi = g.cwiseAbs().maxCoeff() / (r / std::sqrt(static_cast<double>(d.n)));
      hi = std::max(hi, 1.0);
      auto norm_at = [&](double mu) {
        double ss = 0.0;
        for (Index i = 0; i < g.size(); ++i) {
          double u = std::min(h2, std::abs(g[i]) / mu);
          ss += u * u;
        }
        return std::sqrt(ss);
      };
      while (norm_at(hi) > r) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        double mu = 0.5 * (lo + hi);
        if (norm_at(mu) > r) lo = mu;
        else hi = mu;
      }
      double mu = 0.5 * (lo + hi), val = 0.0;
      for (Index i = 0; i < g.size(); ++i)
        val += std::abs(g[i]) * std::min(h2, std::abs(g[i]) / mu);
      return val;
    }
    case SetKind::SparseCone:
      return r * top_k_norm(g, std::min<Index>(2 * d.s, d.n));
    case SetKind::LowRankCone: {
      Vector s = singular_values_flat(g, d.d1, d.d2);
      return r * top_k_norm(s, std::min<Index>(2 * d.rank, std::min(d.d1, d.d2)));
    }
    case SetKind::FiniteSet: {
      const Matrix& P = d.points;
      if (P.cols() > 2000) throw InvalidParamError("local width: finite set too large");
      double best = 0.0;
      for (Index i = 0; i < P.cols(); ++i)
        for (Index j = 0; j < P.cols(); ++j) {
          Vector u = P.col(i) - P.col(j);
          if (u.norm() <= r) best = std::max(best, g.dot(u));
        }
      return best;
    }
    case SetKind::SparseUnitSet: {
      FeasibleSet hull2(SetDescriptor::convex_sparse(d.n, d.s, 2.0));
      return local_sup_fallback(hull2, r, g);
    }
    case SetKind::ConvexSparse: {
      FeasibleSet hull2(SetDescriptor::convex_sparse(d.n, d.s, 2.0 * d.radius));
      return local_sup_fallback(hull2, r, g);
    }
    case SetKind::DictionaryHull: {
      FeasibleSet hull2(SetDescriptor::dictionary_hull(d.dictionary, 2.0 * d.radius));
      return local_sup_fallback(hull2, r, g);
    }
  }
  throw InvalidParamError("local width: unhandled kind");
}

}  // namespace

WidthEstimate mean_width_mc(const FeasibleSet& set, long trials, std::uint64_t seed,
                            int workers) {
  if (trials < 2) throw InvalidParamError("mean_width_mc: trials must be >= 2");
  if (!set.is_bounded())
    throw UnboundedError("mean_width_mc: cone kinds have infinite width; use the local version");
  const Index n = set.dim();
  std::vector<double> vals(static_cast<size_t>(trials));
  parallel_for(trials, workers, [&](long t) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(t)}));
    Vector g = rng.gaussian_vector(n);
    vals[static_cast<size_t>(t)] = set.support(g).value + set.support(-g).value;
  });
  return reduce_trials(vals, WidthKind::Global, 0.0);
}

WidthEstimate local_mean_width_mc(const FeasibleSet& set, double r, long trials,
                                  std::uint64_t seed, int workers) {
  if (!(r > 0)) throw InvalidParamError("local_mean_width_mc: r must be positive");
  if (trials < 2) throw InvalidParamError("local_mean_width_mc: trials must be >= 2");
  const Index n = set.dim();
  std::vector<double> vals(static_cast<size_t>(trials));
  parallel_for(trials, workers, [&](long t) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(t), 0x10c41ULL}));
    Vector g = rng.gaussian_vector(n);
    vals[static_cast<size_t>(t)] = local_sup(set, r, g);
  });
  return reduce_trials(vals, set.is_cone() ? WidthKind::Cone : WidthKind::Local, r);
}

Interval analytic_width_bounds(const FeasibleSet& set) {
  const SetDescriptor& d = set.descriptor();
  const double n = static_cast<double>(d.n);
  switch (d.kind) {
    case SetKind::EuclideanBall: {
      // [2 c rho sqrt(n), 2 rho sqrt(n)] with c = 1/sqrt(2)
      return {2.0 * d.radius * std::sqrt(n / 2.0), 2.0 * d.radius * std::sqrt(n)};
    }
    case SetKind::FiniteSet: {
      double mx = 0.0;
      for (Index j = 0; j < d.points.cols(); ++j)
        mx = std::max(mx, d.points.col(j).norm());
      double k = static_cast<double>(d.points.cols());
      return {0.0, 2.0 * std::sqrt(2.0 * std::log(k)) * mx};
    }
    case SetKind::SparseUnitSet: {
      double base = std::sqrt(static_cast<double>(d.s) *
                              std::log(2.0 * n / static_cast<double>(d.s)));
      return {base / 3.0, 3.0 * base};
    }
    case SetKind::ConvexSparse: {
      double base = d.radius * std::sqrt(static_cast<double>(d.s) *
                                         std::log(2.0 * n / static_cast<double>(d.s)));
      return {base / 3.0, 3.0 * base};
    }
    case SetKind::L1Ball: {
      double base = d.radius * std::sqrt(std::log(2.0 * n));
      return {base / 3.0, 3.0 * base};
    }
    case SetKind::NuclearBall:
      return {0.0, 2.0 * d.radius * (std::sqrt(static_cast<double>(d.d1)) +
                                     std::sqrt(static_cast<double>(d.d2)))};
    case SetKind::LowRankCone:
      return {0.0, 2.0 * std::sqrt(2.0 * static_cast<double>(d.rank) *
                                   static_cast<double>(d.d1 + d.d2))};
    case SetKind::Hypercube: {
      double exact = 2.0 * d.halfwidth * n * std::sqrt(2.0 / M_PI);
      return {exact, exact};
    }
    default:
      throw NoClosedFormError("analytic_width_bounds: no closed form for " +
                              to_string(d.kind));
  }
}

double effective_sparsity(const Vector& alpha) {
  double n2 = alpha.norm();
  if (n2 == 0.0) throw ZeroInputError("effective_sparsity: zero vector");
  double r = alpha.lpNorm<1>() / n2;
  return r * r;
}

double effective_rank(const Matrix& X) {
  if (X.norm() == 0.0) throw ZeroInputError("effective_rank: zero matrix");
  Vector s = std::min(X.rows(), X.cols()) <= 32
                 ? Eigen::JacobiSVD<Matrix>(X).singularValues()
                 : Eigen::BDCSVD<Matrix>(X).singularValues();
  double r = s.sum() / s.norm();
  return r * r;
}

WidthEstimate descent_cone_width_l1(const Vector& x, long trials, std::uint64_t seed,
                                    int workers) {
  if (x.norm() == 0.0) throw ZeroInputError("descent_cone_width_l1: x must be nonzero");
  if (trials < 2) throw InvalidParamError("descent_cone_width_l1: trials must be >= 2");
  const Index n = x.size();
  std::vector<Index> support, off;
  for (Index i = 0; i < n; ++i)
    (x[i] != 0.0 ? support : off).push_back(i);

  std::vector<double> vals(static_cast<size_t>(trials));
  parallel_for(trials, workers, [&](long t) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(t), 0xdc0ULL}));
    Vector g = rng.gaussian_vector(n);
    // squared distance from g to the polar cone {z: z_i = t sign(x_i) on the
    // support, |z_i| <= t off it, t >= 0}; convex in t
    auto f = [&](double t) {
      double v = 0.0;
      for (Index i : support) {
        double d = g[i] - t * (x[i] < 0 ? -1.0 : 1.0);
        v += d * d;
      }
      for (Index i : off) {
        double d = std::abs(g[i]) - t;
        if (d > 0) v += d * d;
      }
      return v;
    };
    double lo = 0.0, hi = g.cwiseAbs().maxCoeff() + 10.0;
    for (int it = 0; it < 120; ++it) {
      double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (f(m1) < f(m2)) hi = m2;
      else lo = m1;
    }
    vals[static_cast<size_t>(t)] = std::sqrt(f(0.5 * (lo + hi)));
  });
  return reduce_trials(vals, WidthKind::Cone, 1.0);
}

double escape_probability_bound(long m, double cone_width) {
  if (m < 1) throw InvalidParamError("escape_probability_bound: m must be >= 1");
  double sm = std::sqrt(static_cast<double>(m));
  if (cone_width >= sm) return 0.0;
  double gap = static_cast<double>(m) / std::sqrt(static_cast<double>(m) + 1.0) - cone_width;
  double p = 1.0 - 2.5 * std::exp(-gap * gap / 18.0);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace estkit
