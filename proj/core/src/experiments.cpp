#include "estkit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "estkit/parallel.hpp"
#include "estkit/rng.hpp"
#include "estkit/solvers.hpp"

namespace estkit {

namespace {

struct Stats {
  double mean = 0.0, median = 0.0, q90 = 0.0;
};

Stats summarize(std::vector<double> v) {
  Stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(v.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
  };
  s.median = quantile(0.5);
  s.q90 = quantile(0.9);
  return s;
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix A(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = rng.gaussian();
  return A;
}

double operator_norm_power(const Matrix& G, Rng& rng) {
  double best = 0.0;
  for (int restart = 0; restart < 3; ++restart) {
    Vector v = Vector::Zero(G.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = rng.gaussian();
    v /= v.norm();
    double prev = 0.0, cur = 0.0;
    for (int it = 0; it < 200; ++it) {
      Vector w = G.transpose() * (G * v);
      cur = std::sqrt(w.norm());
      if (w.norm() == 0.0) break;
      v = w / w.norm();
      if (std::abs(cur - prev) <= 1e-10 * std::max(1.0, cur)) break;
      prev = cur;
    }
    best = std::max(best, (G * v).norm());
  }
  return best;
}

// a point of K on the unit sphere; native for SparseUnitSet, extreme-point
// based for bounded kinds
Vector sample_sphere_point(const FeasibleSet& set, Rng& rng) {
  const Index n = set.dim();
  if (set.kind() == SetKind::SparseUnitSet) {
    const Index s = set.descriptor().s;
    Vector x = Vector::Zero(n);
    std::vector<Index> idx(n);
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index k = 0; k < s; ++k)
      std::swap(idx[static_cast<size_t>(k)],
                idx[static_cast<size_t>(k + static_cast<Index>(rng.integer(
                                                static_cast<std::uint64_t>(n - k))))]);
    double nrm = 0.0;
    while (nrm == 0.0) {
      for (Index k = 0; k < s; ++k) x[idx[static_cast<size_t>(k)]] = rng.gaussian();
      nrm = x.norm();
    }
    return x / nrm;
  }
  Vector g = rng.gaussian_vector(n);
  Vector u = set.support(g).argmax;
  double nn = u.norm();
  while (nn == 0.0) {
    g = rng.gaussian_vector(n);
    u = set.support(g).argmax;
    nn = u.norm();
  }
  return u / nn;
}

Vector perturb_on_set(const FeasibleSet& set, const Vector& u, double delta, Rng& rng) {
  const Index n = set.dim();
  Vector w(n);
  if (set.kind() == SetKind::SparseUnitSet) {
    w.setZero();
    for (Index i = 0; i < n; ++i)
      if (u[i] != 0.0) w[i] = rng.gaussian();  // stay inside the same support
  } else {
    w = rng.gaussian_vector(n);
  }
  double nn = w.norm();
  if (nn == 0.0) return u;
  Vector v = set.project(u + (delta / nn) * w);
  double vn = v.norm();
  if (vn == 0.0) return u;
  return v / vn;
}

}  // namespace

ScalingFit fit_loglog(const std::vector<long>& ms, const std::vector<double>& errs) {
  ScalingFit fit;
  fit.grid = ms;
  if (ms.size() != errs.size() || ms.size() < 4) return fit;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < ms.size(); ++i) {
    if (errs[i] > 0 && ms[i] > 0) {
      lx.push_back(std::log(static_cast<double>(ms[i])));
      ly.push_back(std::log(errs[i]));
    }
  }
  if (lx.size() < 4) return fit;
  double n = static_cast<double>(lx.size());
  double sx = std::accumulate(lx.begin(), lx.end(), 0.0);
  double sy = std::accumulate(ly.begin(), ly.end(), 0.0);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  double den = n * sxx - sx * sx;
  if (den <= 0) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
  }
  fit.r2 = ss_tot > 0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
  fit.valid = true;
  return fit;
}

SweepRecord section_diameter_experiment(const FeasibleSet& set, long m, int directions,
                                        long trials, std::uint64_t seed, int workers) {
  const Index n = set.dim();
  if (m >= n) throw InvalidParamError("section_diameter_experiment: needs m < n");
  if (m < 1 || directions < 1 || trials < 1)
    throw InvalidParamError("section_diameter_experiment: bad sizes");
  if (!set.is_convex() || !set.is_origin_symmetric())
    throw InvalidParamError("section_diameter_experiment: symmetric convex kinds only");

  std::vector<double> diam(static_cast<size_t>(trials));
  parallel_for(trials, workers, [&](long t) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(t), 0x5ecULL}));
    Matrix A = gaussian_matrix(m, n, rng);
    // orthonormal kernel basis from the full QR of A^T
    Eigen::HouseholderQR<Matrix> qr(A.transpose());
    Matrix Q = qr.householderQ();
    Matrix Ker = Q.rightCols(n - m);
    double best = 0.0;
    for (int d = 0; d < directions; ++d) {
      Vector coef = rng.gaussian_vector(n - m);
      Vector dir = Ker * coef;
      double nn = dir.norm();
      if (nn == 0.0) continue;
      dir /= nn;
      double g = set.difference_gauge(dir);
      if (g > 0 && std::isfinite(g)) best = std::max(best, 1.0 / g);
    }
    diam[static_cast<size_t>(t)] = best;
  });

  WidthEstimate w = mean_width_mc(set, std::max<long>(2000, trials), Rng::derive(seed, {0x71dULL}),
                                  workers);
  Stats st = summarize(diam);
  SweepRecord rec;
  rec.experiment = "section-diameter";
  rec.n = n;
  rec.m = m;
  rec.trials = trials;
  rec.err_mean = st.mean;
  rec.err_median = st.median;
  rec.err_q90 = st.q90;
  rec.bound_value = w.mean / std::sqrt(static_cast<double>(m));
  rec.seed = seed;
  return rec;
}

DeviationResult deviation_experiment(const Matrix& T_points, long m, long trials,
                                     std::uint64_t seed, int workers) {
  const Index n = T_points.rows();
  const Index N = T_points.cols();
  if (N < 1 || N > 10000) throw InvalidParamError("deviation_experiment: need 1 <= |T| <= 1e4");
  if (m < 1 || trials < 1) throw InvalidParamError("deviation_experiment: bad sizes");

  Vector norms(N);
  for (Index j = 0; j < N; ++j) norms[j] = T_points.col(j).norm();
  const double c = std::sqrt(2.0 / M_PI);

  // RHS: (4/sqrt(m)) E sup_u |<g, u>| by its own Monte Carlo
  const long rhs_trials = std::max<long>(4000, trials);
  std::vector<double> sup_abs(static_cast<size_t>(rhs_trials));
  parallel_for(rhs_trials, workers, [&](long t) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(t), 0xa60ULL}));
    Vector g = rng.gaussian_vector(n);
    sup_abs[static_cast<size_t>(t)] = (T_points.transpose() * g).cwiseAbs().maxCoeff();
  });
  Stats rhs_stats = summarize(sup_abs);
  double rhs_se = 0.0;
  {
    double ss = 0.0;
    for (double v : sup_abs) ss += (v - rhs_stats.mean) * (v - rhs_stats.mean);
    rhs_se = std::sqrt(ss / static_cast<double>(rhs_trials - 1)) /
             std::sqrt(static_cast<double>(rhs_trials));
  }
  const double scale = 4.0 / std::sqrt(static_cast<double>(m));
  DeviationResult out;
  out.rhs = scale * rhs_stats.mean;
  out.rhs_stderr = scale * rhs_se;

  std::vector<double> lhs(static_cast<size_t>(trials));
  parallel_for(trials, workers, [&](long t) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(t), 0x1e5ULL}));
    Matrix A = gaussian_matrix(m, n, rng);
    Matrix Z = (A * T_points).cwiseAbs();  // m x N
    double worst = 0.0;
    for (Index j = 0; j < N; ++j)
      worst = std::max(worst, std::abs(Z.col(j).mean() - c * norms[j]));
    lhs[static_cast<size_t>(t)] = worst;
  });
  for (double v : lhs)
    if (v > out.rhs + 3.0 * out.rhs_stderr) ++out.violations;

  Stats st = summarize(lhs);
  out.record.experiment = "deviation";
  out.record.n = n;
  out.record.m = m;
  out.record.trials = trials;
  out.record.err_mean = st.mean;
  out.record.err_median = st.median;
  out.record.err_q90 = st.q90;
  out.record.bound_value = out.rhs;
  out.record.seed = seed;
  return out;
}

SymmetrizationReport symmetrization_contraction_check(const Matrix& T_points, long processes,
                                                      long batches, std::uint64_t seed,
                                                      long inner_draws, int workers) {
  const Index n = T_points.rows();
  const Index N = T_points.cols();
  if (N < 1 || processes < 1 || batches < 1 || inner_draws < 2)
    throw InvalidParamError("symmetrization_contraction_check: bad sizes");
  Vector norms(N);
  for (Index j = 0; j < N; ++j) norms[j] = T_points.col(j).norm();
  const double c = std::sqrt(2.0 / M_PI);

  std::vector<int> sym_pass(static_cast<size_t>(batches), 0);
  std::vector<int> con_pass(static_cast<size_t>(batches), 0);
  std::vector<double> sym_l(static_cast<size_t>(batches)), sym_r(static_cast<size_t>(batches));
  std::vector<double> con_l(static_cast<size_t>(batches)), con_r(static_cast<size_t>(batches));

  parallel_for(batches, workers, [&](long b) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(b), 0x57bULL}));
    std::vector<double> ls(inner_draws), rs(inner_draws), lc(inner_draws), rc(inner_draws);
    for (long d = 0; d < inner_draws; ++d) {
      Matrix A = gaussian_matrix(processes, n, rng);
      Vector eps(processes);
      for (long i = 0; i < processes; ++i) eps[i] = rng.rademacher();
      Matrix W = A * T_points;       // processes x N, Z_i(t) = <a_i, t>
      Matrix Zabs = W.cwiseAbs();
      double lhs_sym = 0.0, rhs_sym = 0.0, lhs_con = 0.0, rhs_con = 0.0;
      for (Index j = 0; j < N; ++j) {
        double centered = Zabs.col(j).sum() - c * norms[j] * static_cast<double>(processes);
        lhs_sym = std::max(lhs_sym, std::abs(centered));
        double eabs = eps.dot(Zabs.col(j));
        rhs_sym = std::max(rhs_sym, std::abs(eabs));
        lhs_con = std::max(lhs_con, std::abs(eabs));
        rhs_con = std::max(rhs_con, std::abs(eps.dot(W.col(j))));
      }
      ls[static_cast<size_t>(d)] = lhs_sym;
      rs[static_cast<size_t>(d)] = 2.0 * rhs_sym;
      lc[static_cast<size_t>(d)] = lhs_con;
      rc[static_cast<size_t>(d)] = 2.0 * rhs_con;
    }
    auto mean_se = [&](const std::vector<double>& v) {
      double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      return std::pair<double, double>(
          mean, std::sqrt(ss / static_cast<double>(v.size() - 1)) /
                    std::sqrt(static_cast<double>(v.size())));
    };
    auto [ml, sl] = mean_se(ls);
    auto [mr, sr] = mean_se(rs);
    auto [mcl, scl] = mean_se(lc);
    auto [mcr, scr] = mean_se(rc);
    sym_l[static_cast<size_t>(b)] = ml;
    sym_r[static_cast<size_t>(b)] = mr;
    con_l[static_cast<size_t>(b)] = mcl;
    con_r[static_cast<size_t>(b)] = mcr;
    sym_pass[static_cast<size_t>(b)] = ml <= mr + 3.0 * std::sqrt(sl * sl + sr * sr) ? 1 : 0;
    con_pass[static_cast<size_t>(b)] = mcl <= mcr + 3.0 * std::sqrt(scl * scl + scr * scr) ? 1 : 0;
  });

  SymmetrizationReport rep;
  rep.batches = batches;
  rep.symmetrization_passes = std::accumulate(sym_pass.begin(), sym_pass.end(), 0L);
  rep.contraction_passes = std::accumulate(con_pass.begin(), con_pass.end(), 0L);
  rep.sym_lhs_mean = std::accumulate(sym_l.begin(), sym_l.end(), 0.0) / static_cast<double>(batches);
  rep.sym_rhs_mean = std::accumulate(sym_r.begin(), sym_r.end(), 0.0) / static_cast<double>(batches);
  rep.con_lhs_mean = std::accumulate(con_l.begin(), con_l.end(), 0.0) / static_cast<double>(batches);
  rep.con_rhs_mean = std::accumulate(con_r.begin(), con_r.end(), 0.0) / static_cast<double>(batches);
  return rep;
}

MatrixNormReport matrix_norm_bound_check(Index d1, Index d2, RowKind entries, long trials,
                                         std::uint64_t seed, int workers) {
  if (d1 < 1 || d2 < 1 || trials < 2) throw InvalidParamError("matrix_norm_bound_check: sizes");
  if (entries == RowKind::UniformSphereScaled)
    throw InvalidParamError("matrix_norm_bound_check: entries must be i.i.d. (Gaussian/Rademacher)");
  std::vector<double> op(static_cast<size_t>(trials)), rowterm(static_cast<size_t>(trials)),
      colterm(static_cast<size_t>(trials));
  parallel_for(trials, workers, [&](long t) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(t), 0x90dULL}));
    Matrix G(d1, d2);
    for (Index j = 0; j < d2; ++j)
      for (Index i = 0; i < d1; ++i)
        G(i, j) = entries == RowKind::Gaussian ? rng.gaussian() : rng.rademacher();
    op[static_cast<size_t>(t)] = operator_norm_power(G, rng);
    double mr = 0.0, mc = 0.0;
    for (Index i = 0; i < d1; ++i) mr = std::max(mr, G.row(i).norm());
    for (Index j = 0; j < d2; ++j) mc = std::max(mc, G.col(j).norm());
    rowterm[static_cast<size_t>(t)] = mr;
    colterm[static_cast<size_t>(t)] = mc;
  });
  MatrixNormReport rep;
  Stats so = summarize(op);
  rep.mean_opnorm = so.mean;
  {
    double ss = 0.0;
    for (double v : op) ss += (v - so.mean) * (v - so.mean);
    rep.opnorm_stderr = std::sqrt(ss / static_cast<double>(trials - 1)) /
                        std::sqrt(static_cast<double>(trials));
  }
  rep.gordon_bound = std::sqrt(static_cast<double>(d1)) + std::sqrt(static_cast<double>(d2));
  rep.seginer_term = summarize(rowterm).mean + summarize(colterm).mean;
  rep.seginer_ratio = rep.mean_opnorm / rep.seginer_term;
  rep.gordon_ok = entries != RowKind::Gaussian || rep.mean_opnorm <= rep.gordon_bound * 1.02;
  return rep;
}

SweepRecord tessellation_experiment(const FeasibleSet& set, long m, int pairs, long trials,
                                    std::uint64_t seed, int workers) {
  if (pairs < 1 || trials < 1) throw InvalidParamError("tessellation_experiment: bad sizes");
  if (m < 0) throw InvalidParamError("tessellation_experiment: m must be >= 0");
  const Index n = set.dim();
  std::vector<double> maxdist(static_cast<size_t>(trials), -1.0);
  parallel_for(trials, workers, [&](long t) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(t), 0x7e55ULL}));
    Matrix A = m > 0 ? gaussian_matrix(m, n, rng) : Matrix(0, n);
    double best = -1.0;
    for (int p = 0; p < pairs; ++p) {
      Vector u = sample_sphere_point(set, rng);
      double delta = std::pow(10.0, -3.0 + (3.0 + std::log10(2.0)) * rng.uniform());
      Vector v = perturb_on_set(set, u, delta, rng);
      bool same = true;
      if (m > 0) {
        Vector su = A * u, sv = A * v;
        for (Index i = 0; i < m && same; ++i) {
          double a = su[i] < 0 ? -1.0 : 1.0;
          double b = sv[i] < 0 ? -1.0 : 1.0;
          same = a == b;
        }
      }
      if (same) best = std::max(best, (u - v).norm());
    }
    maxdist[static_cast<size_t>(t)] = best;
  });
  for (double v : maxdist)
    if (v < 0)
      throw InsufficientPairsError("tessellation_experiment: no same-cell pair; raise pairs");

  SweepRecord rec;
  Stats st = summarize(maxdist);
  rec.experiment = "tessellation";
  rec.n = n;
  rec.m = m;
  rec.trials = trials;
  rec.err_mean = st.mean;
  rec.err_median = st.median;
  rec.err_q90 = st.q90;
  if (m > 0 && set.is_bounded()) {
    WidthEstimate w =
        mean_width_mc(set, 2000, Rng::derive(seed, {0x7e55ULL, 0x31ULL}), workers);
    rec.bound_value = std::cbrt(w.mean / std::sqrt(static_cast<double>(m)));
  }
  rec.seed = seed;
  return rec;
}

PhaseResult exact_recovery_phase(Index n, Index s, const std::vector<long>& m_grid, long trials,
                                 std::uint64_t seed, int workers) {
  if (n < 1 || s < 1 || s > n) throw InvalidParamError("exact_recovery_phase: bad n, s");
  if (m_grid.empty() || trials < 1) throw InvalidParamError("exact_recovery_phase: bad grid");

  auto draw_sparse_unit = [&](Rng& rng) {
    Vector x = Vector::Zero(n);
    std::vector<Index> idx(n);
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index k = 0; k < s; ++k)
      std::swap(idx[static_cast<size_t>(k)],
                idx[static_cast<size_t>(k + static_cast<Index>(rng.integer(
                                                static_cast<std::uint64_t>(n - k))))]);
    double nrm = 0.0;
    while (nrm == 0.0) {
      for (Index k = 0; k < s; ++k) x[idx[static_cast<size_t>(k)]] = rng.gaussian();
      nrm = x.norm();
    }
    return Vector(x / nrm);
  };

  PhaseResult out;
  {
    Rng rng(Rng::derive(seed, {0xc0deULL}));
    Vector xrep = draw_sparse_unit(rng);
    WidthEstimate w = descent_cone_width_l1(xrep, 2000, Rng::derive(seed, {0xc0ffULL}), workers);
    out.cone_width = w.mean;
    out.cone_width_sq = w.mean * w.mean;
  }

  for (size_t gi = 0; gi < m_grid.size(); ++gi) {
    long m = m_grid[gi];
    std::vector<double> errs(static_cast<size_t>(trials));
    parallel_for(trials, workers, [&](long t) {
      Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(t)}));
      Vector x = draw_sparse_unit(rng);
      Matrix A = gaussian_matrix(m, n, rng);
      try {
        auto [xh, diag] = l1_min(A, A * x, 0.0);
        errs[static_cast<size_t>(t)] = (xh - x).norm();
      } catch (const Error&) {
        errs[static_cast<size_t>(t)] = std::numeric_limits<double>::infinity();
      }
    });
    long succ = 0;
    std::vector<double> finite;
    for (double e : errs) {
      if (e <= 1e-4) ++succ;
      finite.push_back(std::isfinite(e) ? e : 10.0);
    }
    PhasePoint pt;
    Stats st = summarize(finite);
    pt.record.experiment = "phase";
    pt.record.n = n;
    pt.record.m = m;
    pt.record.s = s;
    pt.record.eps = 0.0;
    pt.record.trials = trials;
    pt.record.err_mean = st.mean;
    pt.record.err_median = st.median;
    pt.record.err_q90 = st.q90;
    pt.record.bound_value = out.cone_width_sq;
    pt.record.seed = seed;
    pt.success_rate = static_cast<double>(succ) / static_cast<double>(trials);
    pt.escape_bound = escape_probability_bound(m, out.cone_width);
    out.points.push_back(std::move(pt));
  }
  return out;
}

}  // namespace estkit
