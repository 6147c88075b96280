#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estkit/estimators.hpp"
#include "estkit/geometry.hpp"

namespace estkit {

struct SweepRecord {
  std::string experiment;
  Index n = 0;
  long m = 0;
  Index s = 0;
  Index rank = 0;
  double eps = 0.0;
  long trials = 0;
  double err_mean = 0.0;
  double err_median = 0.0;
  double err_q90 = 0.0;
  double bound_value = 0.0;  // theorem right-hand side with C = 1
  std::uint64_t seed = 0;
};

struct ScalingFit {
  bool valid = false;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<long> grid;
};

ScalingFit fit_loglog(const std::vector<long>& ms, const std::vector<double>& errs);

// Random-section diameters of a symmetric convex set versus w(K)/sqrt(m).
// Diameters are sampled lower bounds: max over kernel directions d of
// 1/difference_gauge(d).
SweepRecord section_diameter_experiment(const FeasibleSet& set, long m, int directions,
                                        long trials, std::uint64_t seed, int workers = 1);

struct DeviationResult {
  SweepRecord record;   // err_* hold per-trial LHS stats; bound_value holds the RHS
  double rhs = 0.0;
  double rhs_stderr = 0.0;
  long violations = 0;  // trials with LHS > RHS + 3 sigma
};

// Checks, per trial, sup_{u in T} |(1/m) sum |<a_i,u>| - sqrt(2/pi)||u||_2|
// against (4/sqrt(m)) E sup |<g,u>| (T given as columns).
DeviationResult deviation_experiment(const Matrix& T_points, long m, long trials,
                                     std::uint64_t seed, int workers = 1);

struct SymmetrizationReport {
  long batches = 0;
  long symmetrization_passes = 0;
  long contraction_passes = 0;
  double sym_lhs_mean = 0.0, sym_rhs_mean = 0.0;
  double con_lhs_mean = 0.0, con_rhs_mean = 0.0;
};

// Empirical factor-2 symmetrization and contraction inequalities for the
// processes Z_i(t) = <a_i, t> over a finite index set; each batch compares
// inner-MC means with 3 sigma slack.
SymmetrizationReport symmetrization_contraction_check(const Matrix& T_points, long processes,
                                                      long batches, std::uint64_t seed,
                                                      long inner_draws = 100, int workers = 1);

struct MatrixNormReport {
  double mean_opnorm = 0.0;
  double opnorm_stderr = 0.0;
  double gordon_bound = 0.0;   // sqrt(d1) + sqrt(d2)
  double seginer_term = 0.0;   // E max_i ||row_i|| + E max_j ||col_j||
  double seginer_ratio = 0.0;  // mean_opnorm / seginer_term
  bool gordon_ok = false;      // Gaussian only: mean <= bound * 1.02
};

MatrixNormReport matrix_norm_bound_check(Index d1, Index d2, RowKind entries, long trials,
                                         std::uint64_t seed, int workers = 1);

// Lower-bounds the maximal cell diameter of the hyperplane tessellation
// restricted to K on the sphere, via same-sign-pattern point pairs.
SweepRecord tessellation_experiment(const FeasibleSet& set, long m, int pairs, long trials,
                                    std::uint64_t seed, int workers = 1);

struct PhasePoint {
  SweepRecord record;
  double success_rate = 0.0;   // fraction with error <= 1e-4
  double escape_bound = 0.0;   // escape probability lower bound at this m
};

struct PhaseResult {
  std::vector<PhasePoint> points;
  double cone_width = 0.0;     // wbar(S) from descent_cone_width_l1
  double cone_width_sq = 0.0;
};

PhaseResult exact_recovery_phase(Index n, Index s, const std::vector<long>& m_grid, long trials,
                                 std::uint64_t seed, int workers = 1);

}  // namespace estkit
