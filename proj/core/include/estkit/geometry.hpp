#pragma once

#include <cstdint>

#include "estkit/sets.hpp"

namespace estkit {

enum class WidthKind { Global, Local, Cone };

struct WidthEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(trials)
  long trials = 0;
  WidthKind kind = WidthKind::Global;
  double local_radius = 0.0;  // meaningful for Local / Cone
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Monte-Carlo mean width E sup_{u in K-K} <g, u>, evaluated per draw as
// h_K(g) + h_K(-g). Deterministic given seed, worker-count independent.
WidthEstimate mean_width_mc(const FeasibleSet& set, long trials, std::uint64_t seed,
                            int workers = 1);

// Local mean width E sup over (K-K) intersected with r B_2^n. Cone kinds use
// their difference cone; non-convex kinds use the convexified difference.
WidthEstimate local_mean_width_mc(const FeasibleSet& set, double r, long trials,
                                  std::uint64_t seed, int workers = 1);

// Closed-form width bands with pinned constants (see README for the table).
Interval analytic_width_bounds(const FeasibleSet& set);

double effective_sparsity(const Vector& alpha);
double effective_rank(const Matrix& X);

// Mean width of the spherical part of the l1 descent cone at x, computed per
// draw as the exact distance from g to the polar cone (1-D convex inner
// minimization).
WidthEstimate descent_cone_width_l1(const Vector& x, long trials, std::uint64_t seed,
                                    int workers = 1);

// Probability lower bound that a random codimension-m subspace misses a
// spherical set of the given mean width; 0 when vacuous.
double escape_probability_bound(long m, double cone_width);

}  // namespace estkit
