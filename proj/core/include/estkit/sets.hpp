#pragma once

#include <optional>
#include <string>

#include "estkit/types.hpp"

namespace estkit {

enum class SetKind {
  EuclideanBall,
  L1Ball,
  Hypercube,
  SparseCone,
  SparseUnitSet,
  ConvexSparse,
  DictionaryHull,
  FiniteSet,
  LowRankCone,
  NuclearBall,
};

std::string to_string(SetKind kind);
SetKind set_kind_from_string(const std::string& name);

// Descriptor of a feasible set in R^n. Matrices live flattened column-major
// with (d1, d2) carried here. ConvexSparse(s, rho) is rho * conv{x : ||x||_0
// <= s, ||x||_2 = 1}, the k-support-norm ball; it is the convex hull of
// SparseUnitSet(s) when rho = 1.
struct SetDescriptor {
  SetKind kind = SetKind::EuclideanBall;
  Index n = 0;
  double radius = 1.0;   // EuclideanBall, L1Ball, ConvexSparse, DictionaryHull, NuclearBall
  double halfwidth = 1.0;  // Hypercube
  Index s = 1;           // SparseCone, SparseUnitSet, ConvexSparse
  Index rank = 1;        // LowRankCone
  Index d1 = 0, d2 = 0;  // LowRankCone, NuclearBall
  Matrix dictionary;     // DictionaryHull: n x N, columns are atoms
  Matrix points;         // FiniteSet: n x N, columns are members

  static SetDescriptor euclidean_ball(Index n, double radius);
  static SetDescriptor l1_ball(Index n, double radius);
  static SetDescriptor hypercube(Index n, double halfwidth);
  static SetDescriptor sparse_cone(Index n, Index s);
  static SetDescriptor sparse_unit(Index n, Index s);
  static SetDescriptor convex_sparse(Index n, Index s, double radius);
  static SetDescriptor dictionary_hull(Matrix dictionary, double radius);
  static SetDescriptor finite_set(Matrix points);
  static SetDescriptor low_rank_cone(Index rank, Index d1, Index d2);
  static SetDescriptor nuclear_ball(double radius, Index d1, Index d2);
};

struct SupportResult {
  double value = 0.0;
  Vector argmax;
};

// Oracle bundle around a SetDescriptor: support function with maximizer,
// Minkowski gauge, Euclidean projection, membership. Immutable after
// construction; safe for concurrent reads.
class FeasibleSet {
 public:
  explicit FeasibleSet(SetDescriptor desc);

  const SetDescriptor& descriptor() const { return desc_; }
  SetKind kind() const { return desc_.kind; }
  Index dim() const { return desc_.n; }

  bool is_cone() const;
  bool is_convex() const;
  bool is_bounded() const;
  bool is_origin_symmetric() const;
  // smallest known R with K inside R * B_2^n (infinity for cones)
  double outer_radius() const;

  SupportResult support(const Vector& eta) const;
  double gauge(const Vector& x) const;
  Vector project(const Vector& x) const;
  bool contains(const Vector& x, double tol) const;
  FeasibleSet convex_hull() const;
  double difference_gauge(const Vector& d) const;

 private:
  SetDescriptor desc_;
};

FeasibleSet make_set(SetDescriptor desc);

// Exact Euclidean projection onto the l1 ball of the given radius
// (sort-and-threshold).
Vector project_l1_ball(const Vector& v, double radius);

// max <eta, u> over {||u||_1 <= l1, ||u||_2 <= l2}, with a maximizer.
SupportResult l1l2_support(const Vector& eta, double l1, double l2);

// k-support norm ||x||_(s): the gauge of conv{unit s-sparse vectors}.
double ksupport_norm(const Vector& x, Index s);
// prox_{mu/2 ||.||_(s)^2}(v)
Vector ksupport_prox(const Vector& v, Index s, double mu);
// Euclidean projection onto {z : ||z||_(s) <= rho}
Vector ksupport_ball_project(const Vector& v, Index s, double rho);
// argmax over the unit k-support ball: top-s entries renormalized.
SupportResult ksupport_support(const Vector& eta, Index s);

}  // namespace estkit
