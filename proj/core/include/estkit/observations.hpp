#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "estkit/types.hpp"

namespace estkit {

enum class RowKind { Gaussian, Rademacher, UniformSphereScaled };

std::string to_string(RowKind kind);
RowKind row_kind_from_string(const std::string& name);

struct RowDistribution {
  RowKind kind = RowKind::Gaussian;
  Index n = 0;
};

struct LinkFunction {
  enum class Kind { Sign, Tanh, Linear, Custom };
  Kind kind = Kind::Sign;
  double scale = 0.5;  // Tanh: theta(z) = tanh(scale * z)
  bool binary = true;  // observations in {-1, 1} with E y = theta(<a, x>)
  std::vector<std::pair<double, double>> table;  // Custom: odd function, (z, theta(z)) for z >= 0

  double operator()(double z) const;

  static LinkFunction sign_link();
  static LinkFunction tanh_link(double scale = 0.5);
  static LinkFunction linear_link();
  static LinkFunction custom(std::vector<std::pair<double, double>> table, bool binary);
};

struct NoiseSpec {
  enum class Kind { None, IidBounded, Adversarial };
  Kind kind = Kind::None;
  double sigma = 0.0;    // scale of i.i.d. draws (also the per-entry bound for entry sampling)
  double epsilon = 0.0;  // l1 budget: (1/m) ||nu||_1 <= epsilon

  static NoiseSpec none();
  static NoiseSpec iid_bounded(double sigma, double epsilon);
  static NoiseSpec adversarial(double epsilon);
};

Matrix sample_sensing_matrix(const RowDistribution& dist, long m, std::uint64_t seed);

struct LinearObservation {
  Vector y;
  Vector noise;
};

// y = A x + nu with (1/m)||nu||_1 <= eps enforced exactly. Adversarial noise
// is a deterministic function of (A, x): the whole budget lands on the row
// with the largest norm, sign flipping that observation.
LinearObservation observe_linear(const Matrix& A, const Vector& x, const NoiseSpec& noise,
                                 std::uint64_t seed);

// y = sign(A x) with sign(0) := +1.
Vector observe_single_bit(const Matrix& A, const Vector& x);

Vector observe_link(const Matrix& A, const Vector& x, const LinkFunction& link,
                    std::uint64_t seed);

struct EntrySample {
  Matrix y;
  BoolMatrix mask;
  double p = 0.0;
};

// Bernoulli(p) entry sampling with p = min(1, m / (d1 d2)); optionally each
// observed entry carries bounded noise |nu_ij| <= sigma.
EntrySample sample_entries(const Matrix& X, long m, const NoiseSpec& noise,
                           std::uint64_t seed);

struct LinkConstants {
  double lambda = 0.0;  // E theta(mag * g) g
  double m_const = 0.0; // sqrt(2 pi) [E y^2 + Var(y <a, xbar>)]^{1/2}
};

// Quadrature-exact link constants. Throws NonInformativeError when
// |lambda| <= 1e-6.
LinkConstants link_constants(const LinkFunction& link, double magnitude = 1.0);

// Empirical sub-gaussian constant proxy: max over random directions of the
// fitted psi_2 norm of <a, u>. Metadata only.
double empirical_psi2_proxy(const RowDistribution& dist, long samples, std::uint64_t seed);

}  // namespace estkit
