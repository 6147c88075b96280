#include "estkit/observations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>

#include "estkit/rng.hpp"

namespace estkit {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
struct GlRule {
  std::vector<double> x, w;
};

GlRule gl_rule(int order) {
  GlRule rule;
  rule.x.resize(static_cast<size_t>(order));
  rule.w.resize(static_cast<size_t>(order));
  for (int i = 0; i < order; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = order * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= order; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = order * (t * p1 - p0) / (t * t - 1.0);
    rule.x[static_cast<size_t>(i)] = t;
    rule.w[static_cast<size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return rule;
}

// int_0^R f(x) dx by composite Gauss-Legendre; machine precision for
// piecewise-smooth integrands
double integrate_halfline(const std::function<double(double)>& f, double R = 14.0,
                          int panels = 56) {
  static const GlRule rule = gl_rule(24);
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = R * p / panels, b = R * (p + 1) / panels;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (size_t i = 0; i < rule.x.size(); ++i)
      total += half * rule.w[i] * f(mid + half * rule.x[i]);
  }
  return total;
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

}  // namespace

std::string to_string(RowKind kind) {
  switch (kind) {
    case RowKind::Gaussian: return "Gaussian";
    case RowKind::Rademacher: return "Rademacher";
    case RowKind::UniformSphereScaled: return "UniformSphereScaled";
  }
  throw InvalidParamError("unknown row kind");
}

RowKind row_kind_from_string(const std::string& name) {
  if (name == "Gaussian" || name == "gaussian") return RowKind::Gaussian;
  if (name == "Rademacher" || name == "rademacher") return RowKind::Rademacher;
  if (name == "UniformSphereScaled" || name == "sphere") return RowKind::UniformSphereScaled;
  throw ConfigError("unknown row distribution: " + name);
}

double LinkFunction::operator()(double z) const {
  switch (kind) {
    case Kind::Sign: return z < 0 ? -1.0 : 1.0;
    case Kind::Tanh: return std::tanh(scale * z);
    case Kind::Linear: return z;
    case Kind::Custom: {
      if (table.empty()) throw InvalidLinkError("custom link: empty table");
      double a = std::abs(z);
      double v;
      if (a <= table.front().first) {
        v = table.front().second;
      } else if (a >= table.back().first) {
        v = table.back().second;
      } else {
        v = table.back().second;
        for (size_t i = 1; i < table.size(); ++i) {
          if (a <= table[i].first) {
            double t = (a - table[i - 1].first) / (table[i].first - table[i - 1].first);
            v = table[i - 1].second + t * (table[i].second - table[i - 1].second);
            break;
          }
        }
      }
      return z < 0 ? -v : v;  // odd extension
    }
  }
  throw InvalidLinkError("unhandled link kind");
}

LinkFunction LinkFunction::sign_link() {
  LinkFunction f;
  f.kind = Kind::Sign;
  f.binary = true;
  return f;
}

LinkFunction LinkFunction::tanh_link(double scale) {
  LinkFunction f;
  f.kind = Kind::Tanh;
  f.scale = scale;
  f.binary = true;
  return f;
}

LinkFunction LinkFunction::linear_link() {
  LinkFunction f;
  f.kind = Kind::Linear;
  f.binary = false;
  return f;
}

LinkFunction LinkFunction::custom(std::vector<std::pair<double, double>> table, bool binary) {
  LinkFunction f;
  f.kind = Kind::Custom;
  f.table = std::move(table);
  f.binary = binary;
  std::sort(f.table.begin(), f.table.end());
  return f;
}

NoiseSpec NoiseSpec::none() { return {}; }

NoiseSpec NoiseSpec::iid_bounded(double sigma, double epsilon) {
  if (sigma < 0 || epsilon < 0) throw InvalidParamError("noise: sigma, epsilon must be >= 0");
  NoiseSpec s;
  s.kind = Kind::IidBounded;
  s.sigma = sigma;
  s.epsilon = epsilon;
  return s;
}

NoiseSpec NoiseSpec::adversarial(double epsilon) {
  if (epsilon < 0) throw InvalidParamError("noise: epsilon must be >= 0");
  NoiseSpec s;
  s.kind = Kind::Adversarial;
  s.epsilon = epsilon;
  return s;
}

Matrix sample_sensing_matrix(const RowDistribution& dist, long m, std::uint64_t seed) {
  if (m < 1) throw InvalidParamError("sample_sensing_matrix: m must be >= 1");
  if (dist.n < 1) throw InvalidParamError("sample_sensing_matrix: n must be >= 1");
  Matrix A(m, dist.n);
  for (long i = 0; i < m; ++i) {
    Rng rng(Rng::derive(seed, {static_cast<std::uint64_t>(i), 0xa11ULL}));
    switch (dist.kind) {
      case RowKind::Gaussian:
        for (Index j = 0; j < dist.n; ++j) A(i, j) = rng.gaussian();
        break;
      case RowKind::Rademacher:
        for (Index j = 0; j < dist.n; ++j) A(i, j) = rng.rademacher();
        break;
      case RowKind::UniformSphereScaled: {
        Vector g = rng.gaussian_vector(dist.n);
        double nn = g.norm();
        while (nn == 0.0) {
          g = rng.gaussian_vector(dist.n);
          nn = g.norm();
        }
        A.row(i) = (std::sqrt(static_cast<double>(dist.n)) / nn) * g.transpose();
        break;
      }
    }
  }
  return A;
}

LinearObservation observe_linear(const Matrix& A, const Vector& x, const NoiseSpec& noise,
                                 std::uint64_t seed) {
  if (A.cols() != x.size()) throw InvalidParamError("observe_linear: shape mismatch");
  const long m = A.rows();
  LinearObservation obs;
  obs.noise = Vector::Zero(m);
  switch (noise.kind) {
    case NoiseSpec::Kind::None:
      break;
    case NoiseSpec::Kind::IidBounded: {
      Rng rng(Rng::derive(seed, {0x901eULL}));
      for (long i = 0; i < m; ++i) obs.noise[i] = noise.sigma * rng.gaussian();
      double l1 = obs.noise.lpNorm<1>() / static_cast<double>(m);
      if (l1 > noise.epsilon && l1 > 0)
        obs.noise *= noise.epsilon / l1;  // rescale onto the budget
      break;
    }
    case NoiseSpec::Kind::Adversarial: {
      // whole budget on the strongest row, flipping that observation
      Index worst = 0;
      double best = -1.0;
      for (long i = 0; i < m; ++i) {
        double nn = A.row(i).norm();
        if (nn > best) {
          best = nn;
          worst = i;
        }
      }
      double yi = A.row(worst).dot(x);
      obs.noise[worst] = -(yi < 0 ? -1.0 : 1.0) * noise.epsilon * static_cast<double>(m);
      break;
    }
  }
  obs.y = A * x + obs.noise;
  return obs;
}

Vector observe_single_bit(const Matrix& A, const Vector& x) {
  if (A.cols() != x.size()) throw InvalidParamError("observe_single_bit: shape mismatch");
  if (x.norm() == 0.0) throw ZeroInputError("observe_single_bit: x must be nonzero");
  Vector z = A * x;
  Vector y(z.size());
  for (Index i = 0; i < z.size(); ++i) y[i] = z[i] < 0 ? -1.0 : 1.0;
  return y;
}

Vector observe_link(const Matrix& A, const Vector& x, const LinkFunction& link,
                    std::uint64_t seed) {
  if (A.cols() != x.size()) throw InvalidParamError("observe_link: shape mismatch");
  Vector z = A * x;
  Vector y(z.size());
  if (link.binary) {
    Rng rng(Rng::derive(seed, {0x11adULL}));
    for (Index i = 0; i < z.size(); ++i) {
      double th = link(z[i]);
      if (std::abs(th) > 1.0 + 1e-12)
        throw InvalidLinkError("observe_link: binary link needs |theta| <= 1");
      double p1 = 0.5 * (1.0 + th);
      y[i] = rng.uniform() <= p1 ? 1.0 : -1.0;
    }
  } else {
    for (Index i = 0; i < z.size(); ++i) y[i] = link(z[i]);
  }
  return y;
}

EntrySample sample_entries(const Matrix& X, long m, const NoiseSpec& noise,
                           std::uint64_t seed) {
  if (m < 0) throw InvalidParamError("sample_entries: m must be >= 0");
  const Index d1 = X.rows(), d2 = X.cols();
  const double total = static_cast<double>(d1) * static_cast<double>(d2);
  if (static_cast<double>(m) < static_cast<double>(d1) * std::log(std::max<double>(d1, 2)) ||
      static_cast<double>(m) < static_cast<double>(d2) * std::log(std::max<double>(d2, 2))) {
    std::cerr << "[estkit] warning: sample budget m=" << m
              << " is below d log d; rows or columns may go unobserved\n";
  }
  EntrySample out;
  out.p = std::min(1.0, static_cast<double>(m) / total);
  out.mask = BoolMatrix::Constant(d1, d2, false);
  out.y = Matrix::Zero(d1, d2);
  Rng rng(Rng::derive(seed, {0xe117ULL}));
  for (Index j = 0; j < d2; ++j) {
    for (Index i = 0; i < d1; ++i) {
      if (out.p >= 1.0 || rng.uniform() <= out.p) {
        out.mask(i, j) = true;
        double nu = 0.0;
        if (noise.kind == NoiseSpec::Kind::IidBounded && noise.sigma > 0)
          nu = noise.sigma * (2.0 * rng.uniform() - 1.0);  // |nu| <= sigma
        out.y(i, j) = X(i, j) + nu;
      }
    }
  }
  return out;
}

LinkConstants link_constants(const LinkFunction& link, double magnitude) {
  if (!(magnitude > 0)) throw InvalidParamError("link_constants: magnitude must be positive");
  auto theta = [&](double z) { return link(z); };
  // odd link: E theta(mag g) g = 2 int_0^inf theta(mag x) x phi(x) dx
  double lambda = 2.0 * integrate_halfline(
                            [&](double x) { return theta(magnitude * x) * x * std_normal_pdf(x); });
  if (std::abs(lambda) <= 1e-6)
    throw NonInformativeError("link_constants: lambda is numerically zero");

  double ey2, eyz2;
  if (link.binary) {
    ey2 = 1.0;
    eyz2 = 1.0;  // E[y^2 z^2] = E[z^2] for y in {-1, 1} independent signs given z
  } else {
    ey2 = 2.0 * integrate_halfline([&](double x) {
      double t = theta(magnitude * x);
      return t * t * std_normal_pdf(x);
    });
    eyz2 = 2.0 * integrate_halfline([&](double x) {
      double t = theta(magnitude * x);
      return t * t * x * x * std_normal_pdf(x);
    });
  }
  double var_yz = std::max(0.0, eyz2 - lambda * lambda);
  LinkConstants out;
  out.lambda = lambda;
  out.m_const = std::sqrt(2.0 * M_PI) * std::sqrt(ey2 + var_yz);
  return out;
}

double empirical_psi2_proxy(const RowDistribution& dist, long samples, std::uint64_t seed) {
  // max over random directions of a fitted sub-gaussian constant psi with
  // E exp(Z^2 / psi^2) <= e for Z = <a, u>
  Matrix A = sample_sensing_matrix(dist, samples, seed);
  Rng rng(Rng::derive(seed, {0x9511ULL}));
  double worst = 0.0;
  for (int d = 0; d < 100; ++d) {
    Vector u = rng.gaussian_vector(dist.n);
    u /= u.norm();
    Vector z = A * u;
    double lo = 0.1, hi = 64.0;
    for (int it = 0; it < 60; ++it) {
      double psi = 0.5 * (lo + hi);
      double mean = 0.0;
      for (Index i = 0; i < z.size(); ++i)
        mean += std::exp(std::min(40.0, z[i] * z[i] / (psi * psi)));
      mean /= static_cast<double>(z.size());
      if (mean > M_E) lo = psi;
      else hi = psi;
    }
    worst = std::max(worst, 0.5 * (lo + hi));
  }
  return worst;
}

}  // namespace estkit
