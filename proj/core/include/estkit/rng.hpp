#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "estkit/types.hpp"

namespace estkit {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream seeded from (seed, indices...). Gaussians use
// Box-Muller on top of mt19937_64 so draws are identical across standard
// library implementations (std::normal_distribution is not pinned by the
// standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed == 0 ? 0x2545f4914f6cdd1dULL : seed) {}

  static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> idx) {
    std::uint64_t h = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
    for (auto i : idx) h = splitmix64(h ^ (i + 0x9e3779b97f4a7c15ULL));
    return h;
  }

  double uniform() {  // (0, 1]
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double rademacher() { return (eng_() & 1ULL) ? 1.0 : -1.0; }

  // uniform integer in [0, n), rejection sampled
  std::uint64_t integer(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  Vector gaussian_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace estkit
