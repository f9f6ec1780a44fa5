#pragma once

#include "softrec/common.hpp"

#include <cmath>
#include <cstdint>

namespace softrec {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from (master, index); used to give each
/// trial / Monte-Carlo sample its own generator so concurrency cannot change results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x517cc1b727220a95ULL * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

/// xoshiro256++ with splitmix64 seeding. Self-contained so that seeded runs are
/// reproducible independently of the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
    spare_valid_ = false;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling keeps the distribution exactly uniform.
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return draw % n;
  }

  /// Standard normal via Box-Muller; caches the second deviate.
  double gaussian() {
    if (spare_valid_) {
      spare_valid_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    spare_valid_ = true;
    return radius * std::cos(angle);
  }

  /// Standard complex normal, E|z|^2 = 1.
  Complex cgaussian() {
    const double inv_sqrt2 = 0.70710678118654752440;
    return Complex(gaussian() * inv_sqrt2, gaussian() * inv_sqrt2);
  }

  Complex unit_phase() {
    const double angle = 6.283185307179586476925286766559 * uniform();
    return Complex(std::cos(angle), std::sin(angle));
  }

  RealVec gaussian_vector(int n) {
    RealVec v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  RealMat gaussian_matrix(int rows, int cols) {
    RealMat m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = gaussian();
    return m;
  }

  Vec cgaussian_vector(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = cgaussian();
    return v;
  }

  /// Random unit vector in C^n (Haar on the sphere).
  Vec unit_vector(int n) {
    Vec v = cgaussian_vector(n);
    while (v.norm() < 1e-12) v = cgaussian_vector(n);
    return v / v.norm();
  }

  RealVec real_unit_vector(int n) {
    RealVec v = gaussian_vector(n);
    while (v.norm() < 1e-12) v = gaussian_vector(n);
    return v / v.norm();
  }

  /// Haar-ish random orthogonal matrix: QR of a Gaussian with sign-fixed diagonal.
  RealMat random_orthogonal(int n) {
    RealMat g = gaussian_matrix(n, n);
    Eigen::HouseholderQR<RealMat> qr(g);
    RealMat q = qr.householderQ();
    const RealMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool spare_valid_ = false;
};

}  // namespace softrec
