#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qe {

/// splitmix64 step (Steele, Lea & Flood); used to expand seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman & Vigna). Hand-rolled rather than <random> so the
/// variate streams are identical across standard libraries; all
/// distributions below are explicit arithmetic on the raw stream.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (std::uint64_t& word : s_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Exponentially distributed inter-arrival time with the given rate.
  double exponential(double rate) {
    // 1 - uniform01() is in (0, 1]: log never sees zero.
    return -std::log(1.0 - uniform01()) / rate;
  }

  /// Zero-mean Gaussian truncated to +-max_sigmas standard deviations
  /// (Box-Muller, rejecting the tail).
  double gaussian_truncated(double sigma, double max_sigmas) {
    if (sigma == 0.0) return 0.0;
    for (;;) {
      const double u = 1.0 - uniform01();
      const double v = uniform01();
      const double z =
          std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
      if (std::abs(z) <= max_sigmas) return sigma * z;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_;
};

}  // namespace qe
