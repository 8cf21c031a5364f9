#pragma once

// Deterministic random number generation. Every sampler in the library takes
// an explicit Rng so that experiments are reproducible from a single seed;
// per-trial streams are derived with derive_seed, never by sharing state.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace sparserank {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t mix_u64(uint64_t a, uint64_t b) {
  uint64_t s = a;
  uint64_t h = splitmix64(s) ^ b;
  return splitmix64(h);
}

// Stream seed for sub-experiment `index` of an experiment seeded with `master`.
inline uint64_t derive_seed(uint64_t master, uint64_t index) { return mix_u64(master, index); }

// xoshiro256** seeded through splitmix64.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0x853C49E6748FEA9Bull) {
    uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Unbiased integer in [0, bound). Lemire's multiply-shift with rejection.
  uint64_t below(uint64_t bound) {
    unsigned __int128 m = (unsigned __int128)next() * bound;
    uint64_t lo = (uint64_t)m;
    if (lo < bound) {
      uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        m = (unsigned __int128)next() * bound;
        lo = (uint64_t)m;
      }
    }
    return (uint64_t)(m >> 64);
  }

  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  // Poisson(lambda), exact: inversion for small rates, Hormann's PTRS
  // transformed rejection otherwise.
  long poisson(double lambda) {
    if (lambda <= 0) return 0;
    if (lambda < 10.0) return poisson_inversion(lambda);
    return poisson_ptrs(lambda);
  }

  template <class T>
  void shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  long poisson_inversion(double lambda) {
    double p = std::exp(-lambda);
    double cum = p;
    double u = uniform();
    long k = 0;
    while (u > cum) {
      ++k;
      p *= lambda / (double)k;
      cum += p;
      if (p < 1e-300) break;  // tail mass below double resolution
    }
    return k;
  }

  long poisson_ptrs(double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform();
      double us = 0.5 - std::fabs(u);
      double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= v_r) return (long)kf;
      if (kf < 0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          kf * loglam - lambda - std::lgamma(kf + 1.0)) {
        return (long)kf;
      }
    }
  }

  uint64_t s_[4];
};

}  // namespace sparserank
