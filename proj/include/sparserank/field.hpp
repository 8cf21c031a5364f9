#pragma once

// Prime fields GF(q). Rank statements over the rationals are exercised through
// a "rational proxy": arithmetic modulo one random prime near 2^31, which
// lower-bounds the rational rank and equals it except with probability
// O(n/p) per instance. The chosen prime is recorded for reproducibility.

#include <cstdint>
#include <string>

#include "sparserank/errors.hpp"
#include "sparserank/rng.hpp"

namespace sparserank {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return (uint64_t)((unsigned __int128)a * b % m);
}

inline uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t m) {
  uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

struct FieldSpec {
  uint64_t q = 2;               // modulus used by all arithmetic
  bool rational_proxy = false;  // q stands in for characteristic zero

  static FieldSpec gf(uint64_t q) {
    require(q >= 2 && q < (1ull << 16), errc::unsupported_field,
            "prime fields are supported for 2 <= q < 2^16");
    require(is_prime_u64(q), errc::unsupported_field, std::to_string(q) + " is not prime");
    return {q, false};
  }

  // Random prime near 2^31, derived from the seed.
  static FieldSpec rational(uint64_t seed = 0) {
    Rng rng(mix_u64(0x726174696F6E616Cull, seed));
    uint64_t candidate = (1ull << 31) + rng.below(1ull << 20);
    candidate |= 1;
    while (!is_prime_u64(candidate)) candidate += 2;
    return {candidate, true};
  }

  bool operator==(const FieldSpec& other) const {
    return q == other.q && rational_proxy == other.rational_proxy;
  }

  std::string label() const {
    return rational_proxy ? "Q~" + std::to_string(q) : "GF(" + std::to_string(q) + ")";
  }
};

}  // namespace sparserank
