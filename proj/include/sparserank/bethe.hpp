#pragma once

// Bethe free entropy of the two-point message measure
//
//   pi_alpha = alpha * delta_{delta_0} + (1 - alpha) * delta_{uniform},
//
// evaluated by exact counting over F_q: the outer expectations over the
// variable degree, the size-biased check degrees and the frozen/uniform
// message splits are finite sums, and every inner partition function is the
// exact number of solutions of a one-row linear equation with nonzero
// coefficients. Evaluating B(pi_alpha) is an enumeration-level consistency
// oracle for the closed-form Phi: the two agree for every alpha.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "sparserank/ensemble.hpp"
#include "sparserank/errors.hpp"
#include "sparserank/field.hpp"
#include "sparserank/rank_formula.hpp"
#include "sparserank/rng.hpp"

namespace sparserank {
namespace detail {

// Number of assignments of `coeffs.size()` field variables (all coefficients
// nonzero) whose weighted sum equals each target value. Exact integer
// convolution counting, one distribution pass per variable.
inline std::vector<uint64_t> solution_counts(uint64_t q, const std::vector<uint64_t>& coeffs) {
  std::vector<uint64_t> counts(q, 0);
  counts[0] = 1;
  for (uint64_t c : coeffs) {
    std::vector<uint64_t> next(q, 0);
    for (uint64_t t = 0; t < q; ++t) {
      if (counts[t] == 0) continue;
      for (uint64_t sigma = 0; sigma < q; ++sigma) {
        uint64_t t2 = (t + sigma * c) % q;
        next[t2] += counts[t];
      }
    }
    counts.swap(next);
  }
  return counts;
}

inline double binom(int n, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r *= (double)(n - i) / (i + 1);
  return r;
}

}  // namespace detail

inline double bethe_two_point(const EnsembleSpec& e, uint64_t q, double alpha,
                              uint64_t chi_seed = 0x6265746865ull) {
  require(is_prime_u64(q) && q >= 2, errc::unsupported_field, "q must be a prime");
  require(e.var_dist.finite_support() && e.check_dist.finite_support(),
          errc::unsupported_enumeration, "both degree laws need finite support");
  const int dmax = e.var_dist.max_degree(), kmax = e.check_dist.max_degree();
  require(dmax <= 12 && kmax <= 12, errc::unsupported_enumeration,
          "enumeration supports maximum degree 12");
  require(alpha >= 0.0 && alpha <= 1.0, errc::invalid_argument, "alpha outside [0,1]");

  Rng chi(chi_seed);
  auto nonzero = [&]() { return 1 + chi.below(q - 1); };
  const double logq = std::log((double)q);

  // --- variable-side term -------------------------------------------------
  // Each incident check has the size-biased degree law; given degree h and
  // s frozen messages among the other h-1, the per-check factor as a function
  // of the center value sigma_1 is q^{-(h-1-s)} * N(-chi_1 sigma_1), with N
  // counted exactly over the uniform messages.
  std::map<std::vector<double>, double> factor_dist;
  for (int h = 1; h <= kmax; ++h) {
    double ph = (double)h * e.check_dist.pmf(h) / e.k;  // size-biased pmf
    if (ph <= 0) continue;
    for (int s = 0; s <= h - 1; ++s) {
      int u = h - 1 - s;
      double w = ph * detail::binom(h - 1, s) * std::pow(alpha, s) * std::pow(1.0 - alpha, u);
      if (w <= 0) continue;
      uint64_t chi_center = nonzero();
      std::vector<uint64_t> coeffs((size_t)u);
      for (auto& c : coeffs) c = nonzero();
      auto counts = detail::solution_counts(q, coeffs);
      double scale = std::pow((double)q, -(double)u);
      std::vector<double> factor(q);
      for (uint64_t s1 = 0; s1 < q; ++s1) {
        uint64_t target = (q - mulmod_u64(chi_center, s1, q)) % q;
        factor[s1] = scale * (double)counts[target];
      }
      factor_dist[factor] += w;
    }
  }
  std::vector<std::vector<double>> outcomes;
  std::vector<double> probs;
  for (auto& [vec, p] : factor_dist) {
    outcomes.push_back(vec);
    probs.push_back(p);
  }

  double var_term = 0.0;
  for (int dv = 1; dv <= dmax; ++dv) {
    double pd = e.var_dist.pmf(dv);
    if (pd <= 0) continue;
    // expectation of log_q sum_{sigma_1} prod of dv i.i.d. factors: iterate
    // over multisets of outcomes with multinomial weights
    double expect = 0.0;
    std::vector<double> prod(q, 1.0);
    auto rec = [&](auto&& self, size_t idx, int remaining, double weight,
                   std::vector<double>& acc) -> void {
      if (idx + 1 == outcomes.size()) {
        double w = weight * std::pow(probs[idx], remaining);
        if (w <= 0) return;
        double z = 0;
        for (uint64_t s1 = 0; s1 < q; ++s1)
          z += acc[s1] * std::pow(outcomes[idx][s1], remaining);
        expect += w * std::log(z) / logq;
        return;
      }
      for (int take = 0; take <= remaining; ++take) {
        double w = weight * detail::binom(remaining, take) * std::pow(probs[idx], take);
        if (w <= 0) continue;
        std::vector<double> next(q);
        for (uint64_t s1 = 0; s1 < q; ++s1)
          next[s1] = acc[s1] * std::pow(outcomes[idx][s1], take);
        self(self, idx + 1, remaining - take, w, next);
      }
    };
    if (outcomes.size() == 1) {
      double z = 0;
      for (uint64_t s1 = 0; s1 < q; ++s1) z += std::pow(outcomes[0][s1], dv);
      expect = std::log(z) / logq;
    } else {
      rec(rec, 0, dv, 1.0, prod);
    }
    var_term += pd * expect;
  }

  // --- check-side term ------------------------------------------------------
  // For a check of degree kv with s frozen messages, the partition function is
  // q^{-(kv-s)} times the number of solutions of the homogeneous equation in
  // the kv-s uniform messages.
  double check_term = 0.0;
  for (int kv = 1; kv <= kmax; ++kv) {
    double pk = e.check_dist.pmf(kv);
    if (pk <= 0) continue;
    for (int s = 0; s <= kv; ++s) {
      int u = kv - s;
      double w = detail::binom(kv, s) * std::pow(alpha, s) * std::pow(1.0 - alpha, u);
      if (w <= 0) continue;
      std::vector<uint64_t> coeffs((size_t)u);
      for (auto& c : coeffs) c = nonzero();
      auto counts = detail::solution_counts(q, coeffs);
      double z = std::pow((double)q, -(double)u) * (double)counts[0];
      check_term += pk * (double)(kv - 1) * w * std::log(z) / logq;
    }
  }

  return var_term - (e.d / e.k) * check_term;
}

}  // namespace sparserank
