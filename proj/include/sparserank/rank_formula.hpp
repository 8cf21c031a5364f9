#pragma once

// The variational rank formula. The asymptotic rank fraction of the ensemble
// is 1 - max_{alpha in [0,1]} Phi(alpha) with
//
//   Phi(alpha) = D(1 - K'(alpha)/k) - (d/k) (1 - K(alpha) - (1-alpha) K'(alpha)),
//
// and the stripping analysis is governed by
//
//   phi(alpha) = 1 - alpha - D'(1 - K'(alpha)/k) / d,     Phi' = (d/k) K'' phi.
//
// rho = max{x : Phi'(x) = 0} is the survival probability fixed point of the
// peeling process; the 2-core fractions and the 2-core upper bound
// 1 - max{Phi(0), Phi(rho)} are derived from it.

#include <algorithm>
#include <cmath>
#include <string>

#include "sparserank/ensemble.hpp"
#include "sparserank/errors.hpp"

namespace sparserank {

inline double phi(const EnsembleSpec& e, double alpha) {
  double u = std::max(0.0, 1.0 - e.K(alpha, 1) / e.k);
  return e.D(u) - (e.d / e.k) * (1.0 - e.K(alpha) - (1.0 - alpha) * e.K(alpha, 1));
}

// phi (lowercase) from the stripping analysis; phi_small(alpha) = g(alpha) - alpha
// for the peeling map g(x) = 1 - D'(1 - K'(x)/k)/d.
inline double phi_small(const EnsembleSpec& e, double alpha) {
  double u = std::max(0.0, 1.0 - e.K(alpha, 1) / e.k);
  return 1.0 - alpha - e.D(u, 1) / e.d;
}

// Analytic Phi'(alpha) = (d/k) K''(alpha) phi(alpha); the finite-difference
// cross-check against phi() lives in the tests.
inline double phi_prime_check(const EnsembleSpec& e, double alpha) {
  return (e.d / e.k) * e.K(alpha, 2) * phi_small(e, alpha);
}

// phi'(alpha) = -1 + D''(1 - K'(alpha)/k) K''(alpha) / (d k).
inline double phi_small_prime(const EnsembleSpec& e, double alpha) {
  double u = std::max(0.0, 1.0 - e.K(alpha, 1) / e.k);
  return -1.0 + e.D(u, 2) * e.K(alpha, 2) / (e.d * e.k);
}

// Phi''(alpha) = (d/k) (K'''(alpha) phi(alpha) + K''(alpha) phi'(alpha)).
inline double phi_second(const EnsembleSpec& e, double alpha) {
  return (e.d / e.k) *
         (e.K(alpha, 3) * phi_small(e, alpha) + e.K(alpha, 2) * phi_small_prime(e, alpha));
}

namespace detail {

inline double peeling_map(const EnsembleSpec& e, double x) {
  double u = std::max(0.0, 1.0 - e.K(x, 1) / e.k);
  return 1.0 - e.D(u, 1) / e.d;
}

// True when K'' vanishes identically, i.e. the stripped check law is the
// point mass at 1.
inline bool check_side_degenerate(const EnsembleSpec& e) {
  return e.check_dist.finite_support() && e.check_dist.max_degree() <= 1;
}

}  // namespace detail

// Largest root of Phi' in [0,1], computed as the limit of the peeling
// iteration x <- g(x) started from 1 (rho is its attractive fixed point),
// then polished by bisection on phi over the highest sign-change bracket.
inline double rho(const EnsembleSpec& e) {
  if (detail::check_side_degenerate(e)) return 0.0;  // K'' == 0: degenerate branch
  if (e.check_dist.finite_support() && e.check_dist.max_degree() == 2 &&
      e.check_dist.is_deterministic() && e.var_dist.finite_support() &&
      e.var_dist.max_degree() <= 2) {
    // K = x^2 with d <= 2 a.s.: phi is affine with slope -1 + P[d=2]/d < 0,
    // so the only root is 0.
    return 0.0;
  }

  double x = 1.0;
  for (int it = 0; it < 100000; ++it) {
    double xn = std::clamp(detail::peeling_map(e, x), 0.0, 1.0);
    if (std::fabs(xn - x) < 1e-13) {
      x = xn;
      break;
    }
    x = xn;
  }

  // Highest sign-change bracket of phi below 1; bisection there is robust
  // when the iteration stalls near a flat fixed point.
  const int grid = 10000;
  double hi_at = 1.0, hi_val = phi_small(e, 1.0);
  bool bracket = false;
  double blo = 0, bhi = 0;
  double interior_max = -1.0;
  for (int i = grid - 1; i >= 1; --i) {
    double a = (double)i / grid;
    double v = phi_small(e, a);
    interior_max = std::max(interior_max, v);
    if (!bracket && v == 0.0) {
      blo = bhi = a;  // grid point exactly on a root
      bracket = true;
    } else if (!bracket && v * hi_val < 0.0) {
      blo = a;
      bhi = hi_at;
      bracket = true;
    }
    hi_at = a;
    hi_val = v;
  }

  auto bisect = [&](double lo, double hi) {
    double flo = phi_small(e, lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      double mid = 0.5 * (lo + hi);
      double fm = phi_small(e, mid);
      if (fm == 0.0) return mid;
      if (fm * flo < 0.0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    return 0.5 * (lo + hi);
  };

  if (bracket && bhi >= x - 1e-6) x = bisect(blo, bhi);
  if (x < 1e-9) return 0.0;
  if (std::fabs(phi_small(e, x)) < 1e-10) return x;
  if (bracket) {
    // stalled iterate above a genuine crossing
    double y = bisect(blo, bhi);
    if (y < 1e-9) return 0.0;
    if (std::fabs(phi_small(e, y)) < 1e-10) return y;
  } else if (interior_max < -1e-8) {
    // phi strictly negative on (0,1): zero is the only root
    return 0.0;
  }
  fail(errc::numeric_failure,
       "peeling fixed point did not converge; last iterate " + std::to_string(x));
}

struct MaxPhiResult {
  double alpha_star;
  double phi_max;
};

// Global maximum of Phi over [0,1]: scan of 10^4 + 1 equispaced points, then
// golden-section refinement inside the best bracket. Ties at 1e-12 resolution
// report the smallest alpha.
inline MaxPhiResult max_phi(const EnsembleSpec& e) {
  const int grid = 10000;
  int best = 0;
  double best_val = phi(e, 0.0);
  for (int i = 1; i <= grid; ++i) {
    double v = phi(e, (double)i / grid);
    if (v > best_val + 1e-15) {
      best_val = v;
      best = i;
    }
  }
  // smallest grid point tied with the best value
  for (int i = 0; i < best; ++i) {
    if (phi(e, (double)i / grid) >= best_val - 1e-12) {
      best = i;
      best_val = phi(e, (double)i / grid);
      break;
    }
  }

  double a = (double)std::max(best - 1, 0) / grid;
  double b = (double)std::min(best + 1, grid) / grid;
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = phi(e, x1), f2 = phi(e, x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = phi(e, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = phi(e, x1);
    }
  }
  double alpha_star = 0.5 * (a + b);
  double val = phi(e, alpha_star);
  if (val < best_val) {
    alpha_star = (double)best / grid;
    val = best_val;
  }
  // smallest-alpha tie break against the endpoints
  if (phi(e, 0.0) >= val - 1e-12) return {0.0, phi(e, 0.0)};
  return {alpha_star, val};
}

enum class Tightness { tight_by_theorem, bound_not_tight, undetermined };

inline const char* to_string(Tightness t) {
  switch (t) {
    case Tightness::tight_by_theorem: return "TightByTheorem";
    case Tightness::bound_not_tight: return "BoundNotTight";
    case Tightness::undetermined: return "Undetermined";
  }
  return "?";
}

struct RankPrediction {
  double alpha_star = 0;
  double phi_max = 0;
  double rank_fraction = 0;        // 1 - phi_max, per nonzero column
  double rho = 0;                  // largest root of Phi'
  double core_var_fraction = 0;    // lim n*/n
  double core_check_fraction = 0;  // lim m*/n
  double two_core_bound = 0;       // 1 - max{Phi(0), Phi(rho)}
  Tightness tightness = Tightness::undetermined;
  bool core_hypothesis_ok = true;  // phi'(rho) < 0, hypothesis of the core limit
  double phi_small_prime_at_rho = 0;
};

// Both marginals inside the tightness theorem's clauses: constant degree or a
// lower-truncated Poisson. The check is structural on the family tag; a pmf
// that merely happens to coincide with a Poisson does not qualify.
inline bool tightness_clause(const DegreeDistribution& dist) {
  return dist.is_deterministic() || dist.family() == DegreeFamily::truncated_poisson;
}

inline Tightness tightness_certificate_impl(const EnsembleSpec& e, double phi_max_val,
                                            double phi0, double phirho) {
  if (tightness_clause(e.var_dist) && tightness_clause(e.check_dist))
    return Tightness::tight_by_theorem;
  if (phi_max_val > std::max(phi0, phirho) + 1e-7) return Tightness::bound_not_tight;
  return Tightness::undetermined;
}

inline Tightness tightness_certificate(const EnsembleSpec& e) {
  double r = rho(e);
  return tightness_certificate_impl(e, max_phi(e).phi_max, phi(e, 0.0), phi(e, r));
}

inline RankPrediction rank_prediction(const EnsembleSpec& e) {
  RankPrediction p;
  p.rho = rho(e);
  auto m = max_phi(e);
  p.alpha_star = m.alpha_star;
  p.phi_max = m.phi_max;
  p.rank_fraction = 1.0 - p.phi_max;
  if (p.rho > 0) {
    double w = e.K(p.rho, 1) / e.k;
    double u = std::max(0.0, 1.0 - w);
    p.core_var_fraction = std::max(0.0, 1.0 - e.D(u) - w * e.D(u, 1));
    p.core_check_fraction = std::max(0.0, (e.d / e.k) * e.K(p.rho));
  }
  p.two_core_bound = 1.0 - std::max(phi(e, 0.0), phi(e, p.rho));
  p.tightness = tightness_certificate_impl(e, p.phi_max, phi(e, 0.0), phi(e, p.rho));
  p.phi_small_prime_at_rho = phi_small_prime(e, p.rho);
  p.core_hypothesis_ok = p.phi_small_prime_at_rho < 0;
  return p;
}

}  // namespace sparserank
