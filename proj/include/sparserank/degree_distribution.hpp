#pragma once

// Degree distributions for the two sides of the random matrix ensemble.
// Four families are supported: point masses, Poisson laws truncated below,
// explicit pmfs and polynomial generating functions. All of them have
// finite moments of every order, and the generating function D(x) together
// with its first three derivatives is evaluated exactly (series for the
// truncated Poisson family, polynomial evaluation otherwise).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sparserank/errors.hpp"
#include "sparserank/rng.hpp"

namespace sparserank {

// Lower-truncated exponential series h_r(x) = sum_{j >= r} x^j / j!.
// For r <= 0 the sum is the full exponential e^x. Terms are accumulated from
// j = r upward and the series is cut once a term drops below 1e-16 of the
// partial sum, the double-precision floor.
inline double h_tail(int r, double x) {
  if (r <= 0) return std::exp(x);
  if (x == 0.0) return 0.0;
  double term = 1.0;
  for (int j = 1; j <= r; ++j) term *= x / (double)j;  // x^r / r!
  double sum = term;
  for (int j = r; term > 1e-16 * sum; ++j) {
    term *= x / (double)(j + 1);
    sum += term;
  }
  return sum;
}

// Mean of Po_{>=low}(lambda): lambda * h_{low-1}(lambda) / h_low(lambda).
inline double truncated_poisson_mean(int low, double lambda) {
  return lambda * h_tail(low - 1, lambda) / h_tail(low, lambda);
}

// Solves lambda * h_{low-1}(lambda) / h_low(lambda) = target_mean for lambda
// by bisection; the map lambda -> mean is strictly increasing. Requires
// target_mean > low (the conditioned law's mean exceeds the cutoff).
inline double solve_truncated_poisson_rate(int low, double target_mean) {
  require(low >= 0, errc::invalid_spec, "truncation cutoff must be >= 0");
  require(target_mean > (double)low, errc::infeasible_mean,
          "mean of Po_{>=l} exceeds l for every rate; target must be > l");
  if (low == 0) {
    // plain Poisson: mean is the rate itself
    return target_mean;
  }
  double lo = 1e-12, hi = 1.0;
  while (truncated_poisson_mean(low, hi) < target_mean) {
    hi *= 2.0;
    require(hi < 1e12, errc::infeasible_mean, "no rate reaches the requested mean");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (truncated_poisson_mean(low, mid) < target_mean ? lo : hi) = mid;
  }
  double lambda = 0.5 * (lo + hi);
  require(std::fabs(truncated_poisson_mean(low, lambda) - target_mean) < 1e-10,
          errc::numeric_failure, "rate bisection did not reach 1e-10");
  return lambda;
}

enum class DegreeFamily { point_mass, truncated_poisson, explicit_pmf, pgf_polynomial };

class DegreeDistribution {
 public:
  static DegreeDistribution point_mass(int degree) {
    require(degree >= 0, errc::invalid_spec, "point mass at a negative degree");
    DegreeDistribution d;
    d.family_ = DegreeFamily::point_mass;
    d.pmf_.assign((size_t)degree + 1, 0.0);
    d.pmf_[(size_t)degree] = 1.0;
    d.cache_moments();
    return d;
  }

  // Po_{>=low}(lambda): Poisson conditioned on being at least `low`.
  static DegreeDistribution truncated_poisson(int low, double lambda) {
    require(low >= 0, errc::invalid_spec, "truncation cutoff must be >= 0");
    require(lambda > 0, errc::invalid_spec, "poisson rate must be positive");
    DegreeDistribution d;
    d.family_ = DegreeFamily::truncated_poisson;
    d.trunc_low_ = low;
    d.lambda_ = lambda;
    d.cache_moments();
    return d;
  }

  static DegreeDistribution truncated_poisson_with_mean(int low, double mean) {
    return truncated_poisson(low, solve_truncated_poisson_rate(low, mean));
  }

  static DegreeDistribution explicit_pmf(const std::vector<std::pair<int, double>>& atoms) {
    DegreeDistribution d;
    d.family_ = DegreeFamily::explicit_pmf;
    int max_deg = 0;
    for (auto& [deg, p] : atoms) {
      require(deg >= 0, errc::invalid_spec, "negative degree in pmf");
      require(p >= 0, errc::invalid_spec, "negative probability in pmf");
      max_deg = std::max(max_deg, deg);
    }
    d.pmf_.assign((size_t)max_deg + 1, 0.0);
    for (auto& [deg, p] : atoms) d.pmf_[(size_t)deg] += p;
    d.normalize();
    d.cache_moments();
    return d;
  }

  // Coefficients of the generating function D(x) = sum_j c_j x^j; these are
  // exactly the probabilities, so only the family tag differs from an
  // explicit pmf.
  static DegreeDistribution pgf_polynomial(const std::vector<double>& coeffs) {
    require(!coeffs.empty(), errc::invalid_spec, "empty coefficient list");
    DegreeDistribution d;
    d.family_ = DegreeFamily::pgf_polynomial;
    for (double c : coeffs) require(c >= 0, errc::invalid_spec, "negative pgf coefficient");
    d.pmf_ = coeffs;
    d.normalize();
    d.cache_moments();
    return d;
  }

  DegreeFamily family() const { return family_; }
  double mean() const { return mean_; }
  double second_moment() const { return second_moment_; }
  bool finite_support() const { return family_ != DegreeFamily::truncated_poisson; }
  int truncation_low() const { return trunc_low_; }
  double poisson_rate() const { return lambda_; }

  int max_degree() const {
    require(finite_support(), errc::unsupported_enumeration,
            "truncated poisson support is unbounded");
    for (int j = (int)pmf_.size() - 1; j >= 0; --j)
      if (pmf_[(size_t)j] > 0) return j;
    return 0;
  }

  double pmf(int j) const {
    if (j < 0) return 0.0;
    if (family_ == DegreeFamily::truncated_poisson) {
      if (j < trunc_low_) return 0.0;
      return std::exp(j * std::log(lambda_) - std::lgamma((double)j + 1.0)) /
             h_tail(trunc_low_, lambda_);
    }
    return (size_t)j < pmf_.size() ? pmf_[(size_t)j] : 0.0;
  }

  // D^(order)(x) for order in 0..3.
  double pgf(double x, int order = 0) const {
    require(order >= 0 && order <= 3, errc::unsupported_order,
            "pgf derivatives supported up to order 3");
    require(x >= -1e-3 && x <= 1.0 + 1e-3, errc::invalid_argument, "pgf argument outside [0,1]");
    if (family_ == DegreeFamily::truncated_poisson) {
      double scale = 1.0;
      for (int r = 0; r < order; ++r) scale *= lambda_;
      return scale * h_tail(trunc_low_ - order, lambda_ * x) / h_tail(trunc_low_, lambda_);
    }
    // Horner on the differentiated polynomial sum_{j>=order} p_j j!/(j-order)! x^{j-order}
    double acc = 0.0;
    for (int j = (int)pmf_.size() - 1; j >= order; --j) {
      double coeff = pmf_[(size_t)j];
      for (int r = 0; r < order; ++r) coeff *= (double)(j - r);
      acc = acc * x + coeff;
    }
    return acc;
  }

  // gcd of the support; atoms below 1e-12 are numeric noise and ignored,
  // as is a (stripped-away) atom at zero.
  int gcd_support() const {
    if (family_ == DegreeFamily::truncated_poisson) {
      // support {max(low,0), low+1, ...} contains consecutive integers
      return 1;
    }
    int g = 0;
    for (size_t j = 1; j < pmf_.size(); ++j)
      if (pmf_[j] > 1e-12) g = std::gcd(g, (int)j);
    require(g != 0, errc::invalid_spec, "distribution has no positive support");
    return g;
  }

  int sample(Rng& rng) const {
    if (family_ == DegreeFamily::truncated_poisson) {
      if (trunc_low_ == 0) return (int)rng.poisson(lambda_);
      double term = tp_first_mass_;
      double u = rng.uniform();
      int j = trunc_low_;
      while (u > term && term > 1e-300) {
        u -= term;
        term *= lambda_ / (double)(j + 1);
        ++j;
      }
      return j;
    }
    double u = rng.uniform();
    for (size_t j = 0; j < pmf_.size(); ++j) {
      if (u < pmf_[j]) return (int)j;
      u -= pmf_[j];
    }
    return max_degree();
  }

  // Conditions on the degree being >= 1 and renormalizes. Po_{>=0} becomes
  // Po_{>=1}; finite-support families shed their zero atom.
  DegreeDistribution zero_stripped() const {
    if (family_ == DegreeFamily::truncated_poisson) {
      return trunc_low_ >= 1 ? *this : truncated_poisson(1, lambda_);
    }
    require(pmf_.size() > 1 || (pmf_.size() == 1 && pmf_[0] == 0), errc::degenerate_distribution,
            "all mass at degree zero");
    double zero_mass = pmf_[0];
    require(zero_mass < 1.0 - 1e-12, errc::degenerate_distribution, "all mass at degree zero");
    DegreeDistribution d = *this;
    d.pmf_[0] = 0.0;
    for (auto& p : d.pmf_) p /= (1.0 - zero_mass);
    d.cache_moments();
    return d;
  }

  // Single-atom check, used for the Var = 0 clause of the tightness theorem.
  bool is_deterministic() const {
    if (family_ == DegreeFamily::truncated_poisson) return false;
    int atoms = 0;
    for (double p : pmf_) atoms += (p > 1e-12);
    return atoms == 1;
  }

  const std::vector<double>& dense_pmf() const {
    require(finite_support(), errc::unsupported_enumeration,
            "truncated poisson support is unbounded");
    return pmf_;
  }

 private:
  DegreeDistribution() = default;

  void normalize() {
    double total = std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
    require(std::fabs(total - 1.0) <= 1e-9, errc::invalid_spec,
            "probabilities sum to " + std::to_string(total) + ", expected 1");
    for (auto& p : pmf_) p /= total;
  }

  void cache_moments() {
    if (family_ == DegreeFamily::truncated_poisson) {
      mean_ = truncated_poisson_mean(trunc_low_, lambda_);
      // E[X(X-1)] = lambda^2 h_{low-2}(lambda) / h_low(lambda)
      double fact2 = lambda_ * lambda_ * h_tail(trunc_low_ - 2, lambda_) / h_tail(trunc_low_, lambda_);
      second_moment_ = fact2 + mean_;
      tp_first_mass_ = std::exp(trunc_low_ * std::log(lambda_) - std::lgamma(trunc_low_ + 1.0)) /
                       h_tail(trunc_low_, lambda_);
      return;
    }
    mean_ = 0.0;
    second_moment_ = 0.0;
    for (size_t j = 0; j < pmf_.size(); ++j) {
      mean_ += (double)j * pmf_[j];
      second_moment_ += (double)j * (double)j * pmf_[j];
    }
  }

  DegreeFamily family_ = DegreeFamily::point_mass;
  std::vector<double> pmf_;  // dense by degree; unused for truncated_poisson
  int trunc_low_ = 0;
  double lambda_ = 0.0;
  double mean_ = 0.0;
  double second_moment_ = 0.0;
};

// Degree-biased reweighting P[X^ = j] = j P[X = j] / E[X], the degree seen
// from a uniformly random edge endpoint. Realized as an analytic shift for
// the truncated Poisson family (1 + Po_{>=low-1}(lambda)) and as an explicit
// pmf otherwise.
class SizeBiasedDistribution {
 public:
  explicit SizeBiasedDistribution(const DegreeDistribution& base) {
    require(base.mean() > 0, errc::degenerate_distribution,
            "size biasing requires a positive mean");
    if (base.family() == DegreeFamily::truncated_poisson) {
      shift_ = 1;
      inner_ = DegreeDistribution::truncated_poisson(std::max(base.truncation_low() - 1, 0),
                                                     base.poisson_rate());
      return;
    }
    std::vector<std::pair<int, double>> atoms;
    const auto& pmf = base.dense_pmf();
    for (size_t j = 1; j < pmf.size(); ++j)
      if (pmf[j] > 0) atoms.emplace_back((int)j, (double)j * pmf[j] / base.mean());
    shift_ = 0;
    inner_ = DegreeDistribution::explicit_pmf(atoms);
  }

  double pmf(int j) const { return inner_->pmf(j - shift_); }
  double mean() const { return shift_ + inner_->mean(); }
  int sample(Rng& rng) const { return shift_ + inner_->sample(rng); }
  bool finite_support() const { return inner_->finite_support(); }
  int max_degree() const { return shift_ + inner_->max_degree(); }

 private:
  std::optional<DegreeDistribution> inner_;
  int shift_ = 0;
};

inline SizeBiasedDistribution size_biased(const DegreeDistribution& d) {
  return SizeBiasedDistribution(d);
}

// --- spec grammar -----------------------------------------------------------
//
//   point:3
//   po:mean=2.5            po:lambda=2.5
//   po:>=2:mean=3.0        po:>=2:lambda=1.7
//   pmf:2=0.88,11=0.12
//   pgf:[0,0,0.88,0,0.12]

inline DegreeDistribution parse_distribution(const std::string& spec) {
  auto bad = [&](const std::string& why) -> DegreeDistribution {
    fail(errc::invalid_spec, "bad distribution spec '" + spec + "': " + why);
  };
  auto colon = spec.find(':');
  if (colon == std::string::npos) return bad("missing ':'");
  std::string head = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);

  if (head == "point") {
    try {
      return DegreeDistribution::point_mass(std::stoi(rest));
    } catch (const std::logic_error&) {
      return bad("point mass wants an integer degree");
    }
  }
  if (head == "po") {
    int low = 0;
    if (rest.rfind(">=", 0) == 0) {
      auto next = rest.find(':');
      if (next == std::string::npos) return bad("po:>=L needs a mean= or lambda= part");
      try {
        low = std::stoi(rest.substr(2, next - 2));
      } catch (const std::logic_error&) {
        return bad("bad truncation cutoff");
      }
      rest = rest.substr(next + 1);
    }
    double value = 0;
    bool by_mean;
    if (rest.rfind("mean=", 0) == 0) {
      by_mean = true;
      rest = rest.substr(5);
    } else if (rest.rfind("lambda=", 0) == 0) {
      by_mean = false;
      rest = rest.substr(7);
    } else {
      return bad("expected mean= or lambda=");
    }
    try {
      value = std::stod(rest);
    } catch (const std::logic_error&) {
      return bad("bad numeric value");
    }
    return by_mean ? DegreeDistribution::truncated_poisson_with_mean(low, value)
                   : DegreeDistribution::truncated_poisson(low, value);
  }
  if (head == "pmf") {
    std::vector<std::pair<int, double>> atoms;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) return bad("pmf entries look like degree=prob");
      try {
        atoms.emplace_back(std::stoi(item.substr(0, eq)), std::stod(item.substr(eq + 1)));
      } catch (const std::logic_error&) {
        return bad("bad pmf entry '" + item + "'");
      }
    }
    if (atoms.empty()) return bad("empty pmf");
    return DegreeDistribution::explicit_pmf(atoms);
  }
  if (head == "pgf") {
    if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']')
      return bad("pgf wants a bracketed coefficient list");
    std::vector<double> coeffs;
    std::stringstream ss(rest.substr(1, rest.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        coeffs.push_back(std::stod(item));
      } catch (const std::logic_error&) {
        return bad("bad pgf coefficient '" + item + "'");
      }
    }
    return DegreeDistribution::pgf_polynomial(coeffs);
  }
  return bad("unknown family '" + head + "'");
}

}  // namespace sparserank
