#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "sparserank/degree_distribution.hpp"

using namespace sparserank;

namespace {

// independent factorial-based Poisson pmf for cross-checks
double poisson_pmf(int j, double lambda) {
  double logp = j * std::log(lambda) - lambda - std::lgamma(j + 1.0);
  return std::exp(logp);
}

std::vector<DegreeDistribution> family_zoo() {
  return {
      DegreeDistribution::point_mass(3),
      DegreeDistribution::point_mass(1),
      DegreeDistribution::truncated_poisson(0, 2.5),
      DegreeDistribution::truncated_poisson(2, 1.7),
      DegreeDistribution::truncated_poisson(1, 0.4),
      DegreeDistribution::explicit_pmf({{1, 0.5}, {3, 0.5}}),
      DegreeDistribution::explicit_pmf({{2, 0.2}, {5, 0.3}, {9, 0.5}}),
      DegreeDistribution::pgf_polynomial({0, 0, 22.0 / 25, 0, 0, 0, 0, 0, 0, 0, 0, 3.0 / 25}),
  };
}

}  // namespace

TEST_CASE("point mass pgf and moments") {
  auto d = DegreeDistribution::point_mass(3);
  CHECK(d.pgf(0.5) == Catch::Approx(0.125).epsilon(0));
  CHECK(d.mean() == Catch::Approx(3.0));
  CHECK(d.gcd_support() == 3);
}

TEST_CASE("example-3 polynomial pgf") {
  auto d = DegreeDistribution::pgf_polynomial({0, 0, 22.0 / 25, 0, 0, 0, 0, 0, 0, 0, 0, 3.0 / 25});
  CHECK(d.pmf(2) == Catch::Approx(22.0 / 25).margin(1e-15));
  CHECK(d.pmf(11) == Catch::Approx(3.0 / 25).margin(1e-15));
  CHECK(d.mean() == Catch::Approx(77.0 / 25).margin(1e-12));
}

TEST_CASE("plain poisson matches direct series") {
  auto d = DegreeDistribution::truncated_poisson(0, 2.5);
  for (int j = 0; j <= 40; ++j) CHECK(d.pmf(j) == Catch::Approx(poisson_pmf(j, 2.5)).margin(1e-12));
  CHECK(d.mean() == Catch::Approx(2.5).margin(1e-12));
  CHECK(d.pgf(0.3) == Catch::Approx(std::exp(2.5 * (0.3 - 1.0))).margin(1e-12));
}

TEST_CASE("truncated poisson pmf sums and mean agree with h-functions") {
  for (int low : {0, 1, 2, 3}) {
    auto d = DegreeDistribution::truncated_poisson(low, 1.9);
    double sum = 0, mean = 0, fact2 = 0;
    for (int j = 0; j <= 80; ++j) {
      sum += d.pmf(j);
      mean += j * d.pmf(j);
      fact2 += j * (j - 1.0) * d.pmf(j);
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    CHECK(mean == Catch::Approx(d.mean()).margin(1e-10));
    CHECK(d.pgf(1.0, 1) == Catch::Approx(mean).margin(1e-10));
    CHECK(d.pgf(1.0, 2) == Catch::Approx(fact2).margin(1e-9));
  }
}

TEST_CASE("pgf normalization and derivative identities across the zoo") {
  for (const auto& d : family_zoo()) {
    CHECK(d.pgf(1.0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(d.pgf(1.0, 1) == Catch::Approx(d.mean()).margin(1e-10));
    CHECK(d.pgf(1.0, 2) ==
          Catch::Approx(d.second_moment() - d.mean()).margin(1e-9));
  }
}

TEST_CASE("central finite differences match analytic derivatives") {
  const double h = 1e-6;
  for (const auto& d : family_zoo()) {
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (int order = 0; order < 3; ++order) {
        double fd = (d.pgf(x + h, order) - d.pgf(x - h, order)) / (2 * h);
        double exact = d.pgf(x, order + 1);
        CHECK(std::fabs(fd - exact) <= 1e-6 * (1.0 + std::fabs(exact)));
      }
    }
  }
}

TEST_CASE("pgf derivative order is capped at 3") {
  auto d = DegreeDistribution::point_mass(3);
  CHECK_THROWS_AS(d.pgf(0.5, 4), Error);
}

TEST_CASE("size biasing") {
  SECTION("point mass is a fixed point") {
    auto sb = size_biased(DegreeDistribution::point_mass(4));
    CHECK(sb.pmf(4) == Catch::Approx(1.0));
    CHECK(sb.mean() == Catch::Approx(4.0));
  }
  SECTION("poisson shifts by one") {
    auto base = DegreeDistribution::truncated_poisson(0, 1.3);
    auto sb = size_biased(base);
    for (int j = 1; j <= 60; ++j)
      CHECK(sb.pmf(j) == Catch::Approx(poisson_pmf(j - 1, 1.3)).margin(1e-12));
  }
  SECTION("hand-evaluated explicit pmf") {
    auto sb = size_biased(DegreeDistribution::explicit_pmf({{1, 0.5}, {3, 0.5}}));
    CHECK(sb.pmf(1) == Catch::Approx(0.25).margin(1e-12));
    CHECK(sb.pmf(3) == Catch::Approx(0.75).margin(1e-12));
  }
  SECTION("biased pmf and mean identities hold for every family") {
    for (const auto& d : family_zoo()) {
      auto sb = size_biased(d);
      for (int j = 0; j <= 40; ++j)
        CHECK(sb.pmf(j) == Catch::Approx(j * d.pmf(j) / d.mean()).margin(1e-12));
      CHECK(sb.mean() == Catch::Approx(d.second_moment() / d.mean()).margin(1e-10));
    }
  }
  SECTION("zero mean is rejected") {
    CHECK_THROWS_AS(size_biased(DegreeDistribution::point_mass(0)), Error);
  }
}

TEST_CASE("sampling is deterministic and follows the law") {
  SECTION("point mass and single-atom pmf") {
    Rng rng(7);
    auto pm = DegreeDistribution::point_mass(4);
    for (int i = 0; i < 32; ++i) CHECK(pm.sample(rng) == 4);
    auto single = DegreeDistribution::explicit_pmf({{2, 1.0}});
    for (int i = 0; i < 32; ++i) CHECK(single.sample(rng) == 2);
  }
  SECTION("law of large numbers for Po(2.5)") {
    Rng rng(42);
    auto d = DegreeDistribution::truncated_poisson(0, 2.5);
    double sum = 0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += d.sample(rng);
    CHECK(std::fabs(sum / n - 2.5) < 0.01);
  }
  SECTION("empirical pmf within 3 sigma for every family") {
    const int n = 1'000'000;
    uint64_t seed = 1;
    for (const auto& d : family_zoo()) {
      Rng rng(seed++);
      std::map<int, long> hist;
      for (int i = 0; i < n; ++i) hist[d.sample(rng)]++;
      for (int j = 0; j <= 40; ++j) {
        double p = d.pmf(j);
        if (p < 1e-3) continue;
        double sigma = std::sqrt(p * (1 - p) * n);
        double observed = hist.count(j) ? (double)hist[j] : 0.0;
        CHECK(std::fabs(observed - n * p) <= 3.0 * sigma + 1.0);
      }
    }
  }
}

TEST_CASE("gcd of the support") {
  CHECK(DegreeDistribution::explicit_pmf({{4, 0.5}, {6, 0.5}}).gcd_support() == 2);
  CHECK(DegreeDistribution::truncated_poisson(0, 0.7).gcd_support() == 1);
  CHECK(DegreeDistribution::truncated_poisson(5, 0.7).gcd_support() == 1);
  CHECK(DegreeDistribution::point_mass(3).gcd_support() == 3);
  // atoms below 1e-12 are ignored
  auto noisy = DegreeDistribution::explicit_pmf({{3, 1e-13}, {4, 0.5}, {6, 0.5 - 1e-13}});
  CHECK(noisy.gcd_support() == 2);
  CHECK_THROWS_AS(DegreeDistribution::point_mass(0).gcd_support(), Error);
}

TEST_CASE("truncated poisson rate solving") {
  CHECK(solve_truncated_poisson_rate(0, 2.0) == Catch::Approx(2.0));
  double lam = solve_truncated_poisson_rate(2, 3.0);
  // verify by direct series mean at the returned rate
  auto d = DegreeDistribution::truncated_poisson(2, lam);
  double mean = 0;
  for (int j = 0; j <= 100; ++j) mean += j * d.pmf(j);
  CHECK(mean == Catch::Approx(3.0).margin(1e-9));
  CHECK_THROWS_AS(solve_truncated_poisson_rate(3, 3.0), Error);
  CHECK_THROWS_AS(solve_truncated_poisson_rate(1, 0.8), Error);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(DegreeDistribution::explicit_pmf({{2, -0.1}, {3, 1.1}}), Error);
  CHECK_THROWS_AS(DegreeDistribution::explicit_pmf({{2, 0.6}, {3, 0.6}}), Error);
  CHECK_THROWS_AS(DegreeDistribution::pgf_polynomial({0.5, 0.4}), Error);
  CHECK_THROWS_AS(DegreeDistribution::truncated_poisson(1, -2.0), Error);
}

TEST_CASE("zero stripping") {
  auto po = DegreeDistribution::truncated_poisson(0, 1.5).zero_stripped();
  CHECK(po.truncation_low() == 1);
  CHECK(po.pmf(0) == 0.0);
  auto pm = DegreeDistribution::explicit_pmf({{0, 0.25}, {2, 0.75}}).zero_stripped();
  CHECK(pm.pmf(2) == Catch::Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(DegreeDistribution::point_mass(0).zero_stripped(), Error);
}

TEST_CASE("distribution spec grammar") {
  CHECK(parse_distribution("point:3").pgf(0.5) == Catch::Approx(0.125));
  auto po = parse_distribution("po:>=2:mean=3.0");
  CHECK(po.truncation_low() == 2);
  CHECK(po.mean() == Catch::Approx(3.0).margin(1e-9));
  auto plain = parse_distribution("po:mean=2.5");
  CHECK(plain.truncation_low() == 0);
  CHECK(plain.mean() == Catch::Approx(2.5));
  auto bylam = parse_distribution("po:>=1:lambda=2.0");
  CHECK(bylam.poisson_rate() == Catch::Approx(2.0));
  auto pmf = parse_distribution("pmf:2=0.88,11=0.12");
  CHECK(pmf.pmf(2) == Catch::Approx(0.88));
  CHECK(pmf.pmf(11) == Catch::Approx(0.12));
  auto pgfp = parse_distribution("pgf:[0,0,0.88,0,0.12]");
  CHECK(pgfp.pmf(4) == Catch::Approx(0.12));
  CHECK_THROWS_AS(parse_distribution("nope:1"), Error);
  CHECK_THROWS_AS(parse_distribution("pmf:2=0.5,3=0.6"), Error);
  CHECK_THROWS_AS(parse_distribution("po:>=3:mean=3.0"), Error);
}
