#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <set>

#include "sparserank/linalg.hpp"
#include "sparserank/peeling.hpp"
#include "sparserank/rank_formula.hpp"
#include "sparserank/sampler.hpp"

using namespace sparserank;

namespace {

TannerGraph make_graph(int nv, int nc, std::vector<std::pair<int, int>> edges) {
  TannerGraph g;
  g.n_vars = nv;
  g.n_checks = nc;
  g.edges = std::move(edges);
  g.var_degrees.assign((size_t)nv, 0);
  g.check_degrees.assign((size_t)nc, 0);
  for (auto [c, v] : g.edges) {
    g.check_degrees[(size_t)c]++;
    g.var_degrees[(size_t)v]++;
  }
  return g;
}

EnsembleSpec po_point(double rate, int k) {
  return EnsembleSpec::make(DegreeDistribution::truncated_poisson(0, rate),
                            DegreeDistribution::point_mass(k));
}

// residual degree check straight from the peel order
void check_residual(const TannerGraph& g, const CoreResult& core) {
  std::set<int> dead_vars, dead_checks;
  for (auto [v, c] : core.peel_order) {
    dead_vars.insert(v);
    if (c >= 0) dead_checks.insert(c);
  }
  CHECK((int)(g.n_vars - dead_vars.size()) == core.core_vars);
  CHECK((int)(g.n_checks - dead_checks.size()) == core.core_checks);
  std::vector<int> residual_deg((size_t)g.n_vars, 0);
  for (auto [c, v] : g.edges)
    if (!dead_checks.count(c) && !dead_vars.count(v)) residual_deg[(size_t)v]++;
  for (int v = 0; v < g.n_vars; ++v)
    if (!dead_vars.count(v)) CHECK(residual_deg[(size_t)v] >= 2);
}

}  // namespace

TEST_CASE("small cores") {
  SECTION("one check over two leaves peels away completely") {
    auto g = make_graph(2, 1, {{0, 0}, {0, 1}});
    auto core = two_core(g);
    CHECK(core.core_vars == 0);
    CHECK(core.core_checks == 0);
    CHECK(core.rounds >= 1);
  }
  SECTION("triangle gadget is its own core") {
    auto g = make_graph(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}});
    auto core = two_core(g);
    CHECK(core.core_vars == 3);
    CHECK(core.core_checks == 3);
    CHECK(core.peel_order.empty());
    CHECK(core.rounds == 0);
  }
  SECTION("degree-zero variables leave without a check") {
    auto g = make_graph(3, 1, {{0, 0}, {0, 1}});  // variable 2 is isolated
    auto core = two_core(g);
    CHECK(core.core_vars == 0);
    CHECK(core.core_checks == 0);
    bool saw_lonely = false;
    for (auto [v, c] : core.peel_order) saw_lonely |= (v == 2 && c == -1);
    CHECK(saw_lonely);
  }
  SECTION("degree-zero checks stay in the core") {
    TannerGraph g = make_graph(2, 2, {{0, 0}, {0, 1}});  // check 1 has no variables
    auto core = two_core(g);
    CHECK(core.core_checks == 1);
    CHECK(core.core_vars == 0);
  }
}

TEST_CASE("core is order independent and leaves min degree 2") {
  auto e = po_point(2.6, 3);
  Rng rng(51);
  for (int i = 0; i < 15; ++i) {
    auto seq = sample_degree_sequence(e, 240, rng);
    auto g = sample_tanner(seq.var_degrees, seq.check_degrees, rng);
    auto base = two_core(g);
    check_residual(g, base);
    for (int rep = 0; rep < 4; ++rep) {
      Rng scramble(1000 * i + rep);
      auto other = two_core(g, &scramble);
      CHECK(other.core_vars == base.core_vars);
      CHECK(other.core_checks == base.core_checks);
    }
  }
}

TEST_CASE("exact nullity dominates the peeling bound") {
  auto e = po_point(2.0, 3);
  Rng rng(52);
  for (int i = 0; i < 40; ++i) {
    auto seq = sample_degree_sequence(e, 402, rng);
    auto g = sample_tanner(seq.var_degrees, seq.check_degrees, rng);
    auto m = sample_matrix(g, FieldSpec::gf(2), {EntryMode::all_ones, 0}, rng);
    auto core = two_core(g);
    double bound = core_nullity_bound(core, g.n_vars, g.n_checks);
    double exact = (double)nullity(m) / g.n_vars;
    CHECK(exact >= bound - 1e-12);
  }
}

TEST_CASE("supercritical core fractions match the fixed-point formulas") {
  auto e = po_point(2.6, 3);
  auto pred = rank_prediction(e);
  REQUIRE(pred.rho > 0.5);
  REQUIRE(pred.core_hypothesis_ok);
  Rng rng(53);
  const int n = 100002;
  auto seq = sample_degree_sequence(e, n, rng);
  auto g = sample_tanner(seq.var_degrees, seq.check_degrees, rng);
  auto core = two_core(g);
  CHECK(std::fabs((double)core.core_vars / n - pred.core_var_fraction) < 0.01);
  CHECK(std::fabs((double)core.core_checks / n - pred.core_check_fraction) < 0.01);
}

TEST_CASE("peeling a million edges stays under a second") {
  auto e = po_point(2.0, 3);
  Rng rng(54);
  const int n = 450000;  // about 1.04e6 edges after conditioning
  auto seq = sample_degree_sequence(e, n, rng);
  auto g = sample_tanner(seq.var_degrees, seq.check_degrees, rng, /*simple=*/false);
  REQUIRE(g.n_edges() > 1000000);
  auto start = std::chrono::steady_clock::now();
  auto core = two_core(g);
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(core.core_vars >= 0);
  CHECK(elapsed < 1.0);  // soft performance check
}
