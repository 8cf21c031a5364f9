#pragma once

// Sampling the random matrix ensemble:
//
//  1. degree sequences: m ~ Po(dn/k), variable and check degrees i.i.d. from
//     the ensemble laws, rejected as a whole until both sums agree (the exact
//     conditional law; acceptance is on the order of n^{-1/2});
//  2. Tanner graph: uniform perfect matching of degree clones (configuration
//     model), resampled until simple when a simple graph is requested;
//  3. matrix entries: one nonzero per edge, chosen by an entry map.

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "sparserank/ensemble.hpp"
#include "sparserank/errors.hpp"
#include "sparserank/field.hpp"
#include "sparserank/rng.hpp"
#include "sparserank/sparse_matrix.hpp"
#include "sparserank/tanner_graph.hpp"

namespace sparserank {

struct DegreeSequenceSample {
  std::vector<int> var_degrees;
  std::vector<int> check_degrees;
  long rejections = 0;
};

inline DegreeSequenceSample sample_degree_sequence(const EnsembleSpec& e, int n, Rng& rng,
                                                   long max_attempts = -1) {
  require(n >= 1, errc::invalid_argument, "need at least one column");
  int gcd = e.check_dist.gcd_support();
  require(n % gcd == 0, errc::invalid_argument,
          "n must be divisible by the check-degree support gcd " + std::to_string(gcd));
  if (max_attempts < 0) max_attempts = (long)(1e6 * std::sqrt((double)n));

  const bool var_const = e.var_dist.is_deterministic();
  const bool check_const = e.check_dist.is_deterministic();
  const double poisson_mean = e.d * n / e.k;

  DegreeSequenceSample out;
  for (long attempt = 0; attempt < max_attempts; ++attempt) {
    long var_sum = 0;
    out.var_degrees.assign((size_t)n, 0);
    if (var_const) {
      int deg = e.var_dist.sample(rng);
      out.var_degrees.assign((size_t)n, deg);
      var_sum = (long)deg * n;
    } else {
      for (int i = 0; i < n; ++i) {
        out.var_degrees[(size_t)i] = e.var_dist.sample(rng);
        var_sum += out.var_degrees[(size_t)i];
      }
    }

    long m = rng.poisson(poisson_mean);
    if (m > var_sum) {  // check degrees are >= 1, the sum can only overshoot
      out.rejections++;
      continue;
    }
    out.check_degrees.assign((size_t)m, 0);
    long check_sum = 0;
    bool overshoot = false;
    if (check_const) {
      int deg = m > 0 ? e.check_dist.sample(rng) : 0;
      out.check_degrees.assign((size_t)m, deg);
      check_sum = (long)deg * m;
    } else {
      for (long i = 0; i < m; ++i) {
        out.check_degrees[(size_t)i] = e.check_dist.sample(rng);
        check_sum += out.check_degrees[(size_t)i];
        if (check_sum > var_sum) {  // certain failure, abandon the draw early
          overshoot = true;
          break;
        }
      }
    }
    if (!overshoot && check_sum == var_sum) return out;
    out.rejections++;
  }
  fail(errc::sampling_failure,
       "degree sums never matched in " + std::to_string(max_attempts) + " attempts at n = " +
           std::to_string(n) + "; check the divisibility of the ensemble");
}

inline TannerGraph sample_tanner(const std::vector<int>& var_degrees,
                                 const std::vector<int>& check_degrees, Rng& rng,
                                 bool simple = true, int resample_cap = 10000) {
  long var_sum = 0, check_sum = 0;
  for (int d : var_degrees) var_sum += d;
  for (int k : check_degrees) check_sum += k;
  require(var_sum == check_sum, errc::invalid_argument, "degree sums disagree");

  TannerGraph g;
  g.n_vars = (int)var_degrees.size();
  g.n_checks = (int)check_degrees.size();
  g.var_degrees = var_degrees;
  g.check_degrees = check_degrees;

  std::vector<int> var_clones;
  var_clones.reserve((size_t)var_sum);
  for (int v = 0; v < g.n_vars; ++v)
    for (int i = 0; i < var_degrees[(size_t)v]; ++i) var_clones.push_back(v);

  for (int round = 0; round < resample_cap; ++round) {
    rng.shuffle(std::span<int>(var_clones));
    g.edges.clear();
    g.edges.reserve((size_t)var_sum);
    size_t pos = 0;
    for (int c = 0; c < g.n_checks; ++c)
      for (int i = 0; i < check_degrees[(size_t)c]; ++i) g.edges.emplace_back(c, var_clones[pos++]);
    if (!simple || g.is_simple()) return g;
  }
  fail(errc::sampling_failure,
       "no simple matching found in " + std::to_string(resample_cap) + " resamples");
}

enum class EntryMode { all_ones, uniform_nonzero, seeded_chi };

struct EntryMap {
  EntryMode mode = EntryMode::all_ones;
  uint64_t chi_seed = 0;

  static EntryMap parse(const std::string& text) {
    if (text == "ones") return {EntryMode::all_ones, 0};
    if (text == "uniform") return {EntryMode::uniform_nonzero, 0};
    if (text.rfind("chi:", 0) == 0)
      return {EntryMode::seeded_chi, (uint64_t)std::stoull(text.substr(4))};
    fail(errc::invalid_spec, "entry map '" + text + "' is not ones|uniform|chi:<seed>");
  }

  std::string label() const {
    switch (mode) {
      case EntryMode::all_ones: return "ones";
      case EntryMode::uniform_nonzero: return "uniform";
      case EntryMode::seeded_chi: return "chi:" + std::to_string(chi_seed);
    }
    return "?";
  }
};

// One nonzero entry per Tanner edge. seeded_chi realizes the exchangeable
// entry array: every row and column draws a uniform label, and the entry at
// (i, j) is a fixed pseudorandom function of (seed, row label, column label).
inline SparseMatrix sample_matrix(const TannerGraph& g, FieldSpec field, const EntryMap& map,
                                  Rng& rng) {
  const uint64_t q = field.q;
  std::vector<uint64_t> row_labels, col_labels;
  if (map.mode == EntryMode::seeded_chi) {
    row_labels.resize((size_t)g.n_checks);
    col_labels.resize((size_t)g.n_vars);
    for (auto& x : row_labels) x = rng.next();
    for (auto& x : col_labels) x = rng.next();
  }
  std::vector<Entry> entries;
  entries.reserve(g.edges.size());
  for (auto [check, var] : g.edges) {
    uint64_t val = 1;
    switch (map.mode) {
      case EntryMode::all_ones: val = 1; break;
      case EntryMode::uniform_nonzero: val = 1 + rng.below(q - 1); break;
      case EntryMode::seeded_chi: {
        uint64_t h = mix_u64(map.chi_seed, mix_u64(row_labels[(size_t)check], col_labels[(size_t)var]));
        val = 1 + h % (q - 1);
        break;
      }
    }
    entries.push_back({check, var, val});
  }
  return SparseMatrix(g.n_checks, g.n_vars, field, std::move(entries));
}

inline SparseMatrix sample_ensemble_matrix(const EnsembleSpec& e, int n, FieldSpec field,
                                           const EntryMap& map, Rng& rng, bool simple = true) {
  auto seq = sample_degree_sequence(e, n, rng);
  auto g = sample_tanner(seq.var_degrees, seq.check_degrees, rng, simple);
  return sample_matrix(g, field, map, rng);
}

}  // namespace sparserank
