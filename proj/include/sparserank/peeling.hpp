#pragma once

// Stripping process on the Tanner hypergraph: while some variable node has
// degree one or less, remove it together with its adjacent check (if any).
// What survives is the 2-core; it is unique, so the worklist order is free.

#include <utility>
#include <vector>

#include "sparserank/rng.hpp"
#include "sparserank/tanner_graph.hpp"

namespace sparserank {

struct CoreResult {
  int core_vars = 0;    // n*
  int core_checks = 0;  // m*
  int rounds = 0;       // parallel sweeps until the fixed point
  std::vector<std::pair<int, int>> peel_order;  // (variable, check or -1)
};

// `scramble` permutes the processing order; the result is order-independent,
// which the tests exercise through exactly this hook.
inline CoreResult two_core(const TannerGraph& g, Rng* scramble = nullptr) {
  const int nv = g.n_vars, nc = g.n_checks;
  std::vector<int> var_deg((size_t)nv, 0);
  std::vector<int> check_offset((size_t)nc + 1, 0);
  for (auto [c, v] : g.edges) {
    var_deg[(size_t)v]++;
    check_offset[(size_t)c + 1]++;
  }
  for (int c = 0; c < nc; ++c) check_offset[(size_t)c + 1] += check_offset[(size_t)c];
  std::vector<int> check_vars(g.edges.size());
  std::vector<int> var_offset((size_t)nv + 1, 0);
  {
    std::vector<int> cursor = check_offset;
    for (auto [c, v] : g.edges) check_vars[(size_t)cursor[(size_t)c]++] = v;
    for (int v = 0; v < nv; ++v) var_offset[(size_t)v + 1] = var_deg[(size_t)v];
    for (int v = 0; v < nv; ++v) var_offset[(size_t)v + 1] += var_offset[(size_t)v];
  }
  std::vector<int> var_checks(g.edges.size());
  {
    std::vector<int> cursor = var_offset;
    for (auto [c, v] : g.edges) var_checks[(size_t)cursor[(size_t)v]++] = c;
  }

  std::vector<char> var_alive((size_t)nv, 1), check_alive((size_t)nc, 1);
  std::vector<int> level((size_t)nv, 0);
  std::vector<int> worklist;
  for (int v = 0; v < nv; ++v) {
    if (var_deg[(size_t)v] <= 1) {
      worklist.push_back(v);
      level[(size_t)v] = 1;
    }
  }
  if (scramble) scramble->shuffle(std::span<int>(worklist));

  CoreResult result;
  int rounds = 0;
  for (size_t head = 0; head < worklist.size(); ++head) {
    if (scramble && head < worklist.size() - 1) {
      size_t j = head + scramble->below(worklist.size() - head);
      std::swap(worklist[head], worklist[j]);
    }
    int v = worklist[head];
    if (!var_alive[(size_t)v]) continue;
    var_alive[(size_t)v] = 0;
    rounds = std::max(rounds, level[(size_t)v]);
    int removed_check = -1;
    if (var_deg[(size_t)v] == 1) {
      for (int i = var_offset[(size_t)v]; i < var_offset[(size_t)v + 1]; ++i) {
        int c = var_checks[(size_t)i];
        if (check_alive[(size_t)c]) {
          removed_check = c;
          break;
        }
      }
    }
    if (removed_check >= 0) {
      check_alive[(size_t)removed_check] = 0;
      for (int i = check_offset[(size_t)removed_check];
           i < check_offset[(size_t)removed_check + 1]; ++i) {
        int u = check_vars[(size_t)i];
        if (!var_alive[(size_t)u]) continue;
        if (--var_deg[(size_t)u] == 1) {
          // degree exactly one: u joins the worklist once it crosses the line
          worklist.push_back(u);
          level[(size_t)u] = level[(size_t)v] + 1;
        }
      }
    }
    result.peel_order.emplace_back(v, removed_check);
  }

  for (int v = 0; v < nv; ++v) result.core_vars += var_alive[(size_t)v];
  for (int c = 0; c < nc; ++c) result.core_checks += check_alive[(size_t)c];
  result.rounds = rounds;
  return result;
}

// Peeling lower bound on the nullity fraction: nul(A) >= n - n* - (m - m*).
inline double core_nullity_bound(const CoreResult& core, int n_vars, int n_checks) {
  return ((double)n_vars - core.core_vars - (n_checks - core.core_checks)) / (double)n_vars;
}

}  // namespace sparserank
