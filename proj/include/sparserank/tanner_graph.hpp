#pragma once

// Bipartite Tanner graph: check nodes (rows) against variable nodes (columns).
// Multigraphs are representable; samplers reject them unless asked otherwise.

#include <algorithm>
#include <utility>
#include <vector>

namespace sparserank {

struct TannerGraph {
  int n_vars = 0;
  int n_checks = 0;
  std::vector<std::pair<int, int>> edges;  // (check, var), one per clone pairing
  std::vector<int> var_degrees;
  std::vector<int> check_degrees;

  bool is_simple() const {
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  }

  long n_edges() const { return (long)edges.size(); }
};

}  // namespace sparserank
