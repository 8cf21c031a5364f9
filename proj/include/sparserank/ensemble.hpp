#pragma once

// A matrix ensemble is a pair of degree laws: one for the columns (variable
// nodes) and one for the rows (check nodes). Zero-degree nodes contribute
// nothing to the rank, so both laws are conditioned on being >= 1 here; the
// rank formula is invariant under that conditioning up to the column-count
// renormalization, and every prediction in this library is per nonzero column.

#include <string>

#include "sparserank/degree_distribution.hpp"
#include "sparserank/errors.hpp"

namespace sparserank {

struct EnsembleSpec {
  DegreeDistribution var_dist;    // column degrees, support in {1,2,...}
  DegreeDistribution check_dist;  // row degrees, support in {1,2,...}
  double d;                       // E[var degree]
  double k;                       // E[check degree]

  static EnsembleSpec make(const DegreeDistribution& var_raw, const DegreeDistribution& check_raw) {
    DegreeDistribution v = var_raw.zero_stripped();
    DegreeDistribution c = check_raw.zero_stripped();
    double d = v.mean(), k = c.mean();
    require(d > 0 && k > 0, errc::degenerate_distribution, "both sides need a positive mean");
    return EnsembleSpec{std::move(v), std::move(c), d, k};
  }

  // "<var-spec>/<check-spec>", e.g. "po:mean=2.0/point:3".
  static EnsembleSpec parse(const std::string& text) {
    auto slash = text.find('/');
    require(slash != std::string::npos, errc::invalid_spec,
            "ensemble spec '" + text + "' wants the form <var>/<check>");
    return make(parse_distribution(text.substr(0, slash)),
                parse_distribution(text.substr(slash + 1)));
  }

  // PGF shorthands used throughout the formula layer.
  double D(double x, int order = 0) const { return var_dist.pgf(x, order); }
  double K(double x, int order = 0) const { return check_dist.pgf(x, order); }
};

}  // namespace sparserank
