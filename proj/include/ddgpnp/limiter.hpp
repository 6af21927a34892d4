#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ddgpnp/errors.hpp"
#include "ddgpnp/test_set.hpp"

namespace ddgpnp {

struct LimiterReport {
  std::vector<double> theta;  // per cell, in [0, 1]
  std::size_t limited = 0;    // cells with theta < 1
  double min_before = std::numeric_limits<double>::infinity();
  double min_after = std::numeric_limits<double>::infinity();
};

/// Scaling limiter around the M-weighted cell average:
///   w <- wbar + theta (w - wbar),  theta = min(1, wbar / (wbar - min_S w)).
/// Modifies g in place. Throws PositivityLoss when some wbar <= 0.
template <int Dim>
LimiterReport apply_scaling_limiter(Field<Dim>& g, const WeightField<Dim>& M, const TestSet<Dim>& ts) {
  constexpr int nb = Basis<Dim>::size;
  const std::size_t n = g.num_cells();
  LimiterReport rep;
  rep.theta.assign(n, 1.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double wbar = weighted_cell_average(g, M, c);
    if (!(wbar > 0.0)) {
      throw PositivityLoss("nonpositive weighted cell average " + std::to_string(wbar) + " in cell " +
                               std::to_string(c),
                           c);
    }
    const double m = ts.min_on_cell(g, c);
    rep.min_before = std::min(rep.min_before, m);
    if (m < 0.0) {
      const double theta = std::clamp(wbar / (wbar - m), 0.0, 1.0);
      double* cf = g.cell(c);
      cf[0] = wbar + theta * (cf[0] - wbar);
      for (int b = 1; b < nb; ++b) cf[b] *= theta;
      rep.theta[c] = theta;
      ++rep.limited;
      rep.min_after = std::min(rep.min_after, ts.min_on_cell(g, c));
    } else {
      rep.min_after = std::min(rep.min_after, m);
    }
  }
  return rep;
}

/// Non-mutating form: returns the limited copy.
template <int Dim>
std::pair<Field<Dim>, LimiterReport> scaling_limiter(const Field<Dim>& g, const WeightField<Dim>& M,
                                                      const TestSet<Dim>& ts) {
  Field<Dim> out = g;
  LimiterReport rep = apply_scaling_limiter(out, M, ts);
  return {std::move(out), std::move(rep)};
}

}  // namespace ddgpnp
