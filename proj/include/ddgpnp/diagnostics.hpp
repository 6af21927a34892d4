#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

#include "ddgpnp/field.hpp"
#include "ddgpnp/poisson.hpp"

namespace ddgpnp {

/// Values below this are clipped inside the entropy logarithm.
inline constexpr double entropy_floor = 1e-14;

struct DiagnosticsRecord {
  double t = 0.0;
  std::size_t step = 0;
  std::vector<double> mass;
  double energy = 0.0;
  std::vector<double> min_average;
  std::vector<double> min_g_before;  // min of g over the test sets, before limiting
  std::vector<double> min_g_after;
  std::size_t limited_cells = 0;
  double mu0 = std::numeric_limits<double>::quiet_NaN();
  double mu = 0.0;
  bool entropy_clipped = false;
};

template <int Dim>
double total_mass(const Field<Dim>& c) {
  return integral(c);
}

template <int Dim>
double min_cell_average(const Field<Dim>& c) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c.num_cells(); ++k) m = std::min(m, c.cell(k)[0]);
  return m;
}

struct EnergyValue {
  double value = 0.0;
  bool clipped = false;
};

/// E = int sum_i c_i ln c_i + (1/2) int (sum_i q_i c_i + rho0) psi, by the
/// space's volume quadrature.
template <int Dim>
EnergyValue free_energy(const std::vector<Field<Dim>>& densities, const std::vector<double>& charges,
                        const Field<Dim>& psi, const std::type_identity_t<SpaceTimeFunction<Dim>>& rho0 = {},
                        double t = 0.0) {
  const auto& sp = psi.space();
  const double jac = sp.volume_jacobian();
  EnergyValue e;
  for (std::size_t k = 0; k < sp.num_cells(); ++k) {
    for (std::size_t q = 0; q < sp.num_volume_nodes(); ++q) {
      const double w = jac * sp.volume_node(q).weight;
      double charge = rho0 ? rho0(t, sp.volume_point(k, q)) : 0.0;
      for (std::size_t i = 0; i < densities.size(); ++i) {
        const double c = densities[i].node_value(k, q);
        const double cl = c < entropy_floor ? entropy_floor : c;
        if (c < entropy_floor) e.clipped = true;
        e.value += w * c * std::log(cl);
        charge += charges[i] * c;
      }
      e.value += 0.5 * w * charge * psi.node_value(k, q);
    }
  }
  return e;
}

}  // namespace ddgpnp
